use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use spinlab_core::arith::lattice::lll;
use spinlab_core::arith::matrix::det;
use spinlab_core::field::{CyclicField, FieldElement, FieldParams};
use spinlab_core::hilbert::{coords8, published_gram, symbol, GramMatrix};
use spinlab_core::residue::{Ring8, Ring8Element};
use spinlab_core::square_classes::class_of;
use spinlab_core::starlight::star_of_unit;

struct K5 {
    field: CyclicField,
    ring: Ring8,
    gram: GramMatrix,
}

fn k5() -> &'static K5 {
    static K: OnceLock<K5> = OnceLock::new();
    K.get_or_init(|| {
        let field = CyclicField::build(FieldParams::new(5, 11, 1).unwrap()).unwrap();
        let ring = Ring8::from_field(&field).unwrap();
        let gram = published_gram(&ring).unwrap();
        K5 { field, ring, gram }
    })
}

fn element() -> impl Strategy<Value = FieldElement> {
    prop::collection::vec(-20i64..20, 5).prop_map(|c| FieldElement::from_i64(&c))
}

/// A unit mod 8.
fn unit8() -> impl Strategy<Value = Ring8Element> {
    prop::collection::vec(0u8..8, 5)
        .prop_map(Ring8Element::new)
        .prop_filter("unit mod 8", |x| k5().ring.is_unit(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_multiplicative(x in element(), y in element()) {
        let f = &k5().field;
        prop_assert_eq!(f.norm(&f.mul(&x, &y)), f.norm(&x) * f.norm(&y));
    }

    #[test]
    fn galois_is_a_ring_automorphism(x in element(), y in element(), j in 0i64..5, k in 0i64..5) {
        let f = &k5().field;
        prop_assert_eq!(f.galois_apply(&f.mul(&x, &y), j), f.mul(&f.galois_apply(&x, j), &f.galois_apply(&y, j)));
        prop_assert_eq!(f.galois_apply(&f.galois_apply(&x, j), k), f.galois_apply(&x, j + k));
        prop_assert_eq!(f.norm(&f.galois_apply(&x, j)), f.norm(&x));
    }

    #[test]
    fn reduction_mod_8_is_a_ring_map(x in element(), y in element(), j in 1i64..5) {
        let K5 { field: f, ring: r, .. } = k5();
        prop_assert_eq!(r.reduce(&f.mul(&x, &y)), r.mul(&r.reduce(&x), &r.reduce(&y)));
        prop_assert_eq!(r.reduce(&f.galois_apply(&x, j)), r.galois_apply(&r.reduce(&x), j));
    }

    #[test]
    fn square_class_coordinates_are_a_homomorphism(u in unit8(), v in unit8()) {
        let r = &k5().ring;
        let n = r.degree();
        let (cu, cv) = (coords8(r, &u).unwrap(), coords8(r, &v).unwrap());
        prop_assert_eq!(coords8(r, &r.mul(&u, &v)).unwrap().packed(n), cu.packed(n) ^ cv.packed(n));
        prop_assert!(coords8(r, &r.mul(&u, &u)).unwrap().is_square());
        prop_assert_eq!(class_of(r, &r.mul(&u, &v)).unwrap(), class_of(r, &u).unwrap() + class_of(r, &v).unwrap());
    }

    #[test]
    fn symbol_laws(u in unit8(), v in unit8(), w in unit8(), j in 1i64..5) {
        let K5 { ring: r, gram: g, .. } = k5();
        let s = |a: &Ring8Element, b: &Ring8Element| symbol(r, a, b, g).unwrap();
        prop_assert_eq!(s(&r.mul(&u, &w), &v), s(&u, &v) * s(&w, &v));
        prop_assert_eq!(s(&u, &v), s(&v, &u));
        prop_assert_eq!(s(&r.galois_apply(&u, j), &r.galois_apply(&v, j)), s(&u, &v));
        prop_assert_eq!(s(&u, &r.mul(&v, &v)), 1);
    }

    #[test]
    fn star_is_galois_and_square_invariant(u in unit8(), v in unit8(), j in 1i64..5) {
        let K5 { ring: r, gram: g, .. } = k5();
        let star = star_of_unit(r, &u, g).unwrap();
        prop_assert_eq!(star_of_unit(r, &r.galois_apply(&u, j), g).unwrap(), star);
        prop_assert_eq!(star_of_unit(r, &r.mul(&u, &r.mul(&v, &v)), g).unwrap(), star);
    }

    #[test]
    fn lll_preserves_the_lattice(rows in prop::collection::vec(prop::collection::vec(-50i64..50, 3), 3)) {
        let basis: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect();
        let d = det(&basis);
        prop_assume!(d != BigInt::from(0));
        let dot = |x: &[BigInt], y: &[BigInt]| x.iter().zip(y).map(|(a, b)| a * b).sum::<BigInt>();
        let reduced = lll(basis.clone(), dot);
        prop_assert_eq!(det(&reduced).abs(), d.abs());
        let first = dot(&reduced[0], &reduced[0]);
        let shortest_input = basis.iter().map(|v| dot(v, v)).min().unwrap();
        prop_assert!(first <= shortest_input * BigInt::from(4));
    }
}
