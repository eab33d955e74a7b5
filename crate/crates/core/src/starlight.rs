//! The star map on `M4`, the Starlight invariant `m_K`, and the exact
//! densities derived from it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{coords8_one_unit, GramMatrix, Provenance};
use crate::residue::{Ring8, Ring8Element};
use crate::square_classes::{class_of, OrbitTable, SquareClassM4};

/// Star of a unit congruent to 1 mod 2.
fn star_of_one_unit(r: &Ring8, w: &Ring8Element, g: &GramMatrix) -> i8 {
    let n = r.degree();
    let x = coords8_one_unit(r, w).packed(n);
    for j in 1..=(n as i64 - 1) / 2 {
        let y = coords8_one_unit(r, &r.galois_apply(w, j)).packed(n);
        if g.pair(x, y) == 1 {
            return -1;
        }
    }
    1
}

/// `+1` iff `(a, a^(sigma^j))_2 = 1` for `j = 1..(n-1)/2`, where `a` is the
/// canonical lift `1 + 2 lift(c)`. The remaining `j` follow by symmetry and
/// Galois invariance of the symbol.
pub fn star_of_class(r: &Ring8, c: SquareClassM4, g: &GramMatrix) -> i8 {
    star_of_one_unit(r, &r.canonical_unit(c.0), g)
}

/// Star of an arbitrary unit mod 8.
pub fn star_of_unit(r: &Ring8, u: &Ring8Element, g: &GramMatrix) -> Result<i8> {
    if !r.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    let w = if u.mod2_mask() == r.unity().mod2_mask() {
        u.clone()
    } else {
        r.teichmuller_normalize(u)?
    };
    Ok(star_of_one_unit(r, &w, g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStar {
    pub representative: SquareClassM4,
    pub size: usize,
    pub star: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarTable {
    pub n: usize,
    pub provenance: Provenance,
    pub orbits: Vec<OrbitStar>,
    pub m_k: u64,
    /// Number of orbits with star `+1`.
    pub kernel_size: u64,
    /// Number of classes with star `+1`.
    pub star_class_count: u64,
}

/// `(2^(n-1) - 1) / n`, the largest value `m_K` can take.
pub fn m_k_bound(n: usize) -> u64 {
    ((1u64 << (n - 1)) - 1) / n as u64
}

/// Evaluates the star map on every class and every orbit and checks the
/// structural identities relating them.
pub fn starlight_invariant(r: &Ring8, g: &GramMatrix) -> Result<StarTable> {
    let n = r.degree();
    let table = OrbitTable::build(r)?;
    let class_stars: Vec<i8> = (0..table.class_count() as u64)
        .into_par_iter()
        .map(|c| star_of_class(r, SquareClassM4(c), g))
        .collect();

    let orbits: Vec<OrbitStar> = table
        .orbits()
        .iter()
        .map(|o| OrbitStar {
            representative: o.representative,
            size: o.size,
            star: class_stars[o.representative.0 as usize],
        })
        .collect();
    for (c, &s) in class_stars.iter().enumerate() {
        let o = &orbits[table.orbit_index(SquareClassM4(c as u64))];
        if o.star != s {
            return Err(Error::WellDefinednessFailure(format!(
                "class {} and its orbit representative {} have different stars",
                SquareClassM4(c as u64).to_bit_string(n),
                o.representative.to_bit_string(n)
            )));
        }
    }

    let minus_one = table.minus_one();
    if class_stars[0] != 1 || class_stars[minus_one.0 as usize] != -1 {
        return Err(Error::Consistency(format!(
            "star(1) = {}, star(-1) = {}",
            class_stars[0], class_stars[minus_one.0 as usize]
        )));
    }

    let by_orbits = orbits.iter().filter(|o| o.size > 1 && o.star == 1).count() as u64;
    let kernel_size = orbits.iter().filter(|o| o.star == 1).count() as u64;
    if by_orbits + 1 != kernel_size {
        return Err(Error::StarInconsistency {
            by_orbits,
            by_kernel: kernel_size as i64 - 1,
        });
    }
    let m_k = by_orbits;

    let star_class_count = class_stars.iter().filter(|&&s| s == 1).count() as u64;
    if star_class_count != m_k * n as u64 + 1 {
        return Err(Error::Consistency(format!(
            "{star_class_count} classes have star 1, expected {}",
            m_k * n as u64 + 1
        )));
    }
    // star(a) = 1 forces star(-a) = -1
    if let Some(c) = (0..class_stars.len())
        .find(|&c| class_stars[c] == 1 && class_stars[c ^ minus_one.0 as usize] == 1)
    {
        return Err(Error::Consistency(format!(
            "both {} and its negative have star 1",
            SquareClassM4(c as u64).to_bit_string(n)
        )));
    }
    if m_k > m_k_bound(n) {
        return Err(Error::BoundViolation {
            m_k,
            max: m_k_bound(n),
        });
    }
    Ok(StarTable {
        n,
        provenance: g.provenance,
        orbits,
        m_k,
        kernel_size,
        star_class_count,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub n: usize,
    pub m_k: u64,
    pub d_k: BigRational,
    pub d_rs: BigRational,
    pub c_k: BigRational,
    pub c_ks: BigRational,
    pub d_k_lower: BigRational,
    pub d_k_upper: BigRational,
    pub d_rs_lower: BigRational,
    pub d_rs_upper: BigRational,
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Exact densities for degree `n` and invariant `m_k`.
pub fn density_report(n: usize, m_k: u64) -> Result<DensityReport> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Param(crate::error::ParamCheck::DegreeNotOddPrime));
    }
    if m_k > m_k_bound(n) {
        return Err(Error::BoundViolation {
            m_k,
            max: m_k_bound(n),
        });
    }
    let nb = BigInt::from(n);
    let mk = BigInt::from(m_k);
    let base: BigInt = pow2(n - 1) * (&nb - 1) + &mk * &nb + 1;
    let star: BigInt = &mk * &nb + 1;
    let half = ratio(BigInt::one(), BigInt::from(2));
    let c_scale = pow2((3 * n - 1) / 2);
    let report = DensityReport {
        n,
        m_k,
        d_k: ratio(base.clone(), pow2(n) * &nb),
        d_rs: ratio(star.clone(), pow2(n)),
        c_k: ratio(base, &c_scale * &nb),
        c_ks: ratio(star, c_scale),
        d_k_lower: ratio(pow2(n - 1) * (&nb - 1) + BigInt::one(), pow2(n) * &nb),
        d_k_upper: half.clone(),
        d_rs_lower: ratio(BigInt::one(), pow2(n)),
        d_rs_upper: half,
    };
    let decomposed = ratio(&nb - 1, BigInt::from(2) * &nb)
        + &report.d_rs / BigRational::from_integer(nb.clone());
    if decomposed != report.d_k {
        return Err(Error::Consistency(
            "D_K differs from (n-1)/(2n) + d_RS/n".into(),
        ));
    }
    let in_range = |x: &BigRational, lo: &BigRational, hi: &BigRational| lo <= x && x <= hi;
    if !in_range(&report.d_k, &report.d_k_lower, &report.d_k_upper)
        || !in_range(&report.d_rs, &report.d_rs_lower, &report.d_rs_upper)
        || report.d_k_lower <= BigRational::zero()
    {
        return Err(Error::Consistency("density outside its proven bounds".into()));
    }
    Ok(report)
}

/// `a/b` in lowest terms, or `a` for integers.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellDefinedReport {
    pub trials: usize,
    pub lift_checks: usize,
    pub orbit_checks: usize,
    pub twist_checks: usize,
}

/// For random classes: random mod-8 lifts, Galois conjugates of the lift,
/// and the lift multiplied by 5 must all have the same star.
pub fn star_welldefined_check<R: Rng + ?Sized>(
    r: &Ring8,
    g: &GramMatrix,
    trials: usize,
    rng: &mut R,
) -> Result<WellDefinedReport> {
    let n = r.degree();
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let five = r.from_int(5);
    let mut report = WellDefinedReport {
        trials,
        lift_checks: 0,
        orbit_checks: 0,
        twist_checks: 0,
    };
    let fail = |what: &str, c: SquareClassM4, u: &Ring8Element| {
        Error::WellDefinednessFailure(format!(
            "{what}: class {} with lift {u}",
            c.to_bit_string(n)
        ))
    };
    for _ in 0..trials {
        let c = SquareClassM4(rng.gen::<u64>() & mask);
        let expected = star_of_class(r, c, g);
        // canonical lift times a random square times a random 1 + 4t
        let s = r.random_unit(rng);
        let t = r.random_element(rng);
        let one_plus = r.add(r.unity(), &r.scale(&t, 4));
        let u = r.mul(&r.mul(&r.canonical_unit(c.0), &r.mul(&s, &s)), &one_plus);
        if class_of(r, &u)? != c {
            return Err(fail("lift left its class", c, &u));
        }
        if star_of_unit(r, &u, g)? != expected {
            return Err(fail("lift changed the star", c, &u));
        }
        report.lift_checks += 1;
        let k = rng.gen_range(1..n.max(2)) as i64;
        if star_of_unit(r, &r.galois_apply(&u, k), g)? != expected {
            return Err(fail("Galois conjugate changed the star", c, &u));
        }
        report.orbit_checks += 1;
        if star_of_unit(r, &r.mul(&five, &u), g)? != expected {
            return Err(fail("multiplying by 5 changed the star", c, &u));
        }
        report.twist_checks += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CyclicField, FieldParams};
    use crate::hilbert::{gram_from_formula, gram_from_oracle};
    use crate::square_classes::minus_one_class;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn ring(n: u64, ell: u64) -> Ring8 {
        let f = CyclicField::build(FieldParams::new(n, ell, 1).unwrap()).unwrap();
        Ring8::from_field(&f).unwrap()
    }

    #[test]
    fn conductor_seven() {
        let r = ring(3, 7);
        let g = gram_from_oracle(&r).unwrap();
        assert_eq!(star_of_class(&r, SquareClassM4(0), &g), 1);
        assert_eq!(star_of_class(&r, minus_one_class(&r), &g), -1);
        let t = starlight_invariant(&r, &g).unwrap();
        assert_eq!(t.m_k, 1);
        assert_eq!(t.kernel_size, 2);
        assert_eq!(t.star_class_count, 4);
        let big: Vec<i8> = t.orbits.iter().filter(|o| o.size == 3).map(|o| o.star).collect();
        assert_eq!(big.len(), 2);
        assert_eq!(big.iter().filter(|&&s| s == 1).count(), 1);
    }

    #[test]
    fn five_has_star_one() {
        let r = ring(3, 7);
        let g = gram_from_oracle(&r).unwrap();
        assert_eq!(star_of_unit(&r, &r.from_int(5), &g).unwrap(), 1);
    }

    #[test]
    fn degree_five_and_eleven() {
        let r = ring(5, 11);
        let g = gram_from_oracle(&r).unwrap();
        assert_eq!(starlight_invariant(&r, &g).unwrap().m_k, 1);
        let r = ring(11, 23);
        let g = gram_from_formula(&r);
        assert_eq!(starlight_invariant(&r, &g).unwrap().m_k, 3);
    }

    #[test]
    fn densities() {
        let d = density_report(3, 1).unwrap();
        assert_eq!(d.d_k, q(1, 2));
        assert_eq!(d.d_rs, q(1, 2));
        assert_eq!(d.c_k, q(1, 4));
        assert_eq!(d.c_ks, q(1, 4));
        let d = density_report(5, 1).unwrap();
        assert_eq!(d.d_k, q(7, 16));
        assert_eq!(d.d_rs, q(3, 16));
        assert_eq!(density_report(13, 5).unwrap().d_k, q(1893, 4096));
        assert_eq!(density_report(11, 3).unwrap().d_k, q(467, 1024));
        assert_eq!(format_rational(&q(10274, 22528)), "467/1024");
        assert!(matches!(
            density_report(3, 2),
            Err(Error::BoundViolation { m_k: 2, max: 1 })
        ));
    }

    #[test]
    fn welldefinedness_on_conductor_seven() {
        let r = ring(3, 7);
        let g = gram_from_oracle(&r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rep = star_welldefined_check(&r, &g, 1000, &mut rng).unwrap();
        assert_eq!(rep.twist_checks, 1000);
    }
}
