//! Generators of principal prime-power ideals by exact lattice reduction
//! under the trace form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::primes::PrimeDescriptor;
use crate::arith::lattice::{lll, short_vectors, Vector};
use crate::error::{Error, Result};
use crate::field::{CyclicField, FieldElement};

/// Doublings of the enumeration radius before giving up.
pub const RADIUS_DOUBLINGS: u32 = 12;

/// Integer basis of `P^h` for the prime `P` of `d`: the kernel of
/// `x -> sum x_i c_i mod p^h`, with `c_i` the images of the periods under
/// the Hensel lift of the root.
pub fn ideal_power_basis(f: &CyclicField, d: &PrimeDescriptor, h: u32) -> Result<(BigInt, Vec<Vector>)> {
    let n = f.degree();
    let p = BigInt::from(d.p);
    let q = num_traits::pow(p.clone(), h as usize);
    let minpoly = f.period_minpoly();
    let deriv = minpoly.derivative();
    let mut r = BigInt::from(d.root);
    for _ in 1..h {
        let fr = minpoly.eval(&r).mod_floor(&q);
        let dr = deriv.eval(&r).mod_floor(&q);
        let inv = mod_inverse(&dr, &q).ok_or(Error::BadPrime(d.p))?;
        r = (r - fr * inv).mod_floor(&q);
    }
    let den_inv = mod_inverse(&f.interp_denominator().mod_floor(&q), &q).ok_or(Error::DenominatorClash(d.p))?;
    let images: Vec<BigInt> = f
        .interp_scaled()
        .iter()
        .map(|poly| (poly.eval(&r) * &den_inv).mod_floor(&q))
        .collect();
    let k = images
        .iter()
        .position(|c| !(c % &p).is_zero())
        .ok_or_else(|| Error::Consistency(format!("all periods vanish modulo a prime above {}", d.p)))?;
    let ck_inv = mod_inverse(&images[k], &q).expect("unit image");
    let mut basis = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        if i == k {
            v[k] = q.clone();
        } else {
            v[i] = BigInt::one();
            v[k] = (-(&images[i] * &ck_inv)).mod_floor(&q);
        }
        basis.push(v);
    }
    Ok((q, basis))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Smallest `Tr(x^2)` any element of norm `N` can have, rounded up:
/// `n * (N^(2/n) + 1)` by the AM-GM inequality on the embeddings.
pub fn radius_floor(n: usize, norm: &BigInt) -> BigInt {
    let root = (norm * norm).nth_root(n as u32);
    BigInt::from(n) * (root + 1)
}

/// An element of `P^h` of norm `+-p^h`, minimal for `Tr(x^2)` and then
/// lexicographically. Fails if no generator lies within the radius cap.
pub fn ideal_generator(f: &CyclicField, d: &PrimeDescriptor, h: u32) -> Result<FieldElement> {
    let (q, basis) = ideal_power_basis(f, d, h)?;
    let inner = |x: &[BigInt], y: &[BigInt]| f.trace_form(x, y);
    let reduced = lll(basis, inner);
    let mut radius = radius_floor(f.degree(), &q);
    for _ in 0..=RADIUS_DOUBLINGS {
        for (_, v) in short_vectors(&reduced, &inner, &radius) {
            let x = FieldElement::new(v);
            if f.norm(&x).abs() == q {
                return Ok(x);
            }
        }
        radius <<= 1;
    }
    Err(Error::EnumerationExhausted {
        p: d.p,
        norm: q.to_string(),
        radius: (radius >> 1usize).to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirics::primes::primes_above;
    use crate::field::FieldParams;

    #[test]
    fn generators_for_conductor_seven() {
        let f = CyclicField::build(FieldParams::new(3, 7, 1).unwrap()).unwrap();
        for p in [13u64, 29, 41, 43, 83, 1009] {
            for d in primes_above(&f, p).unwrap() {
                let a = ideal_generator(&f, &d, 1).unwrap();
                assert_eq!(f.norm(&a).abs(), BigInt::from(p));
                assert_eq!(d.reduce(&a), 0);
                let a2 = ideal_generator(&f, &d, 2).unwrap();
                assert_eq!(f.norm(&a2).abs(), BigInt::from(p * p));
                assert_eq!(d.reduce(&a2), 0);
            }
        }
    }

    #[test]
    fn ideal_lattice_has_index_p_power() {
        let f = CyclicField::build(FieldParams::new(5, 11, 1).unwrap()).unwrap();
        let d = &primes_above(&f, 23).unwrap()[0];
        for h in 1..=3 {
            let (q, basis) = ideal_power_basis(&f, d, h).unwrap();
            assert_eq!(crate::arith::matrix::det(&basis).abs(), q);
            for v in &basis {
                let x = FieldElement::new(v.clone());
                assert_eq!(d.reduce(&x), 0);
            }
        }
    }

    #[test]
    fn radius_floor_bounds_trace() {
        assert_eq!(radius_floor(3, &BigInt::from(8)), BigInt::from(15));
    }
}
