//! Splitting of rational primes and the degree-one primes above them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::modular::{inv_mod, is_prime, pow_mod, roots_mod_p};
use crate::error::{Error, Result};
use crate::field::{CyclicField, FieldElement, FieldParams};

/// Inertia degree of `p`: 1 if `p` is an `n`-th power residue mod `ell`,
/// otherwise `n`.
pub fn frobenius_degree(params: &FieldParams, p: u64) -> Result<u64> {
    if p == 2 || p == params.ell || !is_prime(p) {
        return Err(Error::BadPrime(p));
    }
    Ok(if pow_mod(p % params.ell, params.period_length(), params.ell) == 1 {
        1
    } else {
        params.n
    })
}

/// A prime of degree one above `p`, given by a root `r` of the period
/// polynomial mod `p`; reduction sends `eta_i` to `images[i] = P_i(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeDescriptor {
    pub p: u64,
    pub root: u64,
    pub images: Vec<u64>,
}

pub(crate) fn mod_u64(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64")
}

impl PrimeDescriptor {
    /// `x` mod this prime.
    pub fn reduce(&self, x: &FieldElement) -> u64 {
        self.reduce_conjugate(x, 0)
    }

    /// `x` mod `sigma^j` of this prime, which sends `eta_i` to
    /// `images[i - j]`.
    pub fn reduce_conjugate(&self, x: &FieldElement, j: usize) -> u64 {
        let n = self.images.len();
        let p = self.p as u128;
        let mut acc: u128 = 0;
        for (i, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let img = self.images[(i + n - j % n) % n] as u128;
            acc = (acc + mod_u64(c, self.p) as u128 * img) % p;
        }
        acc as u64
    }
}

/// The `n` primes above a split `p`, ordered by root.
pub fn primes_above(f: &CyclicField, p: u64) -> Result<Vec<PrimeDescriptor>> {
    if frobenius_degree(&f.params(), p)? != 1 {
        return Err(Error::BadPrime(p));
    }
    let den = mod_u64(f.interp_denominator(), p);
    let den_inv = inv_mod(den, p).ok_or(Error::DenominatorClash(p))?;
    let minpoly: Vec<u64> = f
        .period_minpoly()
        .coeffs()
        .iter()
        .map(|c| mod_u64(c, p))
        .collect();
    let roots = roots_mod_p(&minpoly, p);
    let n = f.degree();
    if roots.len() != n {
        return Err(Error::Consistency(format!(
            "split prime {p} gave {} roots of the period polynomial",
            roots.len()
        )));
    }
    let polys: Vec<Vec<u64>> = f
        .interp_scaled()
        .iter()
        .map(|q| q.coeffs().iter().map(|c| mod_u64(c, p)).collect())
        .collect();
    let out = roots
        .into_iter()
        .map(|r| {
            let images: Vec<u64> = polys
                .iter()
                .map(|q| {
                    let v = crate::arith::modular::eval_mod(q, r, p);
                    crate::arith::modular::mul_mod(v, den_inv, p)
                })
                .collect();
            PrimeDescriptor { p, root: r, images }
        })
        .collect::<Vec<_>>();
    for d in &out {
        let total = d.images.iter().fold(0u64, |s, &c| (s + c) % p);
        if total != p - 1 {
            return Err(Error::Consistency(format!(
                "periods do not sum to -1 modulo a prime above {p}"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::modular::mul_mod;

    fn k37() -> CyclicField {
        CyclicField::build(FieldParams::new(3, 7, 1).unwrap()).unwrap()
    }

    #[test]
    fn inertia_degrees() {
        let f = k37();
        assert_eq!(frobenius_degree(&f.params(), 13).unwrap(), 1);
        assert_eq!(frobenius_degree(&f.params(), 3).unwrap(), 3);
        assert!(matches!(frobenius_degree(&f.params(), 7), Err(Error::BadPrime(7))));
        assert!(matches!(frobenius_degree(&f.params(), 2), Err(Error::BadPrime(2))));
    }

    #[test]
    fn roots_and_vieta() {
        let f = k37();
        let above = primes_above(&f, 13).unwrap();
        assert_eq!(above.len(), 3);
        let s = above.iter().fold(0, |s, d| (s + d.root) % 13);
        assert_eq!(s, 12);
        let above = primes_above(&f, 29).unwrap();
        let prod = above.iter().fold(1, |acc, d| mul_mod(acc, d.root, 29));
        assert_eq!(prod, 1);
    }

    #[test]
    fn reduction_is_a_ring_map() {
        for (n, ell, p) in [(3, 7, 13u64), (5, 11, 23), (7, 43, 173)] {
            let f = CyclicField::build(FieldParams::new(n, ell, 1).unwrap()).unwrap();
            let n = n as usize;
            for d in primes_above(&f, p).unwrap() {
                assert_eq!(d.images[0], d.root);
                for i in 0..n {
                    for j in 0..n {
                        let prod = mul_mod(d.images[i], d.images[j], p);
                        let e = f.mul(&f.basis(i), &f.basis(j));
                        assert_eq!(prod, d.reduce(&e));
                    }
                }
                // conjugate primes are again ring maps
                let x = FieldElement::from_i64(&(0..n as i64).map(|k| 3 * k - 4).collect::<Vec<_>>());
                let y = f.galois_apply(&x, 2);
                assert_eq!(
                    d.reduce_conjugate(&f.mul(&x, &y), 1),
                    mul_mod(d.reduce_conjugate(&x, 1), d.reduce_conjugate(&y, 1), p)
                );
                // reducing sigma^j(x) at sigma^j of the prime is reducing x
                assert_eq!(d.reduce_conjugate(&y, 2), d.reduce(&x));
            }
        }
    }
}
