//! Certified real-root refinement on dyadic grids.
//!
//! A simple root `theta` of an integer polynomial is tracked as an index `L`
//! with `theta` in the open interval `(L / 2^b, (L + 1) / 2^b)`. Signs of
//! other polynomials at `theta` are certified by exact interval Horner
//! evaluation over that cell, escalating `b` until the enclosure excludes 0.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntPoly;

#[derive(Debug)]
pub struct RealRoot {
    poly: IntPoly,
    /// Finest cell computed so far: (bits, L, sign of poly at L / 2^bits).
    cell: Mutex<(u64, BigInt, i8)>,
}

impl RealRoot {
    /// Isolates the root of `poly` nearest to `approx`. Fails if no dyadic
    /// cell of width at least 2^-52 around `approx` holds exactly one root.
    pub fn isolate(poly: IntPoly, approx: f64) -> Option<RealRoot> {
        for bits in (16u64..=52).step_by(4) {
            let scale = (1u64 << bits) as f64;
            let centre = BigInt::from((approx * scale).floor() as i64);
            // Start from a 4-cell window and shrink to a single cell.
            let lo = &centre - 2;
            let hi = &centre + 2;
            let as_rat = |x: &BigInt| BigRational::new(x.clone(), BigInt::one() << bits as usize);
            if poly.sign_at_dyadic(&lo, bits) == 0 || poly.sign_at_dyadic(&hi, bits) == 0 {
                continue;
            }
            if poly.count_roots_in(&as_rat(&lo), &as_rat(&hi)) != 1 {
                continue;
            }
            let (mut lo, mut hi) = (lo, hi);
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) >> 1usize;
                let s = poly.sign_at_dyadic(&mid, bits);
                if s == 0 {
                    // A rational root; the caller's polynomial is irreducible
                    // of degree >= 2, so this cannot happen there.
                    return None;
                }
                if s == poly.sign_at_dyadic(&lo, bits) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s = poly.sign_at_dyadic(&lo, bits);
            return Some(RealRoot {
                poly,
                cell: Mutex::new((bits, lo, s)),
            });
        }
        None
    }

    /// Cell index at `bits` of precision: the root lies in
    /// `(L / 2^bits, (L + 1) / 2^bits)`.
    pub fn cell(&self, bits: u64) -> BigInt {
        let mut guard = self.cell.lock().expect("root cell lock poisoned");
        while guard.0 < bits {
            let (b, l, s_lo) = (guard.0, guard.1.clone(), guard.2);
            let mid = (&l << 1usize) + 1;
            let s = self.poly.sign_at_dyadic(&mid, b + 1);
            assert!(s != 0, "isolated root is rational");
            *guard = if s == s_lo {
                (b + 1, mid, s_lo)
            } else {
                (b + 1, l << 1usize, s_lo)
            };
        }
        let (b, l, _) = (&guard.0, &guard.1, guard.2);
        // Coarsen: floor division keeps the root inside the wider cell.
        l >> (*b - bits) as usize
    }

    pub fn approx(&self) -> f64 {
        let l = self.cell(64);
        l.to_f64().unwrap_or(f64::NAN) / 2f64.powi(64)
    }

    /// Certified sign of `f(theta)` using cells of `start_bits`,
    /// `2 start_bits`, ... up to `max_bits`. `None` if never certified.
    pub fn sign_of(&self, f: &IntPoly, start_bits: u64, max_bits: u64) -> Option<i8> {
        if f.is_zero() {
            return Some(0);
        }
        let mut bits = start_bits.max(1);
        loop {
            let l = self.cell(bits);
            let (lo, hi) = horner_enclosure(f, &l, bits);
            if lo.is_positive() {
                return Some(1);
            }
            if hi.is_negative() {
                return Some(-1);
            }
            if bits >= max_bits {
                return None;
            }
            bits = (bits * 2).min(max_bits);
        }
    }
}

/// Enclosure of `2^(bits d) f(t)` for `t` in `[L, L+1] / 2^bits`, returned as
/// integer endpoints on that common scale.
fn horner_enclosure(f: &IntPoly, l: &BigInt, bits: u64) -> (BigInt, BigInt) {
    let coeffs = f.coeffs();
    let d = coeffs.len() - 1;
    let (x0, x1) = (l.clone(), l + 1);
    let mut lo = coeffs[d].clone();
    let mut hi = coeffs[d].clone();
    for k in (0..d).rev() {
        let cands = [&lo * &x0, &lo * &x1, &hi * &x0, &hi * &x1];
        let mut new_lo = cands[0].clone();
        let mut new_hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < new_lo {
                new_lo = c.clone();
            }
            if *c > new_hi {
                new_hi = c.clone();
            }
        }
        let add = &coeffs[k] << (bits * (d - k) as u64) as usize;
        lo = new_lo + &add;
        hi = new_hi + add;
    }
    if lo.is_zero() && hi.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_two_cos_two_pi_over_seven() {
        let f = IntPoly::from_i64(&[-1, -2, 1, 1]);
        let theta = 2.0 * (2.0 * std::f64::consts::PI / 7.0).cos();
        let root = RealRoot::isolate(f, theta).unwrap();
        assert!((root.approx() - theta).abs() < 1e-12);
        let l = root.cell(200);
        // cell at 200 bits coarsens to the cell at 64 bits
        assert_eq!(&l >> 136usize, root.cell(64));
    }

    #[test]
    fn certified_signs() {
        let f = IntPoly::from_i64(&[-1, -2, 1, 1]);
        let theta = 2.0 * (2.0 * std::f64::consts::PI / 7.0).cos(); // ~1.247
        let root = RealRoot::isolate(f, theta).unwrap();
        assert_eq!(root.sign_of(&IntPoly::from_i64(&[0, 1]), 64, 4096), Some(1));
        assert_eq!(root.sign_of(&IntPoly::from_i64(&[-5, 4]), 64, 4096), Some(-1));
        // theta^2 - theta - 1/3 > 0 ? 1.555 - 1.247 - 0.333 < 0
        assert_eq!(root.sign_of(&IntPoly::from_i64(&[-1, -3, 3]), 64, 4096), Some(-1));
    }
}
