//! Dense univariate polynomials over the integers and rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Integer polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Sign of `self(num / 2^bits)`, exact.
    pub fn sign_at_dyadic(&self, num: &BigInt, bits: u64) -> i8 {
        // Horner on the homogenised form 2^(bits d) f(num / 2^bits).
        let d = self.degree() as u64;
        let mut acc = BigInt::zero();
        for (k, c) in self.0.iter().enumerate().rev() {
            acc = acc * num + (c << (bits * (d - k as u64)) as usize);
        }
        sign(&acc)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn to_rational(&self) -> RatPoly {
        RatPoly::new(
            self.0
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Number of distinct real roots, by a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        let seq = sturm_sequence(&self.to_rational());
        let at = |neg: bool| -> Vec<i8> {
            seq.iter()
                .map(|p| {
                    let lead = p.0.last().map(rat_sign).unwrap_or(0);
                    if neg && p.degree() % 2 == 1 {
                        -lead
                    } else {
                        lead
                    }
                })
                .collect()
        };
        sign_changes(&at(true)) - sign_changes(&at(false))
    }

    /// Number of distinct roots in the half-open interval `(lo, hi]`.
    pub fn count_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let seq = sturm_sequence(&self.to_rational());
        let at = |x: &BigRational| -> Vec<i8> {
            seq.iter().map(|p| rat_sign(&p.eval(x))).collect()
        };
        sign_changes(&at(lo)).saturating_sub(sign_changes(&at(hi)))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = k == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Rational polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// `scale * self`, which must have integer coefficients.
    pub fn scaled_to_int(&self, scale: &BigInt) -> IntPoly {
        IntPoly::new(
            self.0
                .iter()
                .map(|c| {
                    let v = c * BigRational::from_integer(scale.clone());
                    assert!(v.is_integer(), "scale does not clear denominators");
                    v.to_integer()
                })
                .collect(),
        )
    }

    fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn rem(&self, d: &RatPoly) -> RatPoly {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0.last().expect("division by zero polynomial").clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let q = &r[top] / &lead;
            for (i, c) in d.0.iter().enumerate() {
                let idx = top - dd + i;
                r[idx] = &r[idx] - &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly::new(r)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn sturm_sequence(p: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(RatPoly::new(r.0.into_iter().map(|c| -c).collect()));
    }
    seq
}

fn sign_changes(signs: &[i8]) -> usize {
    let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn sign(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn rat_sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Parses an exact rational written as `a` or `a/b`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_period_polynomial() {
        let f = IntPoly::from_i64(&[-1, -2, 1, 1]);
        assert_eq!(f.to_string(), "x^3 + x^2 - 2*x - 1");
        assert_eq!(IntPoly::from_i64(&[0, -1]).to_string(), "-x");
        assert_eq!(IntPoly::from_i64(&[]).to_string(), "0");
    }

    #[test]
    fn sturm_counts() {
        let f = IntPoly::from_i64(&[-1, -2, 1, 1]);
        assert_eq!(f.count_real_roots(), 3);
        // x^2 + 1 has none, (x-1)^2 (x+2) has two distinct.
        assert_eq!(IntPoly::from_i64(&[1, 0, 1]).count_real_roots(), 0);
        assert_eq!(IntPoly::from_i64(&[2, -3, 0, 1]).count_real_roots(), 2);
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        // roots of the cubic are about -1.80, -0.445, 1.247
        assert_eq!(f.count_roots_in(&r(0, 1), &r(2, 1)), 1);
        assert_eq!(f.count_roots_in(&r(-2, 1), &r(0, 1)), 2);
    }

    #[test]
    fn dyadic_sign() {
        let f = IntPoly::from_i64(&[-1, -2, 1, 1]);
        // f(1) = -1, f(3/2) = 0.875
        assert_eq!(f.sign_at_dyadic(&BigInt::from(2), 1), -1);
        assert_eq!(f.sign_at_dyadic(&BigInt::from(3), 1), 1);
        assert_eq!(f.sign_at_dyadic(&BigInt::from(-4), 1), -1);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6"), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("7"), Some(BigRational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
    }
}
