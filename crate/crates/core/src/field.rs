//! Cyclic fields of odd prime degree and prime conductor, modelled on the
//! Gaussian period basis.
//!
//! For a prime `ell` and `n | ell - 1`, let `H` be the subgroup of `n`-th
//! power residues mod `ell` and `g` the smallest primitive root. The periods
//! `eta_i = sum_{h in H} zeta^(g^i h)` form an integral basis of the degree-`n`
//! subfield of `Q(zeta_ell)`, the products `eta_i eta_j` have integer
//! coordinates, and the generator of the Galois group acts by the index shift
//! `eta_i -> eta_{i+1}`.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::interval::RealRoot;
use crate::arith::matrix::{self, IntMatrix};
use crate::arith::modular::{is_prime, pow_mod, primitive_root};
use crate::arith::poly::{sign, IntPoly, RatPoly};
use crate::error::{Error, ParamCheck, Result};

/// Degree, conductor and the assumed (odd) class number of the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub n: u64,
    pub ell: u64,
    pub h: u64,
}

impl FieldParams {
    pub fn new(n: u64, ell: u64, h: u64) -> Result<Self> {
        let params = FieldParams { n, ell, h };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 3 || !is_prime(self.n) {
            return Err(Error::Param(ParamCheck::DegreeNotOddPrime));
        }
        if self.ell < 3 || !is_prime(self.ell) {
            return Err(Error::Param(ParamCheck::ConductorNotOddPrime));
        }
        if !(self.ell - 1).is_multiple_of(self.n) {
            return Err(Error::Param(ParamCheck::DegreeDoesNotDivide));
        }
        if pow_mod(2, (self.ell - 1) / self.n, self.ell) == 1 {
            return Err(Error::Param(ParamCheck::TwoNotInert));
        }
        if self.h == 0 || self.h.is_multiple_of(2) {
            return Err(Error::Param(ParamCheck::ClassNumberEven));
        }
        Ok(())
    }

    /// Number of roots of unity in each period, `(ell - 1) / n`.
    pub fn period_length(&self) -> u64 {
        (self.ell - 1) / self.n
    }
}

/// Element of the ring of integers, as coordinates in the period basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(Vec<BigInt>);

impl FieldElement {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        FieldElement(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        FieldElement(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Precision schedule for certified embedding signs, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u64,
    pub max_bits: u64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 64,
            max_bits: 4096,
        }
    }
}

impl Precision {
    /// Default schedule with the ceiling taken from `SPINLAB_MAX_PRECISION`
    /// when set.
    pub fn from_env() -> Self {
        let mut p = Precision::default();
        if let Some(bits) = std::env::var("SPINLAB_MAX_PRECISION")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            p.max_bits = bits.max(p.start_bits);
        }
        p
    }
}

#[derive(Debug)]
pub struct CyclicField {
    params: FieldParams,
    primitive_root: u64,
    /// Period index of each nonzero residue mod `ell`; slot 0 unused.
    coset_of: Vec<u32>,
    mult_table: Vec<Vec<Vec<i64>>>,
    /// Nonzero entries of `mult_table[i][j]`, flattened by `i * n + j`.
    sparse: Vec<Vec<(usize, i64)>>,
    unity: FieldElement,
    period_minpoly: IntPoly,
    interp_polys: Vec<RatPoly>,
    interp_denominator: BigInt,
    /// `interp_denominator * interp_polys[i]`.
    interp_scaled: Vec<IntPoly>,
    base_root: OnceLock<Option<RealRoot>>,
}

impl CyclicField {
    pub fn build(params: FieldParams) -> Result<Self> {
        params.check()?;
        let n = params.n as usize;
        let ell = params.ell;
        let f = params.period_length();
        let g = primitive_root(ell);

        let mut coset_of = vec![u32::MAX; ell as usize];
        let mut x = 1u64;
        for k in 0..ell - 1 {
            coset_of[x as usize] = (k % params.n) as u32;
            x = x * g % ell;
        }
        let subgroup: Vec<u64> = (1..ell).filter(|&r| coset_of[r as usize] == 0).collect();
        debug_assert_eq!(subgroup.len() as u64, f);

        // eta_i eta_j = sum_{h in H} [eta_{class(g^i + g^j h)} or |H| if zero]
        let mut mult_table = vec![vec![vec![0i64; n]; n]; n];
        let gi: Vec<u64> = (0..n as u64).map(|i| pow_mod(g, i, ell)).collect();
        for i in 0..n {
            for j in 0..n {
                let entry = &mut mult_table[i][j];
                for &h in &subgroup {
                    let s = (gi[i] + gi[j] * h) % ell;
                    if s == 0 {
                        // the constant |H| = -|H| * sum_k eta_k
                        for e in entry.iter_mut() {
                            *e -= f as i64;
                        }
                    } else {
                        entry[coset_of[s as usize] as usize] += 1;
                    }
                }
            }
        }
        let sparse = mult_table
            .iter()
            .flat_map(|row| {
                row.iter().map(|entry| {
                    entry
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(k, &c)| (k, c))
                        .collect::<Vec<_>>()
                })
            })
            .collect();

        let mut field = CyclicField {
            params,
            primitive_root: g,
            coset_of,
            mult_table,
            sparse,
            unity: FieldElement(vec![BigInt::from(-1); n]),
            period_minpoly: IntPoly::new(Vec::new()),
            interp_polys: Vec::new(),
            interp_denominator: BigInt::one(),
            interp_scaled: Vec::new(),
            base_root: OnceLock::new(),
        };

        let eta0 = field.basis(0);
        field.period_minpoly = field.char_poly(&eta0);

        // Rows are eta_0^k in period coordinates; the inverse expresses each
        // eta_i in powers of eta_0.
        let mut powers = Vec::with_capacity(n);
        let mut cur = field.unity.clone();
        for _ in 0..n {
            powers.push(
                cur.0
                    .iter()
                    .map(|c| BigRational::from_integer(c.clone()))
                    .collect::<Vec<_>>(),
            );
            cur = field.mul(&cur, &eta0);
        }
        let inv = matrix::rational_inverse(&powers).ok_or_else(|| {
            Error::Consistency("eta_0 does not generate the field".into())
        })?;
        // e_i = sum_k inv[i][k] * (eta_0^k)
        field.interp_polys = inv.into_iter().map(RatPoly::new).collect();
        field.interp_denominator = field
            .interp_polys
            .iter()
            .fold(BigInt::one(), |acc, p| num_integer::lcm(acc, p.denominator_lcm()));
        field.interp_scaled = field
            .interp_polys
            .iter()
            .map(|p| p.scaled_to_int(&field.interp_denominator))
            .collect();
        Ok(field)
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn degree(&self) -> usize {
        self.params.n as usize
    }

    pub fn conductor(&self) -> u64 {
        self.params.ell
    }

    pub fn primitive_root(&self) -> u64 {
        self.primitive_root
    }

    /// Period index of a residue not divisible by `ell`.
    pub fn coset_of(&self, r: u64) -> Option<usize> {
        let c = self.coset_of[(r % self.params.ell) as usize];
        (c != u32::MAX).then_some(c as usize)
    }

    /// The residues in period `i`, ascending.
    pub fn coset_members(&self, i: usize) -> Vec<u64> {
        (1..self.params.ell)
            .filter(|&r| self.coset_of[r as usize] as usize == i)
            .collect()
    }

    /// `m[i][j][k]`: coefficient of `eta_k` in `eta_i eta_j`.
    pub fn mult_table(&self) -> &[Vec<Vec<i64>>] {
        &self.mult_table
    }

    pub fn period_minpoly(&self) -> &IntPoly {
        &self.period_minpoly
    }

    /// `P_i` with `eta_i = P_i(eta_0)`.
    pub fn interp_polys(&self) -> &[RatPoly] {
        &self.interp_polys
    }

    /// Least common denominator of the interpolation polynomials.
    pub fn interp_denominator(&self) -> &BigInt {
        &self.interp_denominator
    }

    /// `interp_denominator() * P_i`, integral.
    pub fn interp_scaled(&self) -> &[IntPoly] {
        &self.interp_scaled
    }

    pub fn unity(&self) -> &FieldElement {
        &self.unity
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![BigInt::zero(); self.degree()])
    }

    pub fn basis(&self, i: usize) -> FieldElement {
        let mut v = self.zero();
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_int(&self, k: &BigInt) -> FieldElement {
        self.scale(&self.unity, k)
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement(x.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, x: &FieldElement, k: &BigInt) -> FieldElement {
        FieldElement(x.0.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let n = self.degree();
        let mut out = vec![BigInt::zero(); n];
        for (i, xi) in x.0.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.0.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let prod = xi * yj;
                for &(k, c) in &self.sparse[i * n + j] {
                    out[k] += &prod * c;
                }
            }
        }
        FieldElement(out)
    }

    pub fn pow(&self, x: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.unity.clone();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `sigma^j(x)` for the generator `sigma: eta_i -> eta_{i+1}`.
    pub fn galois_apply(&self, x: &FieldElement, j: i64) -> FieldElement {
        let n = self.degree() as i64;
        let shift = j.rem_euclid(n) as usize;
        let mut out = self.zero();
        for (i, c) in x.0.iter().enumerate() {
            out.0[(i + shift) % n as usize] = c.clone();
        }
        out
    }

    /// Matrix of multiplication by `x`; column `j` holds `x * eta_j`.
    pub fn multiplication_matrix(&self, x: &FieldElement) -> IntMatrix {
        let n = self.degree();
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for j in 0..n {
            let col = self.mul(x, &self.basis(j));
            for (k, c) in col.0.into_iter().enumerate() {
                m[k][j] = c;
            }
        }
        m
    }

    /// Characteristic polynomial of multiplication by `x`.
    pub fn char_poly(&self, x: &FieldElement) -> IntPoly {
        matrix::char_poly(&self.multiplication_matrix(x))
    }

    pub fn norm(&self, x: &FieldElement) -> BigInt {
        matrix::det(&self.multiplication_matrix(x))
    }

    /// `Tr(x)`; every period has trace -1.
    pub fn trace(&self, x: &FieldElement) -> BigInt {
        -x.0.iter().sum::<BigInt>()
    }

    /// The trace form `Tr(x y) = ell <x, y> - f (sum x)(sum y)`.
    pub fn trace_form(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let dot: BigInt = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sx: BigInt = x.iter().sum();
        let sy: BigInt = y.iter().sum();
        dot * BigInt::from(self.params.ell) - sx * sy * BigInt::from(self.params.period_length())
    }

    /// Exact total positivity: the characteristic polynomial is real-rooted,
    /// so every root is positive iff its coefficients strictly alternate.
    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let cp = self.char_poly(x);
        let n = self.degree();
        Ok((0..=n).all(|k| {
            let want = if (n - k).is_multiple_of(2) { 1 } else { -1 };
            sign(&cp.coeff(k)) == want
        }))
    }

    /// Value of `eta_0` under `zeta -> exp(2 pi i / ell)`, in floating point.
    pub fn base_period_approx(&self) -> f64 {
        let ell = self.params.ell as f64;
        self.coset_members(0)
            .iter()
            .map(|&h| (2.0 * std::f64::consts::PI * h as f64 / ell).cos())
            .sum()
    }

    fn base_root(&self) -> Result<&RealRoot> {
        self.base_root
            .get_or_init(|| RealRoot::isolate(self.period_minpoly.clone(), self.base_period_approx()))
            .as_ref()
            .ok_or_else(|| Error::Consistency("could not isolate the base period".into()))
    }

    /// Signs of `x` under the embeddings `t = 0..n`, where embedding `t`
    /// sends `eta_i` to the base value of `eta_{i+t}`.
    pub fn signature(&self, x: &FieldElement, precision: Precision) -> Result<Vec<i8>> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let n = self.degree();
        let root = self.base_root()?;
        (0..n)
            .map(|t| {
                let mut acc = vec![BigInt::zero(); n];
                for (i, xi) in x.0.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    for (k, c) in self.interp_scaled[(i + t) % n].coeffs().iter().enumerate() {
                        acc[k] += xi * c;
                    }
                }
                let poly = IntPoly::new(acc);
                root.sign_of(&poly, precision.start_bits, precision.max_bits)
                    .ok_or(Error::PrecisionExhausted {
                        bits: precision.max_bits,
                    })
            })
            .collect()
    }

    /// Number of distinct real roots of the period polynomial.
    pub fn real_root_count(&self) -> usize {
        self.period_minpoly.count_real_roots()
    }

    /// `x` as a rational polynomial in `eta_0`.
    pub fn as_poly_in_eta0(&self, x: &FieldElement) -> RatPoly {
        let n = self.degree();
        let mut acc = vec![BigRational::zero(); n];
        for (i, xi) in x.0.iter().enumerate() {
            let xi = BigRational::from_integer(xi.clone());
            for (k, c) in self.interp_polys[i].coeffs().iter().enumerate() {
                acc[k] += &xi * c;
            }
        }
        RatPoly::new(acc)
    }

    pub fn is_unit(&self, x: &FieldElement) -> bool {
        self.norm(x).abs().is_one()
    }
}
