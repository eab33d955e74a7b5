//! Arithmetic in `O/8O` for an unramified dyadic model of degree `n`.
//!
//! Two constructions share one representation: the reduction of a
//! [`CyclicField`] in its period basis, and a synthetic ring
//! `Z[x]/(8, F)` for an irreducible `F` over `F_2`. Elements are coefficient
//! vectors mod 8 in the ring's own basis.
//!
//! Each ring also fixes an `F_2` basis `b_0..b_{n-1}` of the residue field
//! that is self-dual for the absolute trace, `Tr(b_i b_j) = delta_ij`, along
//! with 0/1 lifts of it. For fields the periods reduce to such a basis; for
//! synthetic rings a self-dual normal basis is found by search. Square-class
//! coordinates are taken in this basis.

use std::fmt;

use rand::Rng;

use crate::arith::gf2::Gf2Poly;
use crate::error::{Error, Result};
use crate::field::{CyclicField, FieldElement, FieldParams};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ring8Element(Vec<u8>);

impl Ring8Element {
    /// Coefficients are reduced mod 8.
    pub fn new(coeffs: Vec<u8>) -> Self {
        Ring8Element(coeffs.into_iter().map(|c| c & 7).collect())
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.0
    }

    /// Bit `i` is coefficient `i` mod 2.
    pub fn mod2_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |m, (i, &c)| m | (((c & 1) as u64) << i))
    }
}

impl fmt::Display for Ring8Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    Field(FieldParams),
    Synthetic(Gf2Poly),
}

#[derive(Clone, Debug)]
pub struct Ring8 {
    n: usize,
    kind: RingKind,
    /// Nonzero entries of `e_i e_j`, flattened by `i * n + j`.
    mult: Vec<Vec<(usize, u8)>>,
    unity: Ring8Element,
    /// Generator of the Galois action as a matrix mod 8 (column `j` is the
    /// image of `e_j`), or a coordinate shift for fields.
    sigma: Vec<Ring8Element>,
    sigma_is_shift: bool,
    /// 0/1 lifts of the self-dual residue basis.
    lifts: Vec<Ring8Element>,
    /// `a_i = parity(coord_rows[i] & x)` for a mod-2 mask `x`.
    coord_rows: Vec<u64>,
    trace_mask: u64,
    frobenius_power: usize,
}

impl Ring8 {
    /// Reduction of the field's ring of integers mod 8 in the period basis.
    pub fn from_field(field: &CyclicField) -> Result<Self> {
        let n = field.degree();
        let table = field.mult_table();
        let mut mult = Vec::with_capacity(n * n);
        for row in table {
            for entry in row {
                mult.push(
                    entry
                        .iter()
                        .enumerate()
                        .map(|(k, &c)| (k, c.rem_euclid(8) as u8))
                        .filter(|&(_, c)| c != 0)
                        .collect(),
                );
            }
        }
        let unity = Ring8Element(vec![7; n]);
        let sigma = (0..n)
            .map(|j| {
                let mut v = vec![0; n];
                v[(j + 1) % n] = 1;
                Ring8Element(v)
            })
            .collect();
        let lifts = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                Ring8Element(v)
            })
            .collect();
        let ring = Ring8 {
            n,
            kind: RingKind::Field(field.params()),
            mult,
            unity,
            sigma,
            sigma_is_shift: true,
            lifts,
            coord_rows: (0..n).map(|i| 1u64 << i).collect(),
            trace_mask: 0,
            frobenius_power: 0,
        };
        ring.finish()
    }

    /// `Z[x]/(8, F)` for `F` irreducible of degree `n` over `F_2`, with the
    /// Galois action given by the lift of Frobenius.
    pub fn synthetic(n: usize, modulus: Gf2Poly) -> Result<Self> {
        if n == 0 || n > 63 || modulus.degree() != Some(n as u32) || !modulus.is_irreducible() {
            return Err(Error::ReduciblePolynomial(n));
        }
        // x^m for m < 2n - 1 in the power basis, using x^n = -sum F_k x^k.
        let low: Vec<u8> = (0..n).map(|k| ((modulus.0 >> k) & 1) as u8).collect();
        let mut powers: Vec<Vec<u8>> = Vec::with_capacity(2 * n - 1);
        for m in 0..2 * n - 1 {
            if m < n {
                let mut v = vec![0u8; n];
                v[m] = 1;
                powers.push(v);
            } else {
                let prev = &powers[m - 1];
                let top = prev[n - 1];
                let mut v = vec![0u8; n];
                for k in 1..n {
                    v[k] = prev[k - 1];
                }
                for k in 0..n {
                    v[k] = (v[k] + 8 - (top * low[k]) % 8) % 8;
                }
                powers.push(v);
            }
        }
        let mut mult = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                mult.push(
                    powers[i + j]
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(k, &c)| (k, c))
                        .collect(),
                );
            }
        }
        let mut unity = vec![0u8; n];
        unity[0] = 1;
        let identity: Vec<Ring8Element> = (0..n)
            .map(|j| {
                let mut v = vec![0; n];
                v[j] = 1;
                Ring8Element(v)
            })
            .collect();
        let mut ring = Ring8 {
            n,
            kind: RingKind::Synthetic(modulus),
            mult,
            unity: Ring8Element(unity),
            sigma: identity.clone(),
            sigma_is_shift: false,
            lifts: identity,
            coord_rows: Vec::new(),
            trace_mask: 0,
            frobenius_power: 1,
        };
        if n > 1 {
            ring.sigma = ring.frobenius_lift(modulus)?;
        }
        ring.trace_mask = ring.compute_trace_mask();
        let basis = ring.self_dual_normal_basis().ok_or_else(|| {
            Error::Consistency(format!("no self-dual normal basis in degree {n}"))
        })?;
        ring.lifts = basis
            .iter()
            .map(|&b| Ring8Element((0..n).map(|k| ((b >> k) & 1) as u8).collect()))
            .collect();
        ring.coord_rows = basis
            .iter()
            .map(|&b| {
                (0..n).fold(0u64, |row, k| {
                    row | ((ring.trace_bit(ring.mul2(1u64 << k, b)) as u64) << k)
                })
            })
            .collect();
        ring.finish()
    }

    /// The smallest irreducible polynomial of degree `n` over `F_2`.
    pub fn default_modulus(n: usize) -> Option<Gf2Poly> {
        if n == 0 || n > 62 {
            return None;
        }
        let lo = 1u64 << n;
        (lo..lo << 1).map(Gf2Poly).find(|p| p.is_irreducible())
    }

    fn finish(mut self) -> Result<Self> {
        self.trace_mask = self.compute_trace_mask();
        let n = self.n;
        let masks: Vec<u64> = self.lifts.iter().map(Ring8Element::mod2_mask).collect();
        for i in 0..n {
            for j in 0..n {
                let t = self.trace_bit(self.mul2(masks[i], masks[j]));
                if t != (i == j) as u8 {
                    return Err(Error::Consistency(format!(
                        "residue basis is not trace-self-dual at ({i}, {j})"
                    )));
                }
            }
        }
        // sigma acts as a power of Frobenius on the residue field
        let probe = masks[0];
        let image = self.galois_apply(&self.lifts[0], 1).mod2_mask();
        let mut x = probe;
        self.frobenius_power = (0..n.max(1))
            .find(|_| {
                let hit = x == image;
                x = self.mul2(x, x);
                hit
            })
            .ok_or_else(|| Error::Consistency("Galois generator is not a Frobenius power".into()))?;
        Ok(self)
    }

    fn frobenius_lift(&self, modulus: Gf2Poly) -> Result<Vec<Ring8Element>> {
        let n = self.n;
        let coeffs: Vec<u8> = (0..=n).map(|k| ((modulus.0 >> k) & 1) as u8).collect();
        let eval = |t: &Ring8Element, c: &[u8]| {
            let mut acc = self.zero();
            for &ck in c.iter().rev() {
                acc = self.add(&self.mul(&acc, t), &self.scale(&self.unity, ck));
            }
            acc
        };
        let deriv: Vec<u8> = (1..=n).map(|k| (coeffs[k] * (k as u8 % 8)) % 8).collect();
        let mut x = self.zero();
        x.0[1] = 1;
        let mut theta = self.mul(&x, &x);
        for _ in 0..3 {
            let fx = eval(&theta, &coeffs);
            let dfx = self.inverse(&eval(&theta, &deriv))?;
            theta = self.sub(&theta, &self.mul(&fx, &dfx));
        }
        if eval(&theta, &coeffs) != self.zero() {
            return Err(Error::Consistency("Frobenius lift did not converge".into()));
        }
        let mut cols = Vec::with_capacity(n);
        let mut p = self.unity.clone();
        for _ in 0..n {
            cols.push(p.clone());
            p = self.mul(&p, &theta);
        }
        Ok(cols)
    }

    fn self_dual_normal_basis(&self) -> Option<Vec<u64>> {
        let n = self.n;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (1..=full).find_map(|beta| {
            let mut orbit = Vec::with_capacity(n);
            let mut x = beta;
            for _ in 0..n {
                orbit.push(x);
                x = self.mul2(x, x);
            }
            let dual = (0..n).all(|i| {
                (0..n).all(|j| self.trace_bit(self.mul2(orbit[i], orbit[j])) == (i == j) as u8)
            });
            dual.then_some(orbit)
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    /// Stable description of the ring and its residue basis.
    pub fn fingerprint(&self) -> String {
        match self.kind {
            RingKind::Field(p) => format!("periods:n={}:ell={}", p.n, p.ell),
            RingKind::Synthetic(m) => format!("synthetic:n={}:modulus={:#x}", self.n, m.0),
        }
    }

    pub fn unity(&self) -> &Ring8Element {
        &self.unity
    }

    pub fn zero(&self) -> Ring8Element {
        Ring8Element(vec![0; self.n])
    }

    /// Element with the given coefficients, reduced mod 8.
    pub fn element(&self, coeffs: &[i64]) -> Ring8Element {
        assert_eq!(coeffs.len(), self.n);
        Ring8Element(coeffs.iter().map(|c| c.rem_euclid(8) as u8).collect())
    }

    pub fn from_int(&self, k: i64) -> Ring8Element {
        self.scale(&self.unity, k.rem_euclid(8) as u8)
    }

    /// Coordinate-wise reduction of a field element.
    pub fn reduce(&self, x: &FieldElement) -> Ring8Element {
        use num_traits::ToPrimitive;
        let eight = num_bigint::BigInt::from(8);
        Ring8Element(
            x.coeffs()
                .iter()
                .map(|c| {
                    let r = ((c % &eight) + &eight) % &eight;
                    r.to_u8().expect("residue fits")
                })
                .collect(),
        )
    }

    pub fn add(&self, x: &Ring8Element, y: &Ring8Element) -> Ring8Element {
        Ring8Element(x.0.iter().zip(&y.0).map(|(a, b)| (a + b) & 7).collect())
    }

    pub fn sub(&self, x: &Ring8Element, y: &Ring8Element) -> Ring8Element {
        Ring8Element(x.0.iter().zip(&y.0).map(|(a, b)| (a + 8 - b) & 7).collect())
    }

    pub fn neg(&self, x: &Ring8Element) -> Ring8Element {
        Ring8Element(x.0.iter().map(|a| (8 - a) & 7).collect())
    }

    pub fn scale(&self, x: &Ring8Element, k: u8) -> Ring8Element {
        Ring8Element(x.0.iter().map(|a| (a * (k & 7)) & 7).collect())
    }

    pub fn mul(&self, x: &Ring8Element, y: &Ring8Element) -> Ring8Element {
        let n = self.n;
        let mut acc = vec![0u32; n];
        for (i, &xi) in x.0.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.0.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let p = (xi * yj) as u32;
                for &(k, c) in &self.mult[i * n + j] {
                    acc[k] += p * c as u32;
                }
            }
        }
        Ring8Element(acc.into_iter().map(|v| (v & 7) as u8).collect())
    }

    pub fn pow(&self, x: &Ring8Element, mut e: u64) -> Ring8Element {
        let mut acc = self.unity.clone();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Product of mod-2 masks in the ring basis.
    pub fn mul2(&self, x: u64, y: u64) -> u64 {
        let n = self.n;
        let mut out = 0u64;
        for i in 0..n {
            if (x >> i) & 1 == 0 {
                continue;
            }
            for j in 0..n {
                if (y >> j) & 1 == 0 {
                    continue;
                }
                for &(k, c) in &self.mult[i * n + j] {
                    if c & 1 == 1 {
                        out ^= 1 << k;
                    }
                }
            }
        }
        out
    }

    fn unity_mask(&self) -> u64 {
        self.unity.mod2_mask()
    }

    /// Absolute trace `x + x^2 + ... + x^(2^(n-1))` of a mod-2 element, by
    /// iterated squaring.
    pub fn residue_trace(&self, x: u64) -> u8 {
        let mut t = x;
        let mut s = x;
        for _ in 1..self.n {
            t = self.mul2(t, t);
            s ^= t;
        }
        debug_assert!(s == 0 || s == self.unity_mask(), "trace left the prime field");
        (s != 0) as u8
    }

    fn compute_trace_mask(&self) -> u64 {
        (0..self.n).fold(0, |m, k| m | ((self.residue_trace(1 << k) as u64) << k))
    }

    /// Trace through the precomputed linear functional.
    pub fn trace_bit(&self, x: u64) -> u8 {
        ((x & self.trace_mask).count_ones() & 1) as u8
    }

    pub fn is_unit(&self, x: &Ring8Element) -> bool {
        x.mod2_mask() != 0
    }

    pub fn units_count(&self) -> u64 {
        ((1u64 << self.n) - 1) << (2 * self.n)
    }

    pub fn inverse(&self, u: &Ring8Element) -> Result<Ring8Element> {
        if !self.is_unit(u) {
            return Err(Error::NotAUnit);
        }
        Ok(self.pow(u, self.units_count() - 1))
    }

    /// `u^(2^n - 1)`: congruent to 1 mod 2 and in the square class of `u`.
    pub fn teichmuller_normalize(&self, u: &Ring8Element) -> Result<Ring8Element> {
        if !self.is_unit(u) {
            return Err(Error::NotAUnit);
        }
        Ok(self.pow(u, (1u64 << self.n) - 1))
    }

    /// `sigma^j(x)`.
    pub fn galois_apply(&self, x: &Ring8Element, j: i64) -> Ring8Element {
        let n = self.n;
        let j = j.rem_euclid(n as i64) as usize;
        if self.sigma_is_shift {
            let mut out = vec![0; n];
            for (i, &c) in x.0.iter().enumerate() {
                out[(i + j) % n] = c;
            }
            return Ring8Element(out);
        }
        let mut cur = x.clone();
        for _ in 0..j {
            let mut next = vec![0u32; n];
            for (i, &c) in cur.0.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, &s) in self.sigma[i].0.iter().enumerate() {
                    next[k] += c as u32 * s as u32;
                }
            }
            cur = Ring8Element(next.into_iter().map(|v| (v & 7) as u8).collect());
        }
        cur
    }

    /// `t` with `sigma(x) = x^(2^t)` on the residue field.
    pub fn frobenius_power(&self) -> usize {
        self.frobenius_power
    }

    /// Coordinates in the self-dual residue basis of a mod-2 mask.
    pub fn residue_coords(&self, x: u64) -> u64 {
        self.coord_rows
            .iter()
            .enumerate()
            .fold(0, |a, (i, &row)| a | ((((row & x).count_ones() & 1) as u64) << i))
    }

    /// `sum a_i b~_i` with the 0/1 lifts of the residue basis.
    pub fn lift_bits(&self, a: u64) -> Ring8Element {
        let mut v = vec![0u8; self.n];
        for (i, l) in self.lifts.iter().enumerate() {
            if (a >> i) & 1 == 1 {
                for (vk, lk) in v.iter_mut().zip(&l.0) {
                    *vk = (*vk + lk) & 7;
                }
            }
        }
        Ring8Element(v)
    }

    /// The canonical unit `1 + 2 * lift(a)`.
    pub fn canonical_unit(&self, a: u64) -> Ring8Element {
        self.add(&self.unity, &self.scale(&self.lift_bits(a), 2))
    }

    /// `1 + 4 b~_0`; since `Tr(b_0) = 1` this is the non-square 1-unit that
    /// is trivial mod 4.
    pub fn delta(&self) -> Ring8Element {
        self.add(&self.unity, &self.scale(&self.lift_bits(1), 4))
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Ring8Element {
        loop {
            let x = Ring8Element((0..self.n).map(|_| rng.gen_range(0..8u8)).collect());
            if self.is_unit(&x) {
                return x;
            }
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Ring8Element {
        Ring8Element((0..self.n).map(|_| rng.gen_range(0..8u8)).collect())
    }

    /// Every unit, in lexicographic order of coefficients. Only sensible for
    /// small `n`.
    pub fn all_units(&self) -> Vec<Ring8Element> {
        assert!(self.n <= 7, "unit enumeration is for small degrees");
        let total = 1u64 << (3 * self.n);
        (0..total)
            .map(|code| Ring8Element((0..self.n).map(|k| ((code >> (3 * k)) & 7) as u8).collect()))
            .filter(|x| self.is_unit(x))
            .collect()
    }
}
