//! Dyadic Hilbert symbols of units in the unramified extension of `Q_2`.
//!
//! Three routes are provided: a brute-force solvability oracle for the conic
//! `u x^2 + v y^2 = z^2` mod 8, the bilinear form on mod-8 square-class
//! coordinates obtained from that oracle, and the closed-form trace pairing.
//! The closed form is only used for degrees beyond the oracle's reach after
//! it has been checked against the oracle (see [`formula_gate`]).

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gf2::Gf2Poly;
use crate::error::{Error, Result};
use crate::residue::{Ring8, Ring8Element};
use crate::square_classes::a_part;

/// Largest degree handled by the conic oracle.
pub const MAX_ORACLE_DEGREE: usize = 7;

/// Coordinates of a unit in `U / U^2` mod 8: the `M4` part `a` and the
/// unramified bit `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitSquareClass8 {
    pub a: u64,
    pub eps: u8,
}

impl UnitSquareClass8 {
    /// As an `(n + 1)`-bit vector with `eps` in bit `n`.
    pub fn packed(self, n: usize) -> u64 {
        self.a | ((self.eps as u64) << n)
    }

    pub fn is_square(self) -> bool {
        self.a == 0 && self.eps == 0
    }
}

/// Coordinates of a unit congruent to 1 mod 2. Skipping the normalization
/// is harmless: for such `w`, `w^(2^n - 1)` is `w^-1` mod 8.
pub fn coords8_one_unit(r: &Ring8, w: &Ring8Element) -> UnitSquareClass8 {
    let a = a_part(r, w);
    // w = R(a) (1 + 4c) = R(a) + 4c mod 8
    let d = r.sub(w, &r.canonical_unit(a));
    let c = d
        .coeffs()
        .iter()
        .enumerate()
        .fold(0u64, |m, (k, &x)| m | ((((x >> 2) & 1) as u64) << k));
    UnitSquareClass8 {
        a,
        eps: r.trace_bit(c),
    }
}

pub fn coords8(r: &Ring8, u: &Ring8Element) -> Result<UnitSquareClass8> {
    if !r.is_unit(u) {
        return Err(Error::NotAUnit);
    }
    if u.mod2_mask() == r.unity().mod2_mask() {
        return Ok(coords8_one_unit(r, u));
    }
    let w = r.teichmuller_normalize(u)?;
    Ok(coords8_one_unit(r, &w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Oracle,
    Formula,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Oracle => "oracle",
            Provenance::Formula => "formula",
        })
    }
}

/// Symmetric `(n + 1) x (n + 1)` matrix over `F_2` on the basis
/// `{1 + 2 b~_i} + {Delta}`; bit `j` of `rows[i]` is entry `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub n: usize,
    pub rows: Vec<u64>,
    pub provenance: Provenance,
}

impl GramMatrix {
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        ((self.rows[i] >> j) & 1) as u8
    }

    pub fn is_symmetric(&self) -> bool {
        (0..=self.n).all(|i| (0..=self.n).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// `x^T G y` over `F_2` for packed `(n + 1)`-bit vectors.
    pub fn pair(&self, x: u64, y: u64) -> u8 {
        let mut acc = 0u32;
        let mut bits = x;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= (self.rows[i] & y).count_ones();
            bits &= bits - 1;
        }
        (acc & 1) as u8
    }

    pub fn to_rows_of_bits(&self) -> Vec<Vec<u8>> {
        (0..=self.n)
            .map(|i| (0..=self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Entries agree, ignoring provenance.
    pub fn same_entries(&self, other: &GramMatrix) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

fn sign_of_bit(b: u8) -> i8 {
    if b == 0 {
        1
    } else {
        -1
    }
}

/// `(u, v)_2` through the coordinates and a Gram matrix.
pub fn symbol(r: &Ring8, u: &Ring8Element, v: &Ring8Element, g: &GramMatrix) -> Result<i8> {
    let n = r.degree();
    let x = coords8(r, u)?.packed(n);
    let y = coords8(r, v)?.packed(n);
    Ok(sign_of_bit(g.pair(x, y)))
}

/// The trace pairing `Tr(b_i b_j)` with the `Delta` row and column zero.
pub fn gram_from_formula(r: &Ring8) -> GramMatrix {
    let n = r.degree();
    let lifts: Vec<u64> = (0..n).map(|i| r.lift_bits(1 << i).mod2_mask()).collect();
    let rows = (0..=n)
        .map(|i| {
            if i == n {
                return 0;
            }
            (0..n).fold(0u64, |row, j| {
                row | ((r.trace_bit(r.mul2(lifts[i], lifts[j])) as u64) << j)
            })
        })
        .collect();
    GramMatrix {
        n,
        rows,
        provenance: Provenance::Formula,
    }
}

/// Packs mod-8 elements into 4-bit lanes so that lane-wise subtraction is a
/// single word operation, and indexes membership bitmaps with 3-bit lanes.
struct Lanes {
    guard: u32,
    mask: u32,
    compress: [u32; 256],
}

impl Lanes {
    fn new(n: usize) -> Self {
        let guard = (0..n).fold(0u32, |g, k| g | (8 << (4 * k)));
        let mask = (0..n).fold(0u32, |m, k| m | (7 << (4 * k)));
        let mut compress = [0u32; 256];
        for (b, slot) in compress.iter_mut().enumerate() {
            *slot = ((b & 7) | (((b >> 4) & 7) << 3)) as u32;
        }
        Lanes {
            guard,
            mask,
            compress,
        }
    }

    fn pack(&self, x: &Ring8Element) -> u32 {
        x.coeffs()
            .iter()
            .enumerate()
            .fold(0, |p, (k, &c)| p | ((c as u32) << (4 * k)))
    }

    #[inline]
    fn sub_index(&self, z: u32, w: u32) -> usize {
        let d = ((z | self.guard) - w) & self.mask;
        (self.compress[(d & 0xff) as usize]
            | (self.compress[((d >> 8) & 0xff) as usize] << 6)
            | (self.compress[((d >> 16) & 0xff) as usize] << 12)
            | (self.compress[(d >> 24) as usize] << 18)) as usize
    }

    fn index(&self, x: u32) -> usize {
        self.sub_index(x, 0)
    }
}

struct Bitmap(Vec<u64>);

impl Bitmap {
    fn new(bits: usize) -> Self {
        Bitmap(vec![0; bits.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        (self.0[i >> 6] >> (i & 63)) & 1 == 1
    }
}

/// Decides `(u, v)_2` by searching for a primitive solution of
/// `u x^2 + v y^2 = z^2` mod 8. A primitive solution mod 8 lifts to `O_2`
/// by Hensel's lemma, since the partial derivative in a unit variable has
/// valuation exactly 1.
pub struct ConicOracle<'a> {
    ring: &'a Ring8,
    lanes: Lanes,
    squares: Vec<Ring8Element>,
    unit_squares: Vec<Ring8Element>,
    packed_squares: Vec<u32>,
    packed_unit_squares: Vec<u32>,
}

impl<'a> ConicOracle<'a> {
    pub fn new(ring: &'a Ring8) -> Result<Self> {
        let n = ring.degree();
        if n > MAX_ORACLE_DEGREE {
            return Err(Error::DegreeTooLarge {
                n,
                max: MAX_ORACLE_DEGREE,
            });
        }
        // Every square mod 8 is (l + 2m)^2 with l, m having 0/1 coefficients.
        let lifts: Vec<Ring8Element> = (0..1u64 << n)
            .map(|b| {
                Ring8Element::new((0..n).map(|k| ((b >> k) & 1) as u8).collect())
            })
            .collect();
        let mut squares = std::collections::BTreeSet::new();
        let mut unit_squares = std::collections::BTreeSet::new();
        for l in &lifts {
            for m in &lifts {
                let s = ring.add(l, &ring.scale(m, 2));
                let sq = ring.mul(&s, &s);
                if ring.is_unit(l) {
                    unit_squares.insert(sq.clone());
                }
                squares.insert(sq);
            }
        }
        let lanes = Lanes::new(n);
        let squares: Vec<Ring8Element> = squares.into_iter().collect();
        let unit_squares: Vec<Ring8Element> = unit_squares.into_iter().collect();
        let packed_squares = squares.iter().map(|s| lanes.pack(s)).collect();
        let packed_unit_squares = unit_squares.iter().map(|s| lanes.pack(s)).collect();
        Ok(ConicOracle {
            ring,
            lanes,
            squares,
            unit_squares,
            packed_squares,
            packed_unit_squares,
        })
    }

    pub fn square_count(&self) -> (usize, usize) {
        (self.squares.len(), self.unit_squares.len())
    }

    fn table(&self, v: &Ring8Element, ys: &[Ring8Element]) -> Bitmap {
        let mut t = Bitmap::new(1 << (3 * self.ring.degree()));
        for y in ys {
            t.set(self.lanes.index(self.lanes.pack(&self.ring.mul(v, y))));
        }
        t
    }

    fn scaled(&self, u: &Ring8Element, xs: &[Ring8Element]) -> Vec<u32> {
        xs.iter()
            .map(|x| self.lanes.pack(&self.ring.mul(u, x)))
            .collect()
    }

    fn hits(&self, zs: &[u32], uxs: &[u32], table: &Bitmap) -> bool {
        zs.par_iter()
            .any(|&z| uxs.iter().any(|&w| table.get(self.lanes.sub_index(z, w))))
    }

    /// Dividing a primitive solution by the square of a unit coordinate
    /// makes that coordinate 1, so each pass is a single scan over squares.
    pub fn symbol(&self, u: &Ring8Element, v: &Ring8Element) -> Result<i8> {
        let r = self.ring;
        if !r.is_unit(u) || !r.is_unit(v) {
            return Err(Error::NotAUnit);
        }
        let lanes = &self.lanes;
        let one = lanes.pack(r.unity());
        let pu = lanes.pack(u);
        let pv = lanes.pack(v);
        let vy = self.table(v, &self.squares);
        // z = 1: u X + v Y = 1
        let ux = self.scaled(u, &self.squares);
        if ux.iter().any(|&w| vy.get(lanes.sub_index(one, w))) {
            return Ok(1);
        }
        // x = 1: u + v Y = Z
        if self.packed_squares.iter().any(|&z| vy.get(lanes.sub_index(z, pu))) {
            return Ok(1);
        }
        // y = 1: u X + v = Z
        let ux_table = self.table(u, &self.squares);
        if self
            .packed_squares
            .iter()
            .any(|&z| ux_table.get(lanes.sub_index(z, pv)))
        {
            return Ok(1);
        }
        Ok(-1)
    }

    /// The same decision by the unnormalized search: meet in the middle
    /// over all `(u X, Z)` pairs against a table of `v Y`, once for each
    /// choice of unit coordinate.
    pub fn symbol_exhaustive(&self, u: &Ring8Element, v: &Ring8Element) -> Result<i8> {
        let r = self.ring;
        if !r.is_unit(u) || !r.is_unit(v) {
            return Err(Error::NotAUnit);
        }
        let ux_all = self.scaled(u, &self.squares);
        let vy_all = self.table(v, &self.squares);
        if self.hits(&self.packed_unit_squares, &ux_all, &vy_all) {
            return Ok(1);
        }
        let ux_unit = self.scaled(u, &self.unit_squares);
        if self.hits(&self.packed_squares, &ux_unit, &vy_all) {
            return Ok(1);
        }
        let vy_unit = self.table(v, &self.unit_squares);
        if self.hits(&self.packed_squares, &ux_all, &vy_unit) {
            return Ok(1);
        }
        Ok(-1)
    }
}

pub fn conic_oracle(r: &Ring8, u: &Ring8Element, v: &Ring8Element) -> Result<i8> {
    ConicOracle::new(r)?.symbol(u, v)
}

/// Basis of `U / U^2` used by Gram matrices: `1 + 2 b~_i`, then `Delta`.
pub fn gram_basis(r: &Ring8) -> Vec<Ring8Element> {
    let n = r.degree();
    let mut b: Vec<Ring8Element> = (0..n).map(|i| r.canonical_unit(1 << i)).collect();
    b.push(r.delta());
    b
}

#[derive(Clone, Debug)]
pub struct OracleGram {
    pub gram: GramMatrix,
    /// Time per computed entry `(i, j)` with `i <= j`.
    pub timings: Vec<((usize, usize), Duration)>,
}

pub fn gram_from_oracle_timed(r: &Ring8) -> Result<OracleGram> {
    let oracle = ConicOracle::new(r)?;
    let n = r.degree();
    let basis = gram_basis(r);
    let mut rows = vec![0u64; n + 1];
    let mut timings = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            let start = Instant::now();
            let s = oracle.symbol(&basis[i], &basis[j])?;
            timings.push(((i, j), start.elapsed()));
            if s == -1 {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
    }
    Ok(OracleGram {
        gram: GramMatrix {
            n,
            rows,
            provenance: Provenance::Oracle,
        },
        timings,
    })
}

pub fn gram_from_oracle(r: &Ring8) -> Result<GramMatrix> {
    gram_from_oracle_timed(r).map(|g| g.gram)
}

/// The oracle Gram matrix through the unnormalized conic search.
pub fn gram_from_exhaustive_oracle(r: &Ring8) -> Result<GramMatrix> {
    let oracle = ConicOracle::new(r)?;
    let n = r.degree();
    let basis = gram_basis(r);
    let mut rows = vec![0u64; n + 1];
    for i in 0..=n {
        for j in i..=n {
            if oracle.symbol_exhaustive(&basis[i], &basis[j])? == -1 {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
    }
    Ok(GramMatrix {
        n,
        rows,
        provenance: Provenance::Oracle,
    })
}

#[derive(Clone, Debug)]
pub struct GramValidation {
    pub n: usize,
    pub modulus: Gf2Poly,
    pub oracle: GramMatrix,
    pub formula: GramMatrix,
    pub timings: Vec<((usize, usize), Duration)>,
    pub galois_pairs: usize,
    pub elapsed: Duration,
}

/// Number of random pairs checked for Galois invariance of the oracle.
pub const GALOIS_TRIALS: usize = 100;

/// Compares the oracle and formula Gram matrices on the synthetic ring of
/// the given modulus, and checks `(u^phi, v^phi) = (u, v)` with the oracle
/// on `galois_trials` random pairs.
pub fn validate_gram(n: usize, modulus: Gf2Poly, galois_trials: usize) -> Result<GramValidation> {
    let start = Instant::now();
    let r = Ring8::synthetic(n, modulus)?;
    let timed = gram_from_oracle_timed(&r)?;
    let formula = gram_from_formula(&r);
    for i in 0..=n {
        for j in 0..=n {
            let (o, f) = (timed.gram.entry(i, j), formula.entry(i, j));
            if o != f {
                return Err(Error::ValidationFailed {
                    row: i,
                    col: j,
                    oracle: o,
                    formula: f,
                });
            }
        }
    }
    let oracle = ConicOracle::new(&r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ n as u64);
    for _ in 0..galois_trials {
        let u = r.random_unit(&mut rng);
        let v = r.random_unit(&mut rng);
        let before = oracle.symbol(&u, &v)?;
        let after = oracle.symbol(&r.galois_apply(&u, 1), &r.galois_apply(&v, 1))?;
        if before != after {
            return Err(Error::Consistency(format!(
                "oracle symbol not Galois invariant at u = {u}, v = {v}"
            )));
        }
    }
    Ok(GramValidation {
        n,
        modulus,
        oracle: timed.gram,
        formula,
        timings: timed.timings,
        galois_pairs: galois_trials,
        elapsed: start.elapsed(),
    })
}

/// Degrees at which the closed form must agree with the oracle before it
/// may be used.
pub const GATE_DEGREES: [usize; 4] = [1, 3, 5, 7];

static GATE: OnceLock<std::result::Result<Vec<GramValidation>, String>> = OnceLock::new();

/// Runs [`validate_gram`] at every degree in [`GATE_DEGREES`] once per
/// process. Formula-provenance Gram matrices are available only if all pass.
pub fn formula_gate() -> Result<&'static [GramValidation]> {
    let outcome = GATE.get_or_init(|| {
        GATE_DEGREES
            .iter()
            .map(|&n| {
                let modulus = Ring8::default_modulus(n).expect("modulus exists");
                validate_gram(n, modulus, GALOIS_TRIALS).map_err(|e| e.to_string())
            })
            .collect()
    });
    match outcome {
        Ok(v) => Ok(v),
        Err(msg) => {
            log::error!("closed-form pairing failed validation: {msg}");
            Err(Error::FormulaNotValidated)
        }
    }
}

/// The Gram matrix for published results on `r`: oracle for small degrees,
/// otherwise the closed form once the gate has passed.
pub fn published_gram(r: &Ring8) -> Result<GramMatrix> {
    if r.degree() <= MAX_ORACLE_DEGREE {
        return gram_from_oracle(r);
    }
    formula_gate()?;
    Ok(gram_from_formula(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CyclicField, FieldParams};

    fn z8() -> Ring8 {
        Ring8::synthetic(1, Ring8::default_modulus(1).unwrap()).unwrap()
    }

    #[test]
    fn coords_in_z8() {
        let r = z8();
        let c = |k| coords8(&r, &r.from_int(k)).unwrap();
        assert_eq!(c(1), UnitSquareClass8 { a: 0, eps: 0 });
        assert_eq!(c(3), UnitSquareClass8 { a: 1, eps: 0 });
        assert_eq!(c(5), UnitSquareClass8 { a: 0, eps: 1 });
        assert_eq!(c(7), UnitSquareClass8 { a: 1, eps: 1 });
        assert!(matches!(coords8(&r, &r.from_int(4)), Err(Error::NotAUnit)));
    }

    #[test]
    fn classical_symbols_over_q2() {
        let r = z8();
        let o = ConicOracle::new(&r).unwrap();
        let e = |k| r.from_int(k);
        assert_eq!(o.symbol(&e(1), &e(1)).unwrap(), 1);
        assert_eq!(o.symbol(&e(-1), &e(-1)).unwrap(), -1);
        assert_eq!(o.symbol(&e(5), &e(5)).unwrap(), 1);
        assert_eq!(o.symbol(&e(3), &e(3)).unwrap(), -1);
        assert_eq!(o.symbol(&e(3), &e(5)).unwrap(), 1);
        assert_eq!(o.symbol(&e(3), &e(7)).unwrap(), -1);
        let g = gram_from_oracle(&r).unwrap();
        assert_eq!(g.to_rows_of_bits(), vec![vec![1, 0], vec![0, 0]]);
        assert!(gram_from_formula(&r).same_entries(&g));
        assert_eq!(symbol(&r, &e(7), &e(7), &g).unwrap(), -1);
    }

    #[test]
    fn oracle_rejects_large_degree() {
        let r = Ring8::synthetic(11, Ring8::default_modulus(11).unwrap()).unwrap();
        assert!(matches!(
            ConicOracle::new(&r),
            Err(Error::DegreeTooLarge { n: 11, max: 7 })
        ));
    }

    #[test]
    fn square_counts() {
        for n in [1usize, 3, 5] {
            let r = Ring8::synthetic(n, Ring8::default_modulus(n).unwrap()).unwrap();
            let o = ConicOracle::new(&r).unwrap();
            let units = ((1usize << n) - 1) << (n - 1);
            assert_eq!(o.square_count(), (units + (1 << n), units));
        }
    }

    #[test]
    fn coords_are_additive_and_detect_squares() {
        let r = Ring8::synthetic(3, Gf2Poly(0b1011)).unwrap();
        let units = r.all_units();
        let mut squares = std::collections::HashSet::new();
        for u in &units {
            squares.insert(r.mul(u, u));
        }
        for u in &units {
            let cu = coords8(&r, u).unwrap();
            assert_eq!(cu.is_square(), squares.contains(u));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let u = r.random_unit(&mut rng);
            let v = r.random_unit(&mut rng);
            let (cu, cv) = (coords8(&r, &u).unwrap(), coords8(&r, &v).unwrap());
            let cuv = coords8(&r, &r.mul(&u, &v)).unwrap();
            assert_eq!(cuv.packed(3), cu.packed(3) ^ cv.packed(3));
        }
    }

    #[test]
    fn period_gram_matches_formula_for_conductor_seven() {
        let f = CyclicField::build(FieldParams::new(3, 7, 1).unwrap()).unwrap();
        let r = Ring8::from_field(&f).unwrap();
        let oracle = gram_from_oracle(&r).unwrap();
        assert!(oracle.is_symmetric());
        assert_eq!(oracle.rows[3], 0);
        assert!(oracle.same_entries(&gram_from_formula(&r)));
    }

    #[test]
    fn normalized_and_exhaustive_searches_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [1usize, 2, 3, 5] {
            let r = Ring8::synthetic(n, Ring8::default_modulus(n).unwrap()).unwrap();
            let o = ConicOracle::new(&r).unwrap();
            for _ in 0..60 {
                let u = r.random_unit(&mut rng);
                let v = r.random_unit(&mut rng);
                assert_eq!(o.symbol(&u, &v).unwrap(), o.symbol_exhaustive(&u, &v).unwrap());
            }
        }
    }

    #[test]
    fn validation_at_degree_three() {
        let v = validate_gram(3, Gf2Poly(0b1011), 20).unwrap();
        assert!(v.oracle.same_entries(&v.formula));
        assert_eq!(v.timings.len(), 10);
    }
}
