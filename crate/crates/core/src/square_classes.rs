//! The group `M4` of units mod 4 modulo squares, as `F_2^n`, and its
//! decomposition into Galois orbits.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::gf2;
use crate::error::{Error, Result};
use crate::residue::{Ring8, Ring8Element};

/// Largest degree for which orbit tables over all `2^n` classes are built.
pub const MAX_ORBIT_DEGREE: usize = 24;

/// Bit `i` is the coordinate `a_i` in the ring's self-dual residue basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareClassM4(pub u64);

impl SquareClassM4 {
    pub fn bits(self, n: usize) -> Vec<u8> {
        (0..n).map(|i| ((self.0 >> i) & 1) as u8).collect()
    }

    /// `a_0 a_1 ... a_{n-1}` as a string of digits.
    pub fn to_bit_string(self, n: usize) -> String {
        self.bits(n).iter().map(|b| char::from(b'0' + b)).collect()
    }

    pub fn from_bit_string(s: &str) -> Option<Self> {
        s.chars().enumerate().try_fold(0u64, |m, (i, c)| match c {
            '0' => Some(m),
            '1' => Some(m | (1 << i)),
            _ => None,
        })
        .map(SquareClassM4)
    }

    /// Key under which `a_0` is the most significant coordinate.
    fn lex_key(self, n: usize) -> u64 {
        if n == 0 {
            0
        } else {
            self.0.reverse_bits() >> (64 - n)
        }
    }
}

impl std::ops::Add for SquareClassM4 {
    type Output = SquareClassM4;
    fn add(self, other: Self) -> Self {
        SquareClassM4(self.0 ^ other.0)
    }
}

/// `a`-coordinates of a unit congruent to 1 mod 2: `(w - 1) / 2` mod 2.
pub fn a_part(r: &Ring8, w: &Ring8Element) -> u64 {
    let d = r.sub(w, r.unity());
    debug_assert!(d.mod2_mask() == 0, "not a 1-unit");
    let half = d
        .coeffs()
        .iter()
        .enumerate()
        .fold(0u64, |m, (k, &c)| m | ((((c >> 1) & 1) as u64) << k));
    r.residue_coords(half)
}

pub fn class_of(r: &Ring8, u: &Ring8Element) -> Result<SquareClassM4> {
    let w = r.teichmuller_normalize(u)?;
    Ok(SquareClassM4(a_part(r, &w)))
}

/// The class of `-1`.
pub fn minus_one_class(r: &Ring8) -> SquareClassM4 {
    class_of(r, &r.from_int(-1)).expect("-1 is a unit")
}

/// The Galois generator on `M4` as an `F_2`-linear map.
#[derive(Clone, Debug)]
pub struct ClassAction {
    n: usize,
    /// Column `i` is the image of basis class `i`.
    columns: Vec<u64>,
}

impl ClassAction {
    pub fn new(r: &Ring8) -> Self {
        let n = r.degree();
        let columns = (0..n)
            .map(|i| a_part(r, &r.galois_apply(&r.canonical_unit(1 << i), 1)))
            .collect();
        ClassAction { n, columns }
    }

    pub fn apply(&self, c: SquareClassM4) -> SquareClassM4 {
        let mut out = 0;
        let mut bits = c.0;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            out ^= self.columns[i];
            bits &= bits - 1;
        }
        SquareClassM4(out)
    }

    pub fn apply_power(&self, c: SquareClassM4, j: i64) -> SquareClassM4 {
        let j = j.rem_euclid(self.n as i64);
        (0..j).fold(c, |acc, _| self.apply(acc))
    }
}

/// `class_of(u^(sigma^j))` for any unit `u` in class `c`.
pub fn galois_on_class(r: &Ring8, c: SquareClassM4, j: i64) -> SquareClassM4 {
    SquareClassM4(a_part(r, &r.galois_apply(&r.canonical_unit(c.0), j)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub representative: SquareClassM4,
    pub size: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitTable {
    n: usize,
    orbits: Vec<Orbit>,
    lookup: Vec<u32>,
    minus_one: SquareClassM4,
}

impl OrbitTable {
    pub fn build(r: &Ring8) -> Result<Self> {
        let n = r.degree();
        if n > MAX_ORBIT_DEGREE {
            return Err(Error::DegreeTooLarge {
                n,
                max: MAX_ORBIT_DEGREE,
            });
        }
        let total = 1usize << n;
        assert_eq!(
            (total - 2) % n.max(1),
            0,
            "2^n - 2 is divisible by the prime n"
        );
        let action = ClassAction::new(r);
        let minus_one = minus_one_class(r);
        let mut lookup = vec![u32::MAX; total];
        let mut orbits = Vec::new();
        for start in 0..total {
            if lookup[start] != u32::MAX {
                continue;
            }
            let idx = orbits.len() as u32;
            let mut members = vec![SquareClassM4(start as u64)];
            let mut c = action.apply(members[0]);
            while c.0 as usize != start {
                if members.len() > n {
                    return Err(Error::OrbitInvariantViolation(format!(
                        "class {} does not return under the generator",
                        members[0].to_bit_string(n)
                    )));
                }
                members.push(c);
                c = action.apply(c);
            }
            for m in &members {
                lookup[m.0 as usize] = idx;
            }
            let representative = *members
                .iter()
                .min_by_key(|m| m.lex_key(n))
                .expect("orbit is nonempty");
            orbits.push(Orbit {
                representative,
                size: members.len(),
            });
        }
        let fixed: Vec<SquareClassM4> = orbits
            .iter()
            .filter(|o| o.size == 1)
            .map(|o| o.representative)
            .collect();
        let mut expected = vec![SquareClassM4(0), minus_one];
        expected.sort();
        let mut got = fixed.clone();
        got.sort();
        if got != expected {
            return Err(Error::OrbitInvariantViolation(format!(
                "fixed classes are {:?}, expected the classes of 1 and -1",
                got.iter().map(|c| c.to_bit_string(n)).collect::<Vec<_>>()
            )));
        }
        if let Some(o) = orbits.iter().find(|o| o.size != 1 && o.size != n) {
            return Err(Error::OrbitInvariantViolation(format!(
                "orbit of {} has size {}",
                o.representative.to_bit_string(n),
                o.size
            )));
        }
        Ok(OrbitTable {
            n,
            orbits,
            lookup,
            minus_one,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn orbit_index(&self, c: SquareClassM4) -> usize {
        self.lookup[c.0 as usize] as usize
    }

    pub fn class_count(&self) -> usize {
        self.lookup.len()
    }

    pub fn minus_one(&self) -> SquareClassM4 {
        self.minus_one
    }

    /// Classes fixed by the Galois action.
    pub fn fixed_classes(&self) -> Vec<SquareClassM4> {
        self.orbits
            .iter()
            .filter(|o| o.size == 1)
            .map(|o| o.representative)
            .collect()
    }

    pub fn nontrivial_orbit_count(&self) -> usize {
        self.orbits.iter().filter(|o| o.size > 1).count()
    }
}

/// Evidence that `class_of` maps onto all of `F_2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityReport {
    pub units_tried: usize,
    pub image_rank: usize,
    /// Hit counts per class when the units were enumerated exhaustively.
    pub exhaustive_counts: Option<Vec<u64>>,
}

impl SurjectivityReport {
    pub fn is_onto(&self, n: usize) -> bool {
        self.image_rank == n
    }
}

/// Exhaustive over all units for `n <= 3`; otherwise the `F_2`-rank of the
/// images of `samples` random units. Since `class_of` is a homomorphism,
/// full rank means the image is everything.
pub fn surjectivity<R: Rng + ?Sized>(r: &Ring8, samples: usize, rng: &mut R) -> SurjectivityReport {
    let n = r.degree();
    if n <= 3 {
        let mut counts = vec![0u64; 1 << n];
        let units = r.all_units();
        let images: Vec<u64> = units
            .iter()
            .map(|u| class_of(r, u).expect("unit").0)
            .collect();
        for &c in &images {
            counts[c as usize] += 1;
        }
        return SurjectivityReport {
            units_tried: units.len(),
            image_rank: gf2::rank(&images),
            exhaustive_counts: Some(counts),
        };
    }
    let images: Vec<u64> = (0..samples)
        .map(|_| class_of(r, &r.random_unit(rng)).expect("unit").0)
        .collect();
    SurjectivityReport {
        units_tried: samples,
        image_rank: gf2::rank(&images),
        exhaustive_counts: None,
    }
}

impl fmt::Display for OrbitTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} classes, {} fixed, {} orbits of size {}",
            self.class_count(),
            self.fixed_classes().len(),
            self.nontrivial_orbit_count(),
            self.n
        )
    }
}
