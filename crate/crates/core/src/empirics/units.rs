//! Units found by short-vector search, and sign correction of generators.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::arith::gf2;
use crate::arith::lattice::{lll, short_vectors};
use crate::error::{Error, Result};
use crate::field::{CyclicField, FieldElement, Precision};

/// Doublings of the unit search radius before giving up.
pub const UNIT_RADIUS_DOUBLINGS: u32 = 10;

/// Units whose sign vectors span `F_2^n`. Bit `t` of a signature mask is set
/// when the unit is negative under embedding `t`.
#[derive(Clone, Debug)]
pub struct UnitBasis {
    pub units: Vec<FieldElement>,
    pub signatures: Vec<u64>,
    /// Units of norm +-1 seen by the final search.
    pub candidates: usize,
    pub radius: BigInt,
}

pub fn signature_mask(f: &CyclicField, x: &FieldElement, precision: Precision) -> Result<u64> {
    Ok(f.signature(x, precision)?
        .iter()
        .enumerate()
        .fold(0u64, |m, (t, &s)| m | (((s < 0) as u64) << t)))
}

/// Searches `O_K` by increasing `Tr(x^2)` for units, starting at
/// `search_radius` and doubling, until their signatures together with that
/// of `-1` span `F_2^n`. Only the units that raised the rank are kept, with
/// `-1` first.
pub fn unit_basis(f: &CyclicField, search_radius: &BigInt, precision: Precision) -> Result<UnitBasis> {
    let n = f.degree();
    let inner = |x: &[BigInt], y: &[BigInt]| f.trace_form(x, y);
    let identity: Vec<Vec<BigInt>> = (0..n).map(|i| f.basis(i).into_coeffs()).collect();
    let reduced = lll(identity, inner);
    let minus_one = f.neg(f.unity());
    let mut radius = search_radius.clone();
    let mut best_rank = 0;
    for _ in 0..=UNIT_RADIUS_DOUBLINGS {
        let mut units = vec![minus_one.clone()];
        let mut signatures = vec![signature_mask(f, &minus_one, precision)?];
        let mut candidates = 0;
        for (_, v) in short_vectors(&reduced, &inner, &radius) {
            let x = FieldElement::new(v);
            if !f.norm(&x).abs().is_one() {
                continue;
            }
            candidates += 1;
            let s = signature_mask(f, &x, precision)?;
            let mut trial = signatures.clone();
            trial.push(s);
            if gf2::rank(&trial) > signatures.len() {
                units.push(x);
                signatures = trial;
            }
            if signatures.len() == n {
                break;
            }
        }
        best_rank = signatures.len();
        if best_rank == n {
            return Ok(UnitBasis {
                units,
                signatures,
                candidates,
                radius,
            });
        }
        radius <<= 1;
    }
    Err(Error::SignatureSpanFailure { rank: best_rank, n })
}

/// Default starting radius: enough for the periods themselves.
pub fn default_unit_radius(f: &CyclicField) -> BigInt {
    BigInt::from(f.conductor())
}

/// `alpha` times a product of basis units, totally positive.
pub fn make_totally_positive(
    f: &CyclicField,
    alpha: &FieldElement,
    ub: &UnitBasis,
    precision: Precision,
) -> Result<FieldElement> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let target = signature_mask(f, alpha, precision)?;
    let combo = gf2::solve(&ub.signatures, target).ok_or(Error::UnreachableSignature)?;
    let mut out = alpha.clone();
    for (k, u) in ub.units.iter().enumerate() {
        if (combo >> k) & 1 == 1 {
            out = f.mul(&out, u);
        }
    }
    if !f.is_totally_positive(&out)? {
        return Err(Error::Consistency(format!(
            "sign correction of {alpha} did not give a totally positive element"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    fn k37() -> CyclicField {
        CyclicField::build(FieldParams::new(3, 7, 1).unwrap()).unwrap()
    }

    #[test]
    fn units_for_conductor_seven() {
        let f = k37();
        assert_eq!(f.norm(&f.basis(0)), BigInt::one());
        let ub = unit_basis(&f, &default_unit_radius(&f), Precision::default()).unwrap();
        assert_eq!(ub.units.len(), 3);
        assert_eq!(ub.units[0], f.neg(f.unity()));
        assert_eq!(ub.signatures[0], 0b111);
        assert_eq!(gf2::rank(&ub.signatures), 3);
        for u in &ub.units {
            assert!(f.is_unit(u));
        }
    }

    #[test]
    fn degree_five_spans() {
        let f = CyclicField::build(FieldParams::new(5, 11, 1).unwrap()).unwrap();
        let ub = unit_basis(&f, &default_unit_radius(&f), Precision::default()).unwrap();
        assert_eq!(gf2::rank(&ub.signatures), 5);
    }

    #[test]
    fn sign_correction() {
        let f = k37();
        let p = Precision::default();
        let ub = unit_basis(&f, &default_unit_radius(&f), p).unwrap();
        let pos = f.add(&f.from_int(&BigInt::from(2)), &f.basis(0));
        assert_eq!(make_totally_positive(&f, &pos, &ub, p).unwrap(), pos);
        let neg = f.neg(&pos);
        let fixed = make_totally_positive(&f, &neg, &ub, p).unwrap();
        assert!(f.is_totally_positive(&fixed).unwrap());
        let eta = f.basis(1);
        let fixed = make_totally_positive(&f, &eta, &ub, p).unwrap();
        assert!(f.is_totally_positive(&fixed).unwrap());
        assert!(f.is_unit(&fixed));
        assert!(matches!(
            make_totally_positive(&f, &f.zero(), &ub, p),
            Err(Error::ZeroElement)
        ));
    }
}
