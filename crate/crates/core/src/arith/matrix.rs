//! Exact dense linear algebra over `Z` and `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::IntPoly;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier. All
/// divisions are exact for integer matrices.
pub fn char_poly(a: &IntMatrix) -> IntPoly {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m: IntMatrix = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -tr / BigInt::from(k);
        coeffs[n - k] = c;
    }
    IntPoly::new(coeffs)
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let p = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigInt::zero(); p]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = &a[i][k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..p {
                out[i][j] += aik * &bk[j];
            }
        }
    }
    out
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Inverse over `Q` by Gauss-Jordan; `None` if singular.
pub fn rational_inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in 0..2 * n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn char_poly_companion() {
        // Companion matrix of x^3 + x^2 - 2x - 1.
        let a = int_matrix(&[&[0, 0, 1], &[1, 0, 2], &[0, 1, -1]]);
        assert_eq!(char_poly(&a), IntPoly::from_i64(&[-1, -2, 1, 1]));
        let id = int_matrix(&[&[1, 0], &[0, 1]]);
        assert_eq!(char_poly(&id), IntPoly::from_i64(&[1, -2, 1]));
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let a = int_matrix(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(det(&a), BigInt::from(4));
        let b = int_matrix(&[&[0, 1], &[1, 0]]);
        assert_eq!(det(&b), BigInt::from(-1));
        let singular = int_matrix(&[&[1, 2], &[2, 4]]);
        assert_eq!(det(&singular), BigInt::zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let r = |v: i64| BigRational::from_integer(v.into());
        let a = vec![vec![r(2), r(1)], vec![r(7), r(4)]];
        let inv = rational_inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![r(4), r(-1)], vec![r(-7), r(2)]]);
        assert!(rational_inverse(&vec![vec![r(1), r(2)], vec![r(2), r(4)]]).is_none());
    }
}
