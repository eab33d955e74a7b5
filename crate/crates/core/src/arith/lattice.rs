//! Exact lattice reduction and short-vector enumeration.
//!
//! Lattices are given by integer basis vectors together with an integral
//! positive definite inner product. Reduction is the all-integer LLL variant
//! (Gram-Schmidt data kept as the integers `d_i` and `lambda_ij`), and
//! enumeration is Fincke-Pohst over an exact rational decomposition of the
//! reduced Gram matrix. Nothing here touches floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Vector = Vec<BigInt>;

/// LLL-reduces `basis` (delta = 3/4) with respect to `inner`. The basis must
/// be linearly independent.
pub fn lll<F>(mut basis: Vec<Vector>, inner: F) -> Vec<Vector>
where
    F: Fn(&[BigInt], &[BigInt]) -> BigInt,
{
    let n = basis.len();
    if n <= 1 {
        return basis;
    }
    // 1-based bookkeeping as in the textbook formulation; d[0] = 1.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    d[1] = inner(&basis[0], &basis[0]);
    let mut k = 2usize;
    let mut kmax = 1usize;

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = inner(&basis[k - 1], &basis[j - 1]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "lattice basis is dependent");
                    d[k] = u;
                }
            }
        }
        loop {
            reduce_pair(&mut basis, &mut lam, &d, k, k - 1);
            let lhs = BigInt::from(4) * &d[k] * &d[k - 2];
            let rhs = BigInt::from(3) * &d[k - 1] * &d[k - 1]
                - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                swap(&mut basis, &mut lam, &mut d, k, kmax);
                k = (k - 1).max(2);
            } else {
                for l in (1..k - 1).rev() {
                    reduce_pair(&mut basis, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    basis
}

fn reduce_pair(basis: &mut [Vector], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let two_lam = BigInt::from(2) * &lam[k][l];
    if two_lam.abs() <= d[l] {
        return;
    }
    // nearest integer to lam / d
    let q = (two_lam + &d[l]).div_floor(&(BigInt::from(2) * &d[l]));
    let bl = basis[l - 1].clone();
    for (x, y) in basis[k - 1].iter_mut().zip(&bl) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * &d[l];
    for i in 1..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

fn swap(basis: &mut [Vector], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    basis.swap(k - 1, k - 2);
    for j in 1..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
        lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k];
    }
    d[k - 1] = b;
}

/// Gram matrix of `basis` under `inner`.
pub fn gram<F>(basis: &[Vector], inner: &F) -> Vec<Vec<BigInt>>
where
    F: Fn(&[BigInt], &[BigInt]) -> BigInt,
{
    basis
        .iter()
        .map(|u| basis.iter().map(|v| inner(u, v)).collect())
        .collect()
}

/// All nonzero lattice vectors `x` with `inner(x, x) <= radius`, returned as
/// `(norm, x)` pairs sorted by norm and then lexicographically.
pub fn short_vectors<F>(basis: &[Vector], inner: &F, radius: &BigInt) -> Vec<(BigInt, Vector)>
where
    F: Fn(&[BigInt], &[BigInt]) -> BigInt,
{
    let n = basis.len();
    let g = gram(basis, inner);
    // Q(y) = sum_i q_ii (y_i + sum_{j>i} q_ij y_j)^2
    let mut q: Vec<Vec<BigRational>> = g
        .iter()
        .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let t = &q[i][j] / &q[i][i];
            q[j][i] = q[i][j].clone();
            q[i][j] = t;
        }
        for k in i + 1..n {
            for l in k..n {
                let t = &q[k][i] * &q[i][l];
                q[k][l] -= t;
            }
        }
    }
    let bound = BigRational::from_integer(radius.clone());
    let mut coords = vec![BigInt::zero(); n];
    let mut found: Vec<Vec<BigInt>> = Vec::new();
    if n > 0 {
        enumerate(&q, n - 1, &bound, &mut coords, &mut found);
    }
    let dim = basis.first().map_or(0, Vec::len);
    let mut out: Vec<(BigInt, Vector)> = found
        .into_iter()
        .filter(|y| y.iter().any(|c| !c.is_zero()))
        .map(|y| {
            let mut x = vec![BigInt::zero(); dim];
            for (c, b) in y.iter().zip(basis) {
                if c.is_zero() {
                    continue;
                }
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            (inner(&x, &x), x)
        })
        .filter(|(norm, _)| norm <= radius)
        .collect();
    out.sort();
    out
}

fn enumerate(
    q: &[Vec<BigRational>],
    i: usize,
    remaining: &BigRational,
    coords: &mut Vec<BigInt>,
    found: &mut Vec<Vec<BigInt>>,
) {
    let n = q.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center -= &q[i][j] * BigRational::from_integer(coords[j].clone());
    }
    let cost = |x: &BigInt| -> BigRational {
        let t = BigRational::from_integer(x.clone()) - &center;
        &q[i][i] * &t * &t
    };
    let start = center.floor().to_integer();
    // The admissible set is an interval around the center; walk both ways.
    for dir in [1i32, -1] {
        let mut x = if dir == 1 { start.clone() } else { &start - 1 };
        loop {
            let c = cost(&x);
            if &c > remaining {
                if dir == 1 && x <= center.ceil().to_integer() {
                    // floor(center) may fall just outside while ceil is inside.
                    x += 1;
                    continue;
                }
                break;
            }
            coords[i] = x.clone();
            if i == 0 {
                found.push(coords.clone());
            } else {
                let rem = remaining - &c;
                enumerate(q, i - 1, &rem, coords, found);
            }
            x += dir;
        }
    }
    coords[i] = BigInt::zero();
}
