//! Linear algebra over `F_2` on `u64` bit vectors, and `F_2[x]` polynomials
//! packed into machine words.

/// Rank of a set of vectors.
pub fn rank(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        if let Some(r) = reduce(&basis, v) {
            basis.push(r);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn reduce(basis: &[u64], mut v: u64) -> Option<u64> {
    for &b in basis {
        let top = 63 - b.leading_zeros();
        if (v >> top) & 1 == 1 {
            v ^= b;
        }
    }
    (v != 0).then_some(v)
}

/// Finds `x` with `sum_k x_k columns[k] = target`, returned as a mask over
/// column indices. At most 64 columns.
pub fn solve(columns: &[u64], target: u64) -> Option<u64> {
    assert!(columns.len() <= 64);
    // Each pivot row carries the combination of columns that produced it.
    let mut pivots: Vec<(u64, u64)> = Vec::new();
    for (k, &c) in columns.iter().enumerate() {
        let (mut v, mut combo) = (c, 1u64 << k);
        for &(pv, pc) in &pivots {
            if v & (1u64 << (63 - pv.leading_zeros())) != 0 {
                v ^= pv;
                combo ^= pc;
            }
        }
        if v != 0 {
            pivots.push((v, combo));
            pivots.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        }
    }
    let (mut v, mut combo) = (target, 0u64);
    for &(pv, pc) in &pivots {
        if v & (1u64 << (63 - pv.leading_zeros())) != 0 {
            v ^= pv;
            combo ^= pc;
        }
    }
    (v == 0).then_some(combo)
}

/// Polynomial over `F_2`; bit `k` is the coefficient of `x^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gf2Poly(pub u64);

impl Gf2Poly {
    pub fn degree(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
        let dm = 63 - m.leading_zeros();
        let mut acc: u128 = 0;
        for i in 0..64 {
            if (b >> i) & 1 == 1 {
                acc ^= (a as u128) << i;
            }
        }
        for i in (dm as usize..128).rev() {
            if (acc >> i) & 1 == 1 {
                acc ^= (m as u128) << (i - dm as usize);
            }
        }
        acc as u64
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let db = 63 - b.leading_zeros();
            while a != 0 && 63 - a.leading_zeros() >= db {
                a ^= b << (63 - a.leading_zeros() - db);
            }
            std::mem::swap(&mut a, &mut b);
        }
        a
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let m = self.0;
        let x = 0b10u64;
        let frob = |k: u32| -> u64 {
            let mut y = x;
            for _ in 0..k {
                y = Self::mul_mod(y, y, m);
            }
            y
        };
        if frob(n) != x {
            return false;
        }
        let mut q = 2;
        let mut rest = n;
        while rest > 1 {
            if rest % q == 0 {
                if Self::gcd(m, frob(n / q) ^ x) != 1 {
                    return false;
                }
                while rest % q == 0 {
                    rest /= q;
                }
            }
            q += 1;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_solve() {
        assert_eq!(rank(&[0b111, 0b011, 0b110]), 3);
        assert_eq!(rank(&[0b11, 0b11, 0]), 1);
        let cols = [0b111, 0b011, 0b110];
        let x = solve(&cols, 0b100).unwrap();
        let got = (0..3).filter(|k| x >> k & 1 == 1).fold(0, |acc, k| acc ^ cols[k]);
        assert_eq!(got, 0b100);
        assert_eq!(solve(&[0b01, 0b01], 0b10), None);
    }

    #[test]
    fn irreducibility() {
        assert!(Gf2Poly(0b1011).is_irreducible()); // x^3 + x + 1
        assert!(Gf2Poly(0b100101).is_irreducible()); // x^5 + x^2 + 1
        assert!(Gf2Poly(0b10000011).is_irreducible()); // x^7 + x + 1
        assert!(!Gf2Poly(0b101).is_irreducible()); // (x+1)^2
        assert!(!Gf2Poly(0b10101).is_irreducible()); // (x^2+x+1)^2
        assert!(Gf2Poly(0b10).is_irreducible());
        // brute-force count of irreducible quartics is 3
        assert_eq!((16..32u64).filter(|&m| Gf2Poly(m).is_irreducible()).count(), 3);
    }
}
