//! The projective line over `Z/N`, which indexes the cosets `SL2(Z) / Γ0(N)` by first
//! column (equivalently `Γ0(N) \ SL2(Z)` by bottom row).

use crate::arith::{ext_gcd, gcd};
use crate::forms::IntMat;

/// Canonical representative of `(c : d)` in P¹(Z/N): the lexicographically smallest
/// unit multiple.
pub fn normalize(n: i64, c: i64, d: i64) -> (i64, i64) {
    let (c, d) = (c.rem_euclid(n), d.rem_euclid(n));
    if n == 1 {
        return (0, 0);
    }
    (1..n)
        .filter(|u| gcd(*u, n) == 1)
        .map(|u| ((u * c) % n, (u * d) % n))
        .min()
        .expect("1 is a unit")
}

/// All points of P¹(Z/N), each in canonical form. There are `N ∏_{p|N} (1 + 1/p)`.
///
/// Sweeps pairs in lexicographic order; the first unvisited pair of an orbit is its minimum.
pub fn points(n: i64) -> Vec<(i64, i64)> {
    if n == 1 {
        return vec![(0, 0)];
    }
    let units: Vec<i64> = (1..n).filter(|u| gcd(*u, n) == 1).collect();
    let size = n as usize;
    let mut seen = vec![false; size * size];
    let mut out = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if seen[c as usize * size + d as usize] || gcd(gcd(c, d), n) != 1 {
                continue;
            }
            for &u in &units {
                seen[((u * c) % n) as usize * size + ((u * d) % n) as usize] = true;
            }
            out.push((c, d));
        }
    }
    out
}

/// An element of SL2(Z) whose first column reduces to `(a, c)` mod N.
pub fn lift_first_column(n: i64, a: i64, c: i64) -> IntMat {
    let (mut a, c) = (a.rem_euclid(n.max(1)), c.rem_euclid(n.max(1)));
    if n == 1 {
        return [[1, 0], [0, 1]];
    }
    if c == 0 {
        // a is a unit mod N; (a, N) is a coprime lift of (a, 0).
        let (_, x, y) = ext_gcd(a, n);
        return [[a, -y], [n, x]];
    }
    while gcd(a, c) != 1 {
        a += n;
    }
    let (_, x, y) = ext_gcd(a, c);
    [[a, -y], [c, x]]
}
