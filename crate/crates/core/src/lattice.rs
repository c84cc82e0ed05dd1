//! The lattices `L_W` (trace-zero matrices), `P` (scalars) and `L = L_W ⊕ P`
//! inside `M_2(Q)` with `Q(x) = N det x`, together with their discriminant groups.
//!
//! Bases are pinned:
//!
//! * `L_W`: `diag(1,-1)`, `(0,-1/N; 0,0)`, `(0,0; 1,0)`
//! * `P`:   `I_2`
//! * `L`:   the `L_W` basis followed by `I_2`
//!
//! With these choices the Gram matrix of `L_W` is `diag(-2N) ⊕ [[0,1],[1,0]]`.

#![allow(clippy::needless_range_loop)]

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::frac_part;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("level must be positive")]
    ZeroLevel,
    #[error("residue {residue} out of range for level {level} (expected < {})", 2 * level)]
    ResidueOutOfRange { level: u64, residue: u64 },
}

/// 2x2 rational matrix, row-major.
pub type Mat2Q = [[Rational64; 2]; 2];

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// `(x, y) = N * tr(x * adj(y))` on `M_2(Q)`.
pub fn bilinear(level: u64, x: &Mat2Q, y: &Mat2Q) -> Rational64 {
    // adj(y) = [[d, -b], [-c, a]]
    let adj = [[y[1][1], -y[0][1]], [-y[1][0], y[0][0]]];
    let mut tr = Rational64::zero();
    for i in 0..2 {
        for k in 0..2 {
            tr += x[i][k] * adj[k][i];
        }
    }
    tr * q(level as i64)
}

/// `Q(x) = N det x`.
pub fn quadratic(level: u64, x: &Mat2Q) -> Rational64 {
    (x[0][0] * x[1][1] - x[0][1] * x[1][0]) * q(level as i64)
}

pub fn basis_w(level: u64) -> [Mat2Q; 3] {
    let z = Rational64::zero();
    let o = Rational64::one();
    [
        [[o, z], [z, -o]],
        [[z, Rational64::new(-1, level as i64)], [z, z]],
        [[z, z], [o, z]],
    ]
}

pub fn basis_p() -> Mat2Q {
    let z = Rational64::zero();
    let o = Rational64::one();
    [[o, z], [z, o]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    W,
    P,
    L,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramLattice {
    pub kind: LatticeKind,
    pub level: u64,
    pub rank: usize,
    #[serde(serialize_with = "ser_matrix")]
    pub gram: Vec<Vec<Rational64>>,
    /// `(positive, negative)` inertia.
    pub signature: (usize, usize),
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<Rational64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let row: Vec<String> = row.iter().map(crate::arith::fmt_rational).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

fn gram_of(level: u64, basis: &[Mat2Q]) -> Vec<Vec<Rational64>> {
    basis
        .iter()
        .map(|x| basis.iter().map(|y| bilinear(level, x, y)).collect())
        .collect()
}

pub fn build_lattice_w(level: u64) -> Result<GramLattice, LatticeError> {
    if level == 0 {
        return Err(LatticeError::ZeroLevel);
    }
    Ok(GramLattice {
        kind: LatticeKind::W,
        level,
        rank: 3,
        gram: gram_of(level, &basis_w(level)),
        signature: (1, 2),
    })
}

pub fn build_lattice_p(level: u64) -> Result<GramLattice, LatticeError> {
    if level == 0 {
        return Err(LatticeError::ZeroLevel);
    }
    Ok(GramLattice {
        kind: LatticeKind::P,
        level,
        rank: 1,
        gram: gram_of(level, &[basis_p()]),
        signature: (1, 0),
    })
}

pub fn build_lattice_l(level: u64) -> Result<GramLattice, LatticeError> {
    if level == 0 {
        return Err(LatticeError::ZeroLevel);
    }
    let mut basis = basis_w(level).to_vec();
    basis.push(basis_p());
    Ok(GramLattice {
        kind: LatticeKind::L,
        level,
        rank: 4,
        gram: gram_of(level, &basis),
        signature: (2, 2),
    })
}

impl GramLattice {
    pub fn determinant(&self) -> Rational64 {
        let mut m = self.gram.clone();
        let n = self.rank;
        let mut det = Rational64::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Rational64::zero();
            };
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            det *= m[col][col];
            for r in col + 1..n {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
        det
    }

    /// Rows are the dual basis vectors expressed in the lattice basis (the inverse Gram matrix).
    pub fn dual_basis(&self) -> Vec<Vec<Rational64>> {
        let n = self.rank;
        let mut aug: Vec<Vec<Rational64>> = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !aug[r][col].is_zero())
                .expect("Gram matrix is nonsingular");
            aug.swap(piv, col);
            let p = aug[col][col];
            for c in 0..2 * n {
                aug[col][c] /= p;
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col];
                    for c in 0..2 * n {
                        let v = aug[col][c];
                        aug[r][c] -= f * v;
                    }
                }
            }
        }
        aug.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    /// Invariant factors of `L'/L` (Smith normal form of the integral Gram matrix), units dropped.
    pub fn discriminant_invariants(&self) -> Vec<u64> {
        let mut m: Vec<Vec<i64>> = self
            .gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        assert!(x.is_integer(), "Gram matrix must be integral");
                        x.to_integer()
                    })
                    .collect()
            })
            .collect();
        smith_diagonal(&mut m)
            .into_iter()
            .filter(|&d| d != 1)
            .collect()
    }

    pub fn discriminant_group_order(&self) -> u64 {
        self.discriminant_invariants().iter().product()
    }

    /// Inertia via symmetric Gaussian elimination; used to check the stored signature.
    pub fn computed_signature(&self) -> (usize, usize) {
        let n = self.rank;
        let mut m = self.gram.clone();
        let (mut pos, mut neg) = (0, 0);
        let mut active: Vec<usize> = (0..n).collect();
        while let Some(&i) = active.first() {
            // Find a nonzero diagonal entry, creating one from an off-diagonal pair if needed.
            let diag = active.iter().copied().find(|&k| !m[k][k].is_zero());
            let pivot = match diag {
                Some(k) => k,
                None => {
                    let Some(&j) = active.iter().find(|&&j| j != i && !m[i][j].is_zero()) else {
                        active.remove(0);
                        continue;
                    };
                    // e_i <- e_i + e_j
                    for c in 0..n {
                        let v = m[j][c];
                        m[i][c] += v;
                    }
                    for r in 0..n {
                        let v = m[r][j];
                        m[r][i] += v;
                    }
                    i
                }
            };
            let d = m[pivot][pivot];
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            let rest: Vec<usize> = active.iter().copied().filter(|&k| k != pivot).collect();
            for &r in &rest {
                let f = m[r][pivot] / d;
                for &c in &rest {
                    let v = m[pivot][c];
                    m[r][c] -= f * v;
                }
            }
            active = rest;
        }
        (pos, neg)
    }
}

/// Diagonal of the Smith normal form (absolute values) of a square integer matrix.
fn smith_diagonal(m: &mut [Vec<i64>]) -> Vec<u64> {
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            // Move the smallest nonzero entry of the trailing block to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                out.extend(std::iter::repeat_n(0, n - t));
                return out;
            };
            m.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let f = m[i][t] / p;
                for j in t..n {
                    m[i][j] -= f * m[t][j];
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..n {
                let f = m[t][j] / p;
                for i in t..n {
                    m[i][j] -= f * m[i][t];
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility condition: p must divide the whole trailing block.
            if let Some((i, _)) = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| m[i][j] % p != 0)
            {
                for j in t..n {
                    m[t][j] += m[i][j];
                }
                continue;
            }
            out.push(p.unsigned_abs());
            break;
        }
    }
    out
}

/// Which summand of `L'/L = L_W'/L_W ⊕ P'/P` a value is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    W,
    P,
    Full,
}

/// Element `μ = μ_0 + μ⁺` of `L'/L`, stored as residues `(r1, r2)` mod `2N`:
/// `μ_0 = diag(r1, -r1)/2N` and `μ⁺ = (r2/2N) I_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscElement {
    pub level: u64,
    pub r1: u64,
    pub r2: u64,
}

impl DiscElement {
    pub fn new(level: u64, r1: u64, r2: u64) -> Result<Self, LatticeError> {
        if level == 0 {
            return Err(LatticeError::ZeroLevel);
        }
        for r in [r1, r2] {
            if r >= 2 * level {
                return Err(LatticeError::ResidueOutOfRange { level, residue: r });
            }
        }
        Ok(Self { level, r1, r2 })
    }

    /// Reduce arbitrary integer residues mod `2N`.
    pub fn from_residues(level: u64, r1: i64, r2: i64) -> Result<Self, LatticeError> {
        if level == 0 {
            return Err(LatticeError::ZeroLevel);
        }
        let m = 2 * level as i64;
        Ok(Self { level, r1: r1.rem_euclid(m) as u64, r2: r2.rem_euclid(m) as u64 })
    }

    pub fn zero(level: u64) -> Self {
        Self { level, r1: 0, r2: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.r1 == 0 && self.r2 == 0
    }

    pub fn neg(&self) -> Self {
        let m = 2 * self.level;
        Self { level: self.level, r1: (m - self.r1) % m, r2: (m - self.r2) % m }
    }

    /// `μ_0`, the `L_W'/L_W` component.
    pub fn w_part(&self) -> Self {
        Self { r2: 0, ..*self }
    }

    /// `μ⁺`, the `P'/P` component.
    pub fn p_part(&self) -> Self {
        Self { r1: 0, ..*self }
    }

    /// Matrix representative `diag((r1 + r2)/2N, (r2 - r1)/2N)`.
    pub fn matrix(&self) -> Mat2Q {
        let d = 2 * self.level as i64;
        let (r1, r2) = (self.r1 as i64, self.r2 as i64);
        let z = Rational64::zero();
        [[Rational64::new(r1 + r2, d), z], [z, Rational64::new(r2 - r1, d)]]
    }

    /// Recover the residues from a diagonal representative `diag(x, y)`.
    pub fn from_matrix(level: u64, m: &Mat2Q) -> Result<Self, LatticeError> {
        let n = level as i64;
        let r1 = (m[0][0] - m[1][1]) * q(n);
        let r2 = (m[0][0] + m[1][1]) * q(n);
        assert!(r1.is_integer() && r2.is_integer(), "not a discriminant-group representative");
        Self::from_residues(level, r1.to_integer(), r2.to_integer())
    }
}

/// `Q(μ) mod 1` on the chosen summand, in `[0, 1)`.
pub fn q_mod1(mu: &DiscElement, side: Side) -> Rational64 {
    let four_n = 4 * mu.level as i64;
    let w = Rational64::new(-((mu.r1 * mu.r1) as i64), four_n);
    let p = Rational64::new((mu.r2 * mu.r2) as i64, four_n);
    frac_part(match side {
        Side::W => w,
        Side::P => p,
        Side::Full => w + p,
    })
}
