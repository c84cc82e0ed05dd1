//! Heegner divisors `P_{D,r}` on X0(N).
//!
//! A Heegner form of index `(D, r)` is a positive definite form `[A, B, C]` of
//! discriminant `D` with `N | A` and `B ≡ r (mod 2N)`. Its Γ0(N)-classes are found by
//! walking the cosets `SL2(Z)/Γ0(N)` above every reduced form of discriminant `D`: the
//! form `Q ∘ g` depends on the coset of `g` only up to Γ0(N)-equivalence, and two cosets
//! give the same class exactly when they differ by the stabiliser of `Q`.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{fmt_rational, gcd};
use crate::forms::{hurwitz_class_number, reduced_forms, BQForm};
use crate::geometry::p1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeegnerError {
    #[error("level must be positive")]
    ZeroLevel,
    #[error("D = {0} is not a negative discriminant (D < 0, D ≡ 0, 1 mod 4)")]
    BadDiscriminant(i64),
    #[error("r = {r} is not a residue mod 2N = {two_n}")]
    ResidueOutOfRange { r: u64, two_n: u64 },
    #[error("r = {r} does not satisfy r² ≡ D = {d} (mod 4N = {four_n})")]
    NotASquareRoot { d: i64, r: u64, four_n: u64 },
    #[error("m0 = {m0} must be positive")]
    NonPositiveNorm { m0: String },
    #[error("m0 = {m0} is not congruent to -r1²/4N mod 1 for r1 = {r1}, N = {level}")]
    CongruenceMismatch { level: u64, m0: String, r1: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HeegnerIndex {
    pub level: u64,
    pub d: i64,
    pub r: u64,
}

impl HeegnerIndex {
    pub fn new(level: u64, d: i64, r: u64) -> Result<Self, HeegnerError> {
        if level == 0 {
            return Err(HeegnerError::ZeroLevel);
        }
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(HeegnerError::BadDiscriminant(d));
        }
        if r >= 2 * level {
            return Err(HeegnerError::ResidueOutOfRange { r, two_n: 2 * level });
        }
        let four_n = 4 * level as i64;
        if ((r * r) as i64 - d).rem_euclid(four_n) != 0 {
            return Err(HeegnerError::NotASquareRoot { d, r, four_n: four_n as u64 });
        }
        Ok(Self { level, d, r })
    }

    /// `r ≡ -r (mod 2N)`, i.e. `r ∈ {0, N}`.
    pub fn is_self_paired(&self) -> bool {
        (2 * self.r).is_multiple_of(2 * self.level)
    }

    pub fn negated(&self) -> Self {
        Self { r: (2 * self.level - self.r) % (2 * self.level), ..*self }
    }

    /// `m0 = -D / 4N`.
    pub fn m0(&self) -> Rational64 {
        Rational64::new(-self.d, 4 * self.level as i64)
    }

    /// `gcd(D, N) = 1`, the setting in which `deg P_{D,r} = H(|D|)`.
    pub fn is_coprime(&self) -> bool {
        gcd(self.d, self.level as i64) == 1
    }
}

/// All `r ∈ [0, 2N)` with `r² ≡ D (mod 4N)`.
pub fn heegner_r_values(level: u64, d: i64) -> Vec<u64> {
    if level == 0 {
        return Vec::new();
    }
    let four_n = 4 * level as i64;
    (0..2 * level)
        .filter(|r| ((r * r) as i64 - d).rem_euclid(four_n) == 0)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeegnerClass {
    pub form: BQForm,
    #[serde(with = "crate::arith::serde_rational")]
    pub weight: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeegnerDivisor {
    pub index: HeegnerIndex,
    pub classes: Vec<HeegnerClass>,
    #[serde(with = "crate::arith::serde_rational")]
    pub degree: Rational64,
    pub self_paired: bool,
}

impl HeegnerDivisor {
    /// Degree of `P_{D,r} + P_{D,-r}`; the two halves have equal degree, so a self-paired
    /// index counts twice.
    pub fn special_divisor_degree(&self) -> Rational64 {
        self.degree * 2
    }
}

/// Γ0(N)-classes of Heegner forms of index `(D, r)` with their weights `1/|Stab/±1|`.
pub fn enumerate_heegner_divisor(idx: &HeegnerIndex) -> Result<HeegnerDivisor, HeegnerError> {
    let idx = HeegnerIndex::new(idx.level, idx.d, idx.r)?;
    let n = idx.level as i64;
    let two_n = 2 * n;
    let pts = p1::points(n);
    let mut classes = Vec::new();
    for q in reduced_forms(idx.d.unsigned_abs()) {
        let w_q = q.automorphism_weight() as i64;
        let stab = q.stabilizer_generator();
        let mut kept: BTreeMap<(i64, i64), BQForm> = BTreeMap::new();
        for &(a, c) in &pts {
            let g = p1::lift_first_column(n, a, c);
            let f = q.act(&g);
            if f.a % n == 0 && (f.b - idx.r as i64).rem_euclid(two_n) == 0 {
                kept.insert((a, c), f);
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (&pt, &f) in &kept {
            if !seen.insert(pt) {
                continue;
            }
            let mut orbit = 1i64;
            if let Some(s) = stab {
                let mut cur = pt;
                loop {
                    let g = p1::lift_first_column(n, cur.0, cur.1);
                    let next = p1::normalize(n, s[0][0] * g[0][0] + s[0][1] * g[1][0], s[1][0] * g[0][0] + s[1][1] * g[1][0]);
                    if next == pt {
                        break;
                    }
                    debug_assert!(kept.contains_key(&next));
                    seen.insert(next);
                    orbit += 1;
                    cur = next;
                }
            }
            classes.push(HeegnerClass { form: translate_representative(f), weight: Rational64::new(orbit, w_q) });
        }
    }
    classes.sort_by_key(|c| c.form);
    let degree = classes.iter().fold(Rational64::zero(), |acc, c| acc + c.weight);
    Ok(HeegnerDivisor { index: idx, classes, degree, self_paired: idx.is_self_paired() })
}

/// Move `B` into `(-A, A]` by `x ↦ x + ky`, which lies in Γ0(N).
fn translate_representative(f: BQForm) -> BQForm {
    let k = (f.a - f.b).div_euclid(2 * f.a);
    f.act(&[[1, k], [0, 1]])
}

/// The Heegner index `(D, r) = (-4N·m0, r1)` of the special divisor `Z(m0, μ_{r1})`.
///
/// The congruence `m0 ≡ -r1²/4N (mod 1)` already forces `r1² ≡ D (mod 4N)`, and the
/// form `[N, r1, (r1² - D)/4N]` then exists, so an admissible key never gives an empty
/// divisor.
pub fn special_divisor_index(level: u64, m0: Rational64, r1: u64) -> Result<HeegnerIndex, HeegnerError> {
    if level == 0 {
        return Err(HeegnerError::ZeroLevel);
    }
    if r1 >= 2 * level {
        return Err(HeegnerError::ResidueOutOfRange { r: r1, two_n: 2 * level });
    }
    if m0 <= Rational64::zero() {
        return Err(HeegnerError::NonPositiveNorm { m0: fmt_rational(&m0) });
    }
    let four_n = 4 * level as i64;
    let shifted = m0 + Rational64::new((r1 * r1) as i64, four_n);
    if !shifted.is_integer() {
        return Err(HeegnerError::CongruenceMismatch { level, m0: fmt_rational(&m0), r1 });
    }
    let d = -(m0 * four_n).to_integer();
    HeegnerIndex::new(level, d, r1)
}

/// Hurwitz class number for a Heegner index, i.e. the expected degree when `gcd(D, N) = 1`.
pub fn expected_degree(idx: &HeegnerIndex) -> Rational64 {
    hurwitz_class_number(-idx.d).expect("D < 0")
}
