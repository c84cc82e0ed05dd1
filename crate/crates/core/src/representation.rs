//! Representation numbers of the rank-one lattice `P = Z·I_2` with `Q(a I_2) = N a²`.
//!
//! Norms are carried as integers `n` with `m = n / 4N`; the coset `μ⁺ + P` consists of
//! `((r2 + 2Nk) / 2N) I_2`, whose norm is `(r2 + 2Nk)² / 4N`.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::exact_sqrt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepresentationError {
    #[error("level must be positive")]
    ZeroLevel,
    #[error("norm {0} is negative")]
    Negative(String),
    #[error("norm {value} has denominator not dividing 4N = {four_n}")]
    BadDenominator { value: String, four_n: u64 },
}

/// Scale `m` to the integer `4N·m`, checking the denominator.
pub fn scale_norm(level: u64, m: Rational64) -> Result<i64, RepresentationError> {
    if level == 0 {
        return Err(RepresentationError::ZeroLevel);
    }
    let four_n = 4 * level as i64;
    let scaled = m * Rational64::from_integer(four_n);
    if !scaled.is_integer() {
        return Err(RepresentationError::BadDenominator {
            value: crate::arith::fmt_rational(&m),
            four_n: four_n as u64,
        });
    }
    Ok(scaled.to_integer())
}

/// `a_P(m⁺, μ⁺)` for `m⁺ = n / 4N`: the number of `k ∈ Z` with `(r2 + 2Nk)² = n`.
pub fn a_p_scaled(level: u64, n: u64, r2: u64) -> u32 {
    let two_n = 2 * level;
    let Some(s) = exact_sqrt(n) else { return 0 };
    let r2 = r2 % two_n;
    if s == 0 {
        return u32::from(r2 == 0);
    }
    let s = s % two_n;
    u32::from(s == r2) + u32::from((s + r2).is_multiple_of(two_n))
}

/// `a_P(m⁺, μ⁺)` with `m⁺` given as an exact rational.
pub fn a_p(level: u64, m_plus: Rational64, r2: u64) -> Result<u32, RepresentationError> {
    if m_plus.is_negative() {
        return Err(RepresentationError::Negative(crate::arith::fmt_rational(&m_plus)));
    }
    let n = scale_norm(level, m_plus)?;
    debug_assert!(!n.is_negative() || n.is_zero());
    Ok(a_p_scaled(level, n as u64, r2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepCount {
    #[serde(with = "crate::arith::serde_rational")]
    pub m_plus: Rational64,
    pub mu_plus: u64,
    pub count: u32,
}

pub fn rep_count(level: u64, m_plus: Rational64, r2: u64) -> Result<RepCount, RepresentationError> {
    Ok(RepCount { m_plus, mu_plus: r2, count: a_p(level, m_plus, r2)? })
}
