//! Indices, elliptic points, cusps and genera of X0(N), X_N = X(Γ1(2N) ∩ Γ(2)) and the
//! Fricke quotient X0*(p).

pub mod cosets;
pub mod p1;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, euler_phi, factorize, gcd, is_prime, kronecker_prime};
use crate::forms::class_number;
use cosets::{enumerate, CosetData, Unipotent};

/// Largest modulus `2N` for which Γ_N is enumerated by default.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 120;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("level must be positive")]
    ZeroLevel,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("2N = {modulus} exceeds the enumeration bound {bound}")]
    TooLarge { modulus: u64, bound: u64 },
    #[error("genus formula is not integral for {0}")]
    NonIntegralGenus(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveLabel {
    X0,
    X0star,
    XN,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveProfile {
    pub label: CurveLabel,
    pub level: u64,
    /// Index in PSL2(Z); absent for X0*(p).
    pub index: Option<u64>,
    pub nu2: Option<u64>,
    pub nu3: Option<u64>,
    pub cusps: Option<u64>,
    pub genus: u64,
    /// Fixed points of the Fricke involution on X0(p); only for X0*(p).
    pub fricke_fixed_points: Option<u64>,
}

impl CurveProfile {
    fn from_cosets(label: CurveLabel, level: u64, d: &CosetData) -> Result<Self, GeometryError> {
        let genus = d.genus().ok_or_else(|| GeometryError::NonIntegralGenus(format!("{label:?}({level})")))?;
        Ok(Self {
            label,
            level,
            index: Some(d.index),
            nu2: Some(d.nu2),
            nu3: Some(d.nu3),
            cusps: Some(d.cusps),
            genus,
            fricke_fixed_points: None,
        })
    }
}

/// X_N by enumerating cosets of `±{(1, b; 0, 1) : b even}` in SL2(Z/2N).
pub fn gamma_n_profile(level: u64) -> Result<CurveProfile, GeometryError> {
    gamma_n_profile_bounded(level, DEFAULT_ENUMERATION_BOUND)
}

pub fn gamma_n_profile_bounded(level: u64, bound: u64) -> Result<CurveProfile, GeometryError> {
    if level == 0 {
        return Err(GeometryError::ZeroLevel);
    }
    let modulus = 2 * level;
    if modulus > bound {
        return Err(GeometryError::TooLarge { modulus, bound });
    }
    let d = enumerate(&Unipotent { modulus: modulus as i64, step: 2, plus_minus: true });
    CurveProfile::from_cosets(CurveLabel::XN, level, &d)
}

/// `[SL2(Z/M) : image of Γ_N]` (without `±1`) computed one prime power at a time.
pub fn gamma_n_index_by_crt(level: u64) -> u64 {
    factorize(2 * level)
        .into_iter()
        .map(|(p, e)| {
            let q = p.pow(e as u32) as i64;
            let step = if p == 2 { 2 } else { 1 };
            enumerate(&Unipotent { modulus: q, step, plus_minus: false }).index
        })
        .product()
}

/// `[SL2(Z/2N) : image of Γ_N]` (without `±1`) at the full modulus.
pub fn gamma_n_index_direct(level: u64) -> u64 {
    enumerate(&Unipotent { modulus: 2 * level as i64, step: 2, plus_minus: false }).index
}

/// X0(N) from the classical closed formulas.
pub fn x0_profile(level: u64) -> Result<CurveProfile, GeometryError> {
    if level == 0 {
        return Err(GeometryError::ZeroLevel);
    }
    let f = factorize(level);
    let index = f.iter().fold(level, |acc, (p, _)| acc / p * (p + 1));
    let nu = |d: i64, square: u64| -> u64 {
        if level.is_multiple_of(square) {
            return 0;
        }
        f.keys().map(|&p| (1 + kronecker_prime(d, p)) as u64).product()
    };
    let cusps = divisors(level)
        .into_iter()
        .map(|d| euler_phi(gcd(d as i64, (level / d) as i64) as u64))
        .sum();
    let data = CosetData { index, nu2: nu(-4, 4), nu3: nu(-3, 9), cusps };
    CurveProfile::from_cosets(CurveLabel::X0, level, &data)
}

/// X0(N) by coset enumeration; an independent check on [`x0_profile`].
pub fn x0_profile_enumerated(level: u64) -> Result<CurveProfile, GeometryError> {
    if level == 0 {
        return Err(GeometryError::ZeroLevel);
    }
    CurveProfile::from_cosets(CurveLabel::X0, level, &enumerate(&cosets::Gamma0(level as i64)))
}

/// Number of fixed points of `w_p` on X0(p): `h(-4p)`, plus `h(-p)` when `p ≡ 3 (mod 4)`.
pub fn fricke_fixed_points(p: u64) -> Result<u64, GeometryError> {
    if !is_prime(p) {
        return Err(GeometryError::NotPrime(p));
    }
    let p_i = p as i64;
    let mut nu = class_number(4 * p_i).expect("positive");
    if p % 4 == 3 {
        nu += class_number(p_i).expect("positive");
    }
    Ok(nu)
}

/// Genus of X0*(p) from Riemann–Hurwitz: `2 g0 - 2 = 2 (2 g* - 2) + ν`.
pub fn x0_star_genus(p: u64) -> Result<u64, GeometryError> {
    Ok(x0_star_profile(p)?.genus)
}

pub fn x0_star_profile(p: u64) -> Result<CurveProfile, GeometryError> {
    if !is_prime(p) {
        return Err(GeometryError::NotPrime(p));
    }
    let base = CurveProfile {
        label: CurveLabel::X0star,
        level: p,
        index: None,
        nu2: None,
        nu3: None,
        cusps: Some(1),
        genus: 0,
        fricke_fixed_points: None,
    };
    // X0(2) and X0(3) have genus 0; the class-number count degenerates there.
    if p <= 3 {
        return Ok(base);
    }
    let g0 = x0_profile(p)?.genus as i64;
    let nu = fricke_fixed_points(p)?;
    let num = 2 * g0 + 2 - nu as i64;
    if num < 0 || num % 4 != 0 {
        return Err(GeometryError::NonIntegralGenus(format!("X0*({p})")));
    }
    Ok(CurveProfile { genus: (num / 4) as u64, fricke_fixed_points: Some(nu), ..base })
}

/// `dim S_2^new(Γ0(p))^-`, the forms with root number -1, which pull back from X0*(p).
pub fn minus_newspace_dim(p: u64) -> Result<u64, GeometryError> {
    x0_star_genus(p)
}

/// `dim S_2^new(Γ0(M)) = Σ_{d | M} β(M/d) g0(d)` with `β` multiplicative,
/// `β(p) = -2`, `β(p²) = 1` and `β(p^k) = 0` for `k ≥ 3`.
pub fn newspace_dim(level: u64) -> Result<u64, GeometryError> {
    if level == 0 {
        return Err(GeometryError::ZeroLevel);
    }
    let beta = |m: u64| -> i64 {
        factorize(m)
            .values()
            .map(|&e| match e {
                1 => -2,
                2 => 1,
                _ => 0,
            })
            .product()
    };
    let mut total = 0i64;
    for d in divisors(level) {
        total += beta(level / d) * x0_profile(d)?.genus as i64;
    }
    Ok(total as u64)
}

/// `[X_N : X0(N)] = [PSL2(Z) : Γ_N] / [PSL2(Z) : Γ0(N)]`.
pub fn covering_degree(level: u64) -> Result<u64, GeometryError> {
    let xn = gamma_n_profile(level)?.index.expect("enumerated");
    let x0 = x0_profile(level)?.index.expect("formula");
    Ok(xn / x0)
}
