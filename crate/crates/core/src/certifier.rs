//! Decidable sufficient criteria for the Ceresa cycle of Jac(X_N) and the
//! Gross–Kudla–Schoen cycle of X_N³ to be nontrivial, packaged as auditable certificates.
//!
//! A certificate is proven-nontrivial when one of these holds:
//! - (B) `N > B`, with `B` the product bound below;
//! - (A1) some prime `p | N` with `p ∈ {37, 43, 53, 61, 67}` or `p > 71`;
//! - (A2) some prime `p ≥ 11` with `p² | N`;
//! - (analytic) some `M | N` carries a newform with root number -1 and `L'(f, 1) ≠ 0`.
//!
//! The criteria are sufficient, never necessary: `unknown` asserts nothing.

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::arith::factorize_u128;
use crate::geometry::{gamma_n_profile_bounded, CurveProfile, DEFAULT_ENUMERATION_BOUND};
use crate::heegner::{enumerate_heegner_divisor, heegner_r_values, HeegnerIndex};
use crate::newforms::{witness_minus_rank1, IndeterminateLevel, NewformSource, Witness};
use crate::pullback::decompose_heegner;

/// Primes `p ≤ 71` for which `p | N` alone suffices.
pub const A1_SMALL_PRIMES: [u128; 5] = [37, 43, 53, 61, 67];

/// Levels above this do not get an auxiliary Heegner chain in analytic certificates.
pub const HEEGNER_CHAIN_MAX_LEVEL: u128 = 5_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("level must be positive")]
    ZeroLevel,
}

/// `2⁶ · 3⁴ · 5² · 7² · ∏ p` over primes `11 ≤ p ≤ 71` other than 37, 43, 53, 61, 67.
pub fn bound_b() -> u128 {
    bound_b_primes().iter().fold(2u128.pow(6) * 3u128.pow(4) * 5u128.pow(2) * 7u128.pow(2), |acc, p| acc * p)
}

pub fn bound_b_primes() -> Vec<u128> {
    (11u128..=71)
        .filter(|&p| crate::arith::is_prime(p as u64) && !A1_SMALL_PRIMES.contains(&p))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ProvenNontrivial,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Clause {
    #[serde(rename = "A1_prime")]
    A1Prime,
    #[serde(rename = "A2_prime_square")]
    A2PrimeSquare,
    #[serde(rename = "B_bound")]
    BBound,
    #[serde(rename = "analytic_witness")]
    AnalyticWitness,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessEntry {
    Prime { clause: Clause, p: u128 },
    Bound { clause: Clause, bound: String },
    Newform { clause: Clause, level: u64, label: String, analytic_rank: u32, fricke_sign: i8, source: crate::newforms::Source },
}

impl Clause {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::A1Prime => "A1_prime",
            Self::A2PrimeSquare => "A2_prime_square",
            Self::BBound => "B_bound",
            Self::AnalyticWitness => "analytic_witness",
            Self::None => "none",
        }
    }
}

impl WitnessEntry {
    pub fn clause(&self) -> Clause {
        match self {
            Self::Prime { clause, .. } | Self::Bound { clause, .. } | Self::Newform { clause, .. } => *clause,
        }
    }
}

/// What the newform scan found, including levels it could not decide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyticScan {
    pub consulted: bool,
    pub indeterminate: Vec<IndeterminateLevel>,
}

/// A Heegner divisor on X_N with `gcd(D, N) = 1` and its pullback decomposition, the input
/// to the Chow–Heegner construction in the analytic case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeegnerChain {
    pub d: i64,
    pub r: u64,
    #[serde(serialize_with = "crate::arith::serde_rational::serialize")]
    pub degree: Rational64,
    pub generators: usize,
    pub round_trip_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub level: u128,
    pub verdict: Verdict,
    pub clause: Clause,
    pub witnesses: Vec<WitnessEntry>,
    pub curve_profile: Option<CurveProfile>,
    pub analytic: AnalyticScan,
    pub heegner_chain: Option<HeegnerChain>,
    pub justification: String,
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Largest `2N` for which the X_N profile is enumerated.
    pub enumeration_bound: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { enumeration_bound: DEFAULT_ENUMERATION_BOUND }
    }
}

pub fn certify(n: u128, source: Option<&dyn NewformSource>) -> Result<Certificate, CertifyError> {
    certify_with(n, source, CertifyOptions::default())
}

/// Evaluate every clause; the reported clause is the first firing one in the order
/// B, A1, A2, analytic.
pub fn certify_with(n: u128, source: Option<&dyn NewformSource>, opts: CertifyOptions) -> Result<Certificate, CertifyError> {
    if n == 0 {
        return Err(CertifyError::ZeroLevel);
    }
    let mut witnesses = Vec::new();
    let b = bound_b();
    if n > b {
        witnesses.push(WitnessEntry::Bound { clause: Clause::BBound, bound: b.to_string() });
    }
    let factors = factorize_u128(n);
    for &p in factors.keys() {
        if A1_SMALL_PRIMES.contains(&p) || p > 71 {
            witnesses.push(WitnessEntry::Prime { clause: Clause::A1Prime, p });
        }
    }
    for (&p, &e) in &factors {
        if p >= 11 && e >= 2 {
            witnesses.push(WitnessEntry::Prime { clause: Clause::A2PrimeSquare, p });
        }
    }
    let mut analytic = AnalyticScan { consulted: false, indeterminate: Vec::new() };
    if let Some(src) = source {
        let scan = witness_minus_rank1(n, src);
        analytic = AnalyticScan { consulted: true, indeterminate: scan.indeterminate };
        if let Some(Witness { level, record }) = scan.witness {
            witnesses.push(WitnessEntry::Newform {
                clause: Clause::AnalyticWitness,
                level,
                label: record.label,
                analytic_rank: record.analytic_rank.unwrap_or(1),
                fricke_sign: record.fricke_sign,
                source: record.source,
            });
        }
    }
    let clause = [Clause::BBound, Clause::A1Prime, Clause::A2PrimeSquare, Clause::AnalyticWitness]
        .into_iter()
        .find(|c| witnesses.iter().any(|w| w.clause() == *c))
        .unwrap_or(Clause::None);
    let verdict = if clause == Clause::None { Verdict::Unknown } else { Verdict::ProvenNontrivial };
    let curve_profile = u64::try_from(n).ok().and_then(|l| gamma_n_profile_bounded(l, opts.enumeration_bound).ok());
    let heegner_chain = if clause == Clause::AnalyticWitness && n <= HEEGNER_CHAIN_MAX_LEVEL {
        heegner_chain(n as u64)
    } else {
        None
    };
    let mut cert = Certificate {
        level: n,
        verdict,
        clause,
        witnesses,
        curve_profile,
        analytic,
        heegner_chain,
        justification: String::new(),
    };
    cert.justification = explain(&cert);
    Ok(cert)
}

/// Smallest `|D|` with `gcd(D, N) = 1` admitting a Heegner index at level `N`, with its
/// decomposition checked by round trip.
pub fn heegner_chain(level: u64) -> Option<HeegnerChain> {
    let n = level as i64;
    (3..=4 * n * n + 4).find_map(|abs_d| {
        let d = -abs_d;
        if !matches!(d.rem_euclid(4), 0 | 1) || crate::arith::gcd(d, n) != 1 {
            return None;
        }
        let r = *heegner_r_values(level, d).first()?;
        let idx = HeegnerIndex::new(level, d, r).ok()?;
        let degree = enumerate_heegner_divisor(&idx).ok()?.degree;
        let dec = decompose_heegner(level, idx.m0(), r).ok()?;
        let round_trip_exact = dec.residual().ok()?.heeg.is_empty();
        Some(HeegnerChain { d, r, degree, generators: dec.terms.len(), round_trip_exact })
    })
}

/// Human-readable account of a certificate.
pub fn explain(cert: &Certificate) -> String {
    let mut out = String::new();
    let n = cert.level;
    match cert.clause {
        Clause::None => {
            out.push_str(&format!(
                "N = {n}: unknown. No criterion applies: N ≤ B, N has no prime factor in {{37, 43, 53, 61, 67}} or above 71, no p² | N with p ≥ 11"
            ));
            if cert.analytic.consulted {
                out.push_str(", and no divisor of N carries a newform with root number -1 and analytic rank 1 in the consulted data");
                if !cert.analytic.indeterminate.is_empty() {
                    let levels: Vec<_> = cert.analytic.indeterminate.iter().map(|l| l.level.as_str()).collect();
                    out.push_str(&format!(" (undecided levels: {})", levels.join(", ")));
                }
            } else {
                out.push_str("; newform data was not consulted");
            }
            out.push_str(". The criteria are sufficient only, so this does not mean the cycles are trivial.");
        }
        Clause::BBound => out.push_str(&format!(
            "N = {n}: proven nontrivial because N exceeds B = 2^6·3^4·5^2·7^2·∏ p (11 ≤ p ≤ 71, p ∉ {{37, 43, 53, 61, 67}}) = {}.",
            bound_b()
        )),
        Clause::A1Prime => {
            let ps: Vec<_> = primes_for(cert, Clause::A1Prime);
            out.push_str(&format!(
                "N = {n}: proven nontrivial because N is divisible by the prime {}, which lies in {{37, 43, 53, 61, 67}} or exceeds 71.",
                ps.join(", ")
            ));
        }
        Clause::A2PrimeSquare => {
            let ps: Vec<_> = primes_for(cert, Clause::A2PrimeSquare);
            out.push_str(&format!(
                "N = {n}: proven nontrivial because p² divides N for the prime p = {} ≥ 11.",
                ps.join(", ")
            ));
        }
        Clause::AnalyticWitness => {
            if let Some(WitnessEntry::Newform { level, label, source, .. }) =
                cert.witnesses.iter().find(|w| w.clause() == Clause::AnalyticWitness)
            {
                out.push_str(&format!(
                    "N = {n}: proven nontrivial via the newform {label} of level {level} dividing N, which has root number -1 (so it is fixed by the Fricke involution) and analytic rank 1, hence L'(f, 1) ≠ 0; the property passes from level {level} to every multiple. Analytic ranks are taken from {} data and not verified here.",
                    match source {
                        crate::newforms::Source::Online => "online database",
                        crate::newforms::Source::Cache => "cached database",
                        crate::newforms::Source::Fixture => "bundled",
                    }
                ));
            }
        }
    }
    if cert.verdict == Verdict::ProvenNontrivial {
        let others: std::collections::BTreeSet<&str> = cert
            .witnesses
            .iter()
            .filter(|w| w.clause() != cert.clause)
            .map(|w| w.clause().as_str())
            .collect();
        if !others.is_empty() {
            out.push_str(&format!(" Other criteria that also apply: {}.", others.into_iter().collect::<Vec<_>>().join(", ")));
        }
        out.push_str(
            " This covers the Gross–Kudla–Schoen cycle in CH²(X_N³) and the Ceresa cycle in CH^{g-1}(Jac X_N); nonvanishing of the Abel–Jacobi image does not depend on the base point, so the conclusion holds for every base point.",
        );
    }
    match &cert.curve_profile {
        Some(p) => out.push_str(&format!(
            " X_N: index {}, {} cusps, genus {}.",
            p.index.unwrap_or(0),
            p.cusps.unwrap_or(0),
            p.genus
        )),
        None => out.push_str(" X_N profile not enumerated (level above the enumeration bound)."),
    }
    out
}

fn primes_for(cert: &Certificate, clause: Clause) -> Vec<String> {
    cert.witnesses
        .iter()
        .filter_map(|w| match w {
            WitnessEntry::Prime { clause: c, p } if *c == clause => Some(p.to_string()),
            _ => None,
        })
        .collect()
}
