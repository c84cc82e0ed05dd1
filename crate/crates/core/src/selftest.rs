//! Built-in consistency suites: each checks library output against an independent
//! computation and reports pass/fail counts.

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::divisors;
use crate::forms::hurwitz_class_number;
use crate::geometry::{fricke_fixed_points, x0_profile, x0_star_genus};
use crate::pullback::{decompose_heegner, heegner_keys};

const MAX_REPORTED_FAILURES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), passed: 0, failed: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }
}

/// `Σ_{r² ≤ 4n} H(4n - r²) = Σ_{d | n} max(d, n/d)` for `1 ≤ n ≤ max_n`, with `H(0) = -1/12`.
pub fn eichler_suite(max_n: u64) -> SuiteResult {
    let mut s = SuiteResult::new("eichler_relation");
    for n in 1..=max_n {
        let four_n = 4 * n as i64;
        let mut lhs = Rational64::zero();
        let mut r = -(crate::arith::isqrt(4 * n) as i64);
        while r * r <= four_n {
            let arg = four_n - r * r;
            lhs += if arg == 0 { Rational64::new(-1, 12) } else { hurwitz_class_number(arg).expect("positive") };
            r += 1;
        }
        let rhs: u64 = divisors(n).into_iter().map(|d| d.max(n / d)).sum();
        s.check(lhs == Rational64::from_integer(rhs as i64), || format!("n={n}: {lhs} != {rhs}"));
    }
    s
}

/// Genus of X0*(p) against the list of genus-one primes up to 131, plus the
/// Riemann–Hurwitz count for every prime `5 ≤ p ≤ 131`.
pub fn genus_table_suite() -> SuiteResult {
    const GENUS_ONE: [u64; 9] = [37, 43, 53, 61, 79, 83, 89, 101, 131];
    const GENUS_AT_LEAST_TWO: [u64; 8] = [67, 73, 97, 103, 107, 109, 113, 127];
    let mut s = SuiteResult::new("genus_table");
    for p in (2..=131u64).filter(|&p| crate::arith::is_prime(p)) {
        let g = x0_star_genus(p).expect("prime");
        let ok = if GENUS_ONE.contains(&p) {
            g == 1
        } else if GENUS_AT_LEAST_TWO.contains(&p) {
            g >= 2
        } else {
            g == 0
        };
        s.check(ok, || format!("p={p}: genus of X0*(p) = {g}"));
        if p >= 5 {
            let g0 = x0_profile(p).expect("positive").genus as i64;
            let nu = fricke_fixed_points(p).expect("prime") as i64;
            s.check(2 * g0 - 2 == 2 * (2 * g as i64 - 2) + nu, || format!("p={p}: Riemann–Hurwitz fails"));
        }
    }
    s.check(x0_profile(37).map(|p| p.genus) == Ok(2), || "X0(37) is not genus 2".into());
    s
}

/// Decompose every Heegner key with `4N·m0 ≤ max_n` and pull back the result.
pub fn round_trip_suite(levels: &[u64], max_n: u64) -> SuiteResult {
    let mut s = SuiteResult::new("pullback_round_trip");
    for &level in levels {
        for key in heegner_keys(level, max_n) {
            let res = decompose_heegner(level, key.m0(level), key.r1).and_then(|d| {
                let lead_ok = d.leading_coefficient().is_some_and(num_traits::One::is_one);
                d.residual().map(|r| lead_ok && r.heeg.is_empty())
            });
            s.check(res == Ok(true), || format!("N={level} n={} r1={}: {res:?}", key.n, key.r1));
        }
    }
    s
}

pub fn run_all() -> SelftestReport {
    SelftestReport { suites: vec![eichler_suite(200), genus_table_suite(), round_trip_suite(&[1, 2, 3, 5, 6], 400)] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(eichler_suite(30).ok());
        assert!(round_trip_suite(&[1, 2], 60).ok());
    }
}
