//! Divisor classes on X_N and the pullback of special divisors from the ambient
//! orthogonal Shimura variety.
//!
//! Norms are integers `n = 4N·m`. A Heegner key `(n, r1)` stands for the special divisor
//! `Z(n/4N, μ_{r1}) = P_{D,r1} + P_{D,-r1}` with `D = -n`; `Omega` is `[ω_W]` and `Cusp` is
//! the cusp `∞`. Pulling back `Z*(m, μ)` along `ι: X_N → X_V` gives
//!
//! ```text
//! ι* Z*(m, μ) = Σ_{m = m0 + m⁺} a_P(m⁺, μ⁺) · Z(m0, μ0)  +  c · Cusp,
//! ```
//!
//! with `Z(0, 0) = -Omega`, `Z(0, μ0) = 0` for `μ0 ≠ 0`, and `c` an undetermined integer.
//! The constant term is `ι* Z*(0, 0) = -2·Omega` by adjunction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{big_int, fmt_rational, isqrt};
use crate::geometry::{covering_degree, gamma_n_profile, GeometryError};
use crate::heegner::{enumerate_heegner_divisor, special_divisor_index, HeegnerError, HeegnerIndex};
use crate::lattice::{DiscElement, LatticeError};
use crate::representation::{a_p_scaled, scale_norm, RepresentationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PullbackError {
    #[error(transparent)]
    Heegner(#[from] HeegnerError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error("generator Z*({m}, ({r1}, {r2})) violates m ≡ Q(μ) mod 1 at level {level}")]
    CongruenceViolation { level: u64, m: String, r1: u64, r2: u64 },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
}

/// A Heegner key `(n, r1)` with `n = 4N·m0 = -D > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeegKey {
    pub n: u64,
    pub r1: u64,
}

impl HeegKey {
    pub fn m0(&self, level: u64) -> Rational64 {
        Rational64::new(self.n as i64, 4 * level as i64)
    }
}

/// A formal Q-linear combination of Heegner divisors, `Omega` and `Cusp` on X_N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    pub level: u64,
    pub heeg: BTreeMap<HeegKey, BigRational>,
    pub omega: BigRational,
    pub cusp: BigRational,
    /// The cusp coefficient is only known up to an integer.
    pub cusp_ambiguous: bool,
}

impl DivisorClass {
    pub fn zero(level: u64) -> Self {
        Self { level, heeg: BTreeMap::new(), omega: BigRational::zero(), cusp: BigRational::zero(), cusp_ambiguous: false }
    }

    pub fn add_heeg(&mut self, key: HeegKey, c: &BigRational) {
        let e = self.heeg.entry(key).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.heeg.remove(&key);
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &DivisorClass, c: &BigRational) {
        debug_assert_eq!(self.level, other.level);
        for (k, v) in &other.heeg {
            self.add_heeg(*k, &(v * c));
        }
        self.omega += &other.omega * c;
        self.cusp += &other.cusp * c;
        self.cusp_ambiguous |= other.cusp_ambiguous && !c.is_zero();
    }

    /// Heegner part of `self - other`.
    pub fn heeg_difference(&self, other: &DivisorClass) -> BTreeMap<HeegKey, BigRational> {
        let mut d = self.clone();
        d.add_scaled(other, &-BigRational::one());
        d.heeg
    }
}

/// `Z*(m, μ)` with `m = n/4N`; `(0, 0)` is `Z*(0, 0) = [ω_V^{-1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmbientGenerator {
    pub n: u64,
    pub mu: DiscElement,
}

impl AmbientGenerator {
    pub fn new(level: u64, m: Rational64, r1: u64, r2: u64) -> Result<Self, PullbackError> {
        let mu = DiscElement::new(level, r1, r2)?;
        let n = scale_norm(level, m)?;
        if n < 0 {
            return Err(RepresentationError::Negative(fmt_rational(&m)).into());
        }
        Self::from_scaled(n as u64, mu)
    }

    /// Checks `n ≡ r2² - r1² (mod 4N)`, i.e. `m ≡ Q(μ) mod 1`.
    pub fn from_scaled(n: u64, mu: DiscElement) -> Result<Self, PullbackError> {
        let four_n = 4 * mu.level as i64;
        let q = (mu.r2 * mu.r2) as i64 - (mu.r1 * mu.r1) as i64;
        if (n as i64 - q).rem_euclid(four_n) != 0 {
            return Err(PullbackError::CongruenceViolation {
                level: mu.level,
                m: fmt_rational(&Rational64::new(n as i64, four_n)),
                r1: mu.r1,
                r2: mu.r2,
            });
        }
        Ok(Self { n, mu })
    }

    pub fn constant(level: u64) -> Self {
        Self { n: 0, mu: DiscElement::zero(level) }
    }

    pub fn m(&self) -> Rational64 {
        Rational64::new(self.n as i64, 4 * self.mu.level as i64)
    }
}

/// `ι* Z*(m, μ)` as a divisor class on X_N.
pub fn pullback(level: u64, g: &AmbientGenerator) -> Result<DivisorClass, PullbackError> {
    if g.mu.level != level {
        return Err(PullbackError::LevelMismatch(level, g.mu.level));
    }
    let g = AmbientGenerator::from_scaled(g.n, g.mu)?;
    let mut out = DivisorClass::zero(level);
    if g.n == 0 {
        if g.mu.is_zero() {
            out.omega = big_int(-2);
        }
        return Ok(out);
    }
    out.cusp_ambiguous = true;
    let (r1, r2) = (g.mu.r1, g.mu.r2);
    for s in 0..=isqrt(g.n) {
        let n_plus = s * s;
        let a = a_p_scaled(level, n_plus, r2);
        if a == 0 {
            continue;
        }
        let a = big_int(a as i64);
        let n0 = g.n - n_plus;
        if n0 > 0 {
            out.add_heeg(HeegKey { n: n0, r1 }, &a);
        } else if r1 == 0 {
            // a_P · Z(0, 0) = -a_P · Omega
            out.omega -= a;
        }
    }
    Ok(out)
}

/// `Σ λ_g · ι* g`.
pub fn pullback_combination(level: u64, terms: &[(AmbientGenerator, BigRational)]) -> Result<DivisorClass, PullbackError> {
    let mut out = DivisorClass::zero(level);
    for (g, c) in terms {
        out.add_scaled(&pullback(level, g)?, c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackDecomposition {
    pub level: u64,
    pub target: HeegKey,
    pub index: HeegnerIndex,
    /// Sorted by generator; the generator `Z*(m0, (r1, 0))` has coefficient 1.
    pub terms: Vec<(AmbientGenerator, BigRational)>,
    pub cusp_ambiguous: bool,
}

impl PullbackDecomposition {
    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.terms.iter().find(|(g, _)| g.n == self.target.n && g.mu.r2 == 0).map(|(_, c)| c)
    }

    /// `Σ λ_g ι* g - Heeg(target)`; its Heegner part must vanish.
    pub fn residual(&self) -> Result<DivisorClass, PullbackError> {
        let mut total = pullback_combination(self.level, &self.terms)?;
        total.add_heeg(self.target, &-BigRational::one());
        Ok(total)
    }
}

/// Express `Heeg(m0, μ_{r1})` as a pullback.
///
/// Only `μ⁺ = 0` generators are used. With `s = 2Nk`,
/// `ι* Z*(n, (r1, 0)) = Heeg(n) + Σ_{k ≥ 1} 2·Heeg(n - 4N²k²)`, where a vanishing argument
/// stands for `Z(0, μ_{r1})`, which is `½ ι* Z*(0, 0)` when `r1 = 0` and `0` otherwise.
/// Inverting this triangular system gives `Heeg(n) = Σ_j c_j ι* Z*(n - 4N²j, (r1, 0))`, where
/// `Σ c_j q^j` is the inverse of `1 + 2 Σ_{k ≥ 1} q^{k²}`.
pub fn decompose_heegner(level: u64, m0: Rational64, r1: u64) -> Result<PullbackDecomposition, PullbackError> {
    let index = special_divisor_index(level, m0, r1)?;
    let target = HeegKey { n: index.d.unsigned_abs(), r1 };
    let step = 4 * level * level;
    let coeffs = inverse_theta(target.n / step);
    let mu = DiscElement::new(level, r1, 0)?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut terms: BTreeMap<AmbientGenerator, BigRational> = BTreeMap::new();
    for (j, c) in coeffs.into_iter().enumerate() {
        let n = target.n - j as u64 * step;
        let (g, scale) = if n > 0 {
            (AmbientGenerator::from_scaled(n, mu)?, BigRational::one())
        } else if r1 == 0 {
            (AmbientGenerator::constant(level), half.clone())
        } else {
            continue;
        };
        *terms.entry(g).or_insert_with(BigRational::zero) += BigRational::from_integer(c) * scale;
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(PullbackDecomposition { level, target, index, terms: terms.into_iter().collect(), cusp_ambiguous: true })
}

/// Coefficients `c_0..=c_len` of `1 / (1 + 2 Σ_{k ≥ 1} q^{k²})`.
fn inverse_theta(len: u64) -> Vec<BigInt> {
    let len = len as usize;
    let mut c: Vec<BigInt> = Vec::with_capacity(len + 1);
    c.push(BigInt::from(1));
    for j in 1..=len {
        let mut acc = BigInt::zero();
        let mut k = 1;
        while k * k <= j {
            acc += &c[j - k * k];
            k += 1;
        }
        c.push(acc * -2);
    }
    c
}

/// Total degree on X_N of the special divisor `Z(m0, μ_{r1})`:
/// `[X_N : X0(N)] · (deg P_{D,r} + deg P_{D,-r})`.
pub fn degree_on_xn(level: u64, key: HeegKey) -> Result<BigRational, PullbackError> {
    let idx = HeegnerIndex::new(level, -(key.n as i64), key.r1)?;
    let deg = enumerate_heegner_divisor(&idx)?.special_divisor_degree();
    let cov = covering_degree(level)?;
    Ok(crate::arith::big(deg) * big_int(cov as i64))
}

/// The class `Heeg(m0, μ0) - d1·(∞)` of degree zero attached to a decomposition, with the
/// canonical-class reduction applied.
pub fn chow_heegner_from_decomposition(level: u64, d: &PullbackDecomposition) -> Result<DivisorClass, PullbackError> {
    if d.level != level {
        return Err(PullbackError::LevelMismatch(level, d.level));
    }
    let mut out = DivisorClass::zero(level);
    out.add_heeg(d.target, &BigRational::one());
    out.cusp = -degree_on_xn(level, d.target)?;
    let genus = gamma_n_profile(level)?.genus;
    Ok(reduce_canonical(&out, genus))
}

/// On a torsion-free curve of genus `g ≥ 2`, `Omega = (2g - 2)·(∞)` in CH¹ ⊗ Q; below genus 2
/// the class is returned unchanged.
pub fn reduce_canonical(class: &DivisorClass, genus: u64) -> DivisorClass {
    let mut out = class.clone();
    if genus >= 2 && !out.omega.is_zero() {
        out.cusp += &out.omega * big_int(2 * genus as i64 - 2);
        out.omega = BigRational::zero();
    }
    out
}

/// Sum of the Heegner and cusp degrees; `None` when an `Omega` term remains.
pub fn degree(class: &DivisorClass) -> Result<Option<BigRational>, PullbackError> {
    if !class.omega.is_zero() {
        return Ok(None);
    }
    let mut total = class.cusp.clone();
    for (k, c) in &class.heeg {
        total += c * degree_on_xn(class.level, *k)?;
    }
    Ok(Some(total))
}

// JSON views.

fn big_str(q: &BigRational) -> String {
    fmt_rational(q)
}

#[derive(Serialize)]
struct HeegTermView {
    m0: String,
    r1: u64,
    d: i64,
    coeff: String,
}

#[derive(Serialize)]
struct DivisorClassView {
    level: u64,
    heeg_coeffs: Vec<HeegTermView>,
    omega_coeff: String,
    cusp_coeff: String,
    cusp_ambiguous: bool,
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DivisorClassView {
            level: self.level,
            heeg_coeffs: self
                .heeg
                .iter()
                .map(|(k, c)| HeegTermView {
                    m0: fmt_rational(&k.m0(self.level)),
                    r1: k.r1,
                    d: -(k.n as i64),
                    coeff: big_str(c),
                })
                .collect(),
            omega_coeff: big_str(&self.omega),
            cusp_coeff: big_str(&self.cusp),
            cusp_ambiguous: self.cusp_ambiguous,
        }
        .serialize(s)
    }
}

#[derive(Serialize)]
struct GeneratorView {
    m: String,
    r1: u64,
    r2: u64,
    coeff: String,
}

#[derive(Serialize)]
struct DecompositionView {
    level: u64,
    target: TargetView,
    terms: Vec<GeneratorView>,
    cusp_ambiguous: bool,
}

#[derive(Serialize)]
struct TargetView {
    m0: String,
    r1: u64,
    d: i64,
}

impl Serialize for PullbackDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DecompositionView {
            level: self.level,
            target: TargetView {
                m0: fmt_rational(&self.target.m0(self.level)),
                r1: self.target.r1,
                d: -(self.target.n as i64),
            },
            terms: self
                .terms
                .iter()
                .map(|(g, c)| GeneratorView { m: fmt_rational(&g.m()), r1: g.mu.r1, r2: g.mu.r2, coeff: big_str(c) })
                .collect(),
            cusp_ambiguous: self.cusp_ambiguous,
        }
        .serialize(s)
    }
}

/// All Heegner keys `(n, r1)` at level `N` with `n ≤ max_n`.
pub fn heegner_keys(level: u64, max_n: u64) -> Vec<HeegKey> {
    let four_n = 4 * level;
    let mut out = Vec::new();
    for n in 1..=max_n {
        for r1 in 0..2 * level {
            if (n + r1 * r1) % four_n == 0 {
                out.push(HeegKey { n, r1 });
            }
        }
    }
    out
}

/// True when every coefficient is a nonnegative integer.
pub fn is_effective_integral(class: &DivisorClass) -> bool {
    class.heeg.values().all(|c| c.is_integer() && !c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn inverse_theta_is_signed_overpartitions() {
        let overpartitions = [1, 2, 4, 8, 14, 24, 40, 64, 100, 154, 232];
        let c = inverse_theta(10);
        for (j, p) in overpartitions.iter().enumerate() {
            assert_eq!(c[j], BigInt::from(if j % 2 == 0 { *p } else { -*p }), "j={j}");
        }
    }

    #[test]
    fn constant_term_is_adjunction() {
        let c = pullback(1, &AmbientGenerator::constant(1)).unwrap();
        assert_eq!(c.omega, big_int(-2));
        assert!(c.heeg.is_empty());
        assert!(!c.cusp_ambiguous);
    }

    #[test]
    fn small_pullbacks() {
        let g = AmbientGenerator::new(1, Rational64::from_integer(1), 0, 0).unwrap();
        let c = pullback(1, &g).unwrap();
        assert_eq!(c.heeg, BTreeMap::from([(HeegKey { n: 4, r1: 0 }, big_int(1))]));
        assert_eq!(c.omega, big_int(-2));
        assert!(c.cusp_ambiguous);

        let g = AmbientGenerator::new(1, Rational64::new(1, 4), 0, 1).unwrap();
        let c = pullback(1, &g).unwrap();
        assert!(c.heeg.is_empty());
        assert_eq!(c.omega, big_int(-2));

        // m = 0, μ ≠ 0 pulls back to nothing.
        let g = AmbientGenerator::from_scaled(0, DiscElement::new(2, 2, 2).unwrap()).unwrap();
        assert_eq!(pullback(2, &g).unwrap(), DivisorClass::zero(2));
    }

    #[test]
    fn congruence_is_enforced() {
        assert!(matches!(
            AmbientGenerator::new(1, Rational64::new(1, 2), 0, 0),
            Err(PullbackError::CongruenceViolation { .. })
        ));
    }

    #[test]
    fn small_decompositions() {
        let d = decompose_heegner(1, Rational64::from_integer(1), 0).unwrap();
        assert_eq!(
            d.terms,
            vec![
                (AmbientGenerator::constant(1), big_int(-1)),
                (AmbientGenerator::new(1, Rational64::from_integer(1), 0, 0).unwrap(), big_int(1)),
            ]
        );
        let d = decompose_heegner(1, Rational64::new(3, 4), 1).unwrap();
        assert_eq!(d.terms, vec![(AmbientGenerator::new(1, Rational64::new(3, 4), 1, 0).unwrap(), big_int(1))]);
        assert!(d.residual().unwrap().heeg.is_empty());
    }

    #[test]
    fn round_trip_cancels_omega_too() {
        for m0 in [1i64, 2, 4, 5, 9] {
            let d = decompose_heegner(1, Rational64::from_integer(m0), 0).unwrap();
            let res = d.residual().unwrap();
            assert!(res.heeg.is_empty());
            assert!(res.omega.is_zero());
            assert_eq!(d.leading_coefficient(), Some(&big_int(1)));
        }
    }

    #[test]
    fn chow_heegner_has_degree_zero() {
        let d = decompose_heegner(1, Rational64::new(3, 4), 1).unwrap();
        let c = chow_heegner_from_decomposition(1, &d).unwrap();
        // [X_1 : X0(1)] = 6 and deg(P_{-3,1} + P_{-3,-1}) = 2/3.
        assert_eq!(c.cusp, big_int(-4));
        assert!(!c.cusp_ambiguous);
        assert_eq!(degree(&c).unwrap(), Some(BigRational::zero()));
    }

    #[test]
    fn canonical_reduction() {
        let mut c = DivisorClass::zero(5);
        c.omega = r(1, 2);
        let red = reduce_canonical(&c, 3);
        assert!(red.omega.is_zero());
        assert_eq!(red.cusp, big_int(2));
        assert_eq!(reduce_canonical(&c, 1), c);
    }
}
