//! Positive definite binary quadratic forms `[a, b, c] = a x² + b xy + c y²` and the
//! class numbers built from them.

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::gcd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassNumberError {
    #[error("class numbers need a positive argument, got {0}")]
    NonPositive(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BQForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Integer 2x2 matrix `[[a, b], [c, d]]` acting on forms by substitution.
pub type IntMat = [[i64; 2]; 2];

impl BQForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// `(Q ∘ g)(x, y) = Q(αx + βy, γx + δy)` for `g = [[α, β], [γ, δ]]`.
    pub fn act(&self, g: &IntMat) -> Self {
        let [[al, be], [ga, de]] = *g;
        Self {
            a: self.eval(al, ga),
            b: 2 * self.a * al * be + self.b * (al * de + be * ga) + 2 * self.c * ga * de,
            c: self.eval(be, de),
        }
    }

    /// Reduced in the usual sense: `|b| <= a <= c`, and `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a
            && self.a <= self.c
            && !(self.b < 0 && (self.b.abs() == self.a || self.a == self.c))
    }

    /// SL2(Z)-reduction of a positive definite form.
    pub fn reduce(&self) -> Self {
        let mut f = *self;
        loop {
            // Translate b into (-a, a].
            let two_a = 2 * f.a;
            let k = (f.a - f.b).div_euclid(two_a);
            if k != 0 {
                f = f.act(&[[1, k], [0, 1]]);
            }
            if f.a > f.c {
                f = Self::new(f.c, -f.b, f.a);
                continue;
            }
            if f.a == f.c && f.b < 0 {
                f.b = -f.b;
            }
            return f;
        }
    }

    /// `|Aut(Q)/±1|` for a reduced form: 2 for `a(x² + y²)`, 3 for `a(x² + xy + y²)`, else 1.
    pub fn automorphism_weight(&self) -> u32 {
        debug_assert!(self.is_reduced());
        if self.a == self.c && self.b == self.a {
            3
        } else if self.a == self.c && self.b == 0 {
            2
        } else {
            1
        }
    }

    /// Generator of the stabiliser of a reduced form modulo ±1, if nontrivial.
    pub fn stabilizer_generator(&self) -> Option<IntMat> {
        match self.automorphism_weight() {
            2 => Some([[0, -1], [1, 0]]),
            3 => Some([[0, -1], [1, 1]]),
            _ => None,
        }
    }
}

/// All reduced forms of discriminant `-n` (primitive or not).
pub fn reduced_forms(n: u64) -> Vec<BQForm> {
    let n = n as i64;
    let mut out = Vec::new();
    if n <= 0 || !matches!(n % 4, 0 | 3) {
        return out;
    }
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in (-a + 1)..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = BQForm::new(a, b, c);
            if f.is_reduced() {
                out.push(f);
            }
        }
        a += 1;
    }
    out
}

/// Hurwitz class number `H(n)`: classes of discriminant `-n` weighted by `1/|Aut/±1|`.
pub fn hurwitz_class_number(n: i64) -> Result<Rational64, ClassNumberError> {
    if n <= 0 {
        return Err(ClassNumberError::NonPositive(n));
    }
    Ok(reduced_forms(n as u64)
        .iter()
        .map(|f| Rational64::new(1, f.automorphism_weight() as i64))
        .fold(Rational64::zero(), |acc, w| acc + w))
}

/// Number of classes of primitive forms of discriminant `-n` (no weights).
pub fn class_number(n: i64) -> Result<u64, ClassNumberError> {
    if n <= 0 {
        return Err(ClassNumberError::NonPositive(n));
    }
    Ok(reduced_forms(n as u64).iter().filter(|f| f.is_primitive()).count() as u64)
}
