//! Small integer helpers shared by the lattice, form and geometry code.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;

/// Euclid on signed integers; result is non-negative.
pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g`, `g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Floor square root; `None` unless `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let s = isqrt(n);
    (s * s == n).then_some(s)
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn factorize(n: u64) -> BTreeMap<u64, usize> {
    if n <= 1 {
        return BTreeMap::new();
    }
    num_prime::nt_funcs::factorize64(n)
}

pub fn factorize_u128(n: u128) -> BTreeMap<u128, usize> {
    if n <= 1 {
        return BTreeMap::new();
    }
    num_prime::nt_funcs::factorize128(n)
}

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

/// Sorted list of positive divisors.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Sorted divisors of a 128-bit integer, given its factorisation.
pub fn divisors_u128(n: u128) -> Vec<u128> {
    let mut out = vec![1u128];
    for (p, e) in factorize_u128(n) {
        let len = out.len();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Kronecker symbol `(d / p)` for an odd prime `p`, or `p = 2`.
pub fn kronecker_prime(d: i64, p: u64) -> i64 {
    let p_i = p as i64;
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let a = d.rem_euclid(p_i) as u64;
    if a == 0 {
        return 0;
    }
    let e = (p - 1) / 2;
    let mut result = 1u128;
    let (mut base, mut exp) = (a as u128, e);
    let m = p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// Reduce a rational to its representative in `[0, 1)`.
pub fn frac_part(q: Rational64) -> Rational64 {
    q - q.floor()
}

pub fn big(q: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn big_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Render a rational as `p` or `p/q`.
pub fn fmt_rational<T>(q: &num_rational::Ratio<T>) -> String
where
    T: Clone + num_integer::Integer + std::fmt::Display,
{
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p`, `-p` or `p/q` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational64::new(n, d))
        }
        None => s.parse::<i64>().ok().map(Rational64::from_integer),
    }
}

/// Serde adapters that write exact rationals as strings (`"-1/12"`).
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).ok_or_else(|| serde::de::Error::custom(format!("bad rational {raw:?}")))
    }

    pub mod big {
        use super::*;

        pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&fmt_rational(q))
        }
    }
}
