//! Right cosets of a congruence subgroup in SL2(Z), enumerated at its level `M` by a
//! breadth-first walk under the generators `S` and `T`.
//!
//! Elliptic points and cusps are read off the permutation action of SL2(Z) on cosets:
//! fixed points of `S` (order 2), fixed points of `ST` (order 3) and cycles of `T`.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::arith::gcd;

/// A 2x2 matrix with entries mod `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModMat {
    pub m: i64,
    pub e: [i64; 4],
}

impl ModMat {
    pub fn new(m: i64, a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { m, e: [a.rem_euclid(m), b.rem_euclid(m), c.rem_euclid(m), d.rem_euclid(m)] }
    }

    pub fn identity(m: i64) -> Self {
        Self::new(m, 1, 0, 0, 1)
    }

    pub fn s(m: i64) -> Self {
        Self::new(m, 0, -1, 1, 0)
    }

    pub fn t(m: i64) -> Self {
        Self::new(m, 1, 1, 0, 1)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = self.e;
        let [p, q, r, s] = o.e;
        Self::new(self.m, a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)
    }

    pub fn neg(&self) -> Self {
        let [a, b, c, d] = self.e;
        Self::new(self.m, -a, -b, -c, -d)
    }

    pub fn trace(&self) -> i64 {
        (self.e[0] + self.e[3]) % self.m
    }
}

/// A subgroup of SL2(Z) of level dividing `modulus`, described by a canonical key for
/// each right coset `±Γ g` (or `Γ g` when `plus_minus` is false).
pub trait CongruenceSubgroup {
    type Key: Clone + Eq + Hash + Ord;
    fn modulus(&self) -> i64;
    fn coset_key(&self, g: &ModMat) -> Self::Key;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetData {
    pub index: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub cusps: u64,
}

impl CosetData {
    /// `g = 1 + index/12 - nu2/4 - nu3/3 - cusps/2`, or `None` if that is not an integer.
    pub fn genus(&self) -> Option<u64> {
        let twelve_g = 12 + self.index as i64 - 3 * self.nu2 as i64 - 4 * self.nu3 as i64 - 6 * self.cusps as i64;
        (twelve_g >= 0 && twelve_g % 12 == 0).then_some(twelve_g as u64 / 12)
    }
}

/// Enumerate cosets and the `S`, `ST`, `T` permutations on them.
pub fn enumerate<G: CongruenceSubgroup>(group: &G) -> CosetData {
    let m = group.modulus();
    let (s, t) = (ModMat::s(m), ModMat::t(m));
    let st = s.mul(&t);
    let mut index_of: HashMap<G::Key, usize> = HashMap::new();
    let mut reps: Vec<ModMat> = Vec::new();
    let mut queue = VecDeque::new();
    let id = ModMat::identity(m);
    index_of.insert(group.coset_key(&id), 0);
    reps.push(id);
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for h in [g.mul(&s), g.mul(&t)] {
            let k = group.coset_key(&h);
            if let std::collections::hash_map::Entry::Vacant(e) = index_of.entry(k) {
                e.insert(reps.len());
                reps.push(h);
                queue.push_back(h);
            }
        }
    }
    let perm = |x: &ModMat| -> Vec<usize> { reps.iter().map(|g| index_of[&group.coset_key(&g.mul(x))]).collect() };
    let (ps, pst, pt) = (perm(&s), perm(&st), perm(&t));
    let fixed = |p: &[usize]| p.iter().enumerate().filter(|(i, j)| i == *j).count() as u64;
    let mut seen = vec![false; reps.len()];
    let mut cusps = 0u64;
    for start in 0..reps.len() {
        if seen[start] {
            continue;
        }
        cusps += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = pt[i];
        }
    }
    CosetData { index: reps.len() as u64, nu2: fixed(&ps), nu3: fixed(&pst), cusps }
}

/// Γ0(N): the right coset `±Γ0(N) g` is the bottom row of `g` in P¹(Z/N).
#[derive(Debug, Clone, Copy)]
pub struct Gamma0(pub i64);

impl CongruenceSubgroup for Gamma0 {
    type Key = (i64, i64);
    fn modulus(&self) -> i64 {
        self.0
    }
    fn coset_key(&self, g: &ModMat) -> (i64, i64) {
        super::p1::normalize(self.0, g.e[2], g.e[3])
    }
}

/// The image of `Γ1(2N) ∩ Γ(2)` mod `M = 2N` is `{(1, b; 0, 1) : b even}`. More generally
/// this is the upper unipotent group `{(1, b; 0, 1) : step | b}` mod `modulus`, with or
/// without `-I` adjoined.
#[derive(Debug, Clone, Copy)]
pub struct Unipotent {
    pub modulus: i64,
    pub step: i64,
    pub plus_minus: bool,
}

impl Unipotent {
    fn key_unsigned(&self, g: &ModMat) -> [i64; 4] {
        let m = self.modulus;
        let [a, b, c, d] = g.e;
        // (1, s·t; 0, 1)·g adds s·t·(c, d) to the top row.
        let (dc, dd) = ((self.step * c) % m, (self.step * d) % m);
        let orbit_len = m / gcd(gcd(dc, dd), m);
        (0..orbit_len)
            .map(|k| [(a + k * dc) % m, (b + k * dd) % m, c, d])
            .min()
            .expect("orbit is nonempty")
    }
}

impl CongruenceSubgroup for Unipotent {
    type Key = [i64; 4];
    fn modulus(&self) -> i64 {
        self.modulus
    }
    fn coset_key(&self, g: &ModMat) -> [i64; 4] {
        let k = self.key_unsigned(g);
        if self.plus_minus {
            k.min(self.key_unsigned(&g.neg()))
        } else {
            k
        }
    }
}

/// `|SL2(Z/M)| = M³ ∏_{p | M} (1 - 1/p²)`.
pub fn sl2_order(m: u64) -> u64 {
    crate::arith::factorize(m)
        .keys()
        .fold(m * m * m, |acc, p| acc / (p * p) * (p * p - 1))
}

/// Brute-force `|SL2(Z/M)|` for small `M`.
pub fn sl2_order_brute(m: i64) -> u64 {
    let mut count = 0u64;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if (a * d - b * c - 1).rem_euclid(m) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
