//! Exact arithmetic for special divisors on modular curves: quadratic lattices and their
//! discriminant groups, Heegner divisors and Hurwitz class numbers, the pullback of special
//! divisors from an orthogonal Shimura variety to X_N, modular-curve genera, and
//! certificates of nontriviality for the Ceresa and Gross–Kudla–Schoen cycles of X_N.

pub mod arith;
pub mod certifier;
pub mod forms;
pub mod geometry;
pub mod heegner;
pub mod lattice;
pub mod newforms;
pub mod pullback;
pub mod representation;
pub mod selftest;

pub use certifier::{bound_b, certify, certify_with, explain, Certificate, CertifyOptions, Clause, Verdict, WitnessEntry};
pub use forms::{class_number, hurwitz_class_number, BQForm};
pub use geometry::{
    gamma_n_profile, gamma_n_profile_bounded, minus_newspace_dim, x0_profile, x0_star_genus, CurveLabel, CurveProfile,
};
pub use heegner::{enumerate_heegner_divisor, heegner_r_values, special_divisor_index, HeegnerDivisor, HeegnerIndex};
pub use lattice::{build_lattice_l, build_lattice_p, build_lattice_w, q_mod1, DiscElement, GramLattice, Side};
pub use newforms::{witness_minus_rank1, Mode, NewformClient, NewformRecord, NewformSource};
pub use pullback::{
    chow_heegner_from_decomposition, decompose_heegner, pullback, AmbientGenerator, DivisorClass, HeegKey,
    PullbackDecomposition,
};
pub use representation::{a_p, RepCount};
