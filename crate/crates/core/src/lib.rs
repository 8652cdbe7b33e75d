//! Exact jump-locus arithmetic for irregular varieties and their towers of
//! abelian covers.
//!
//! A variety is described by the ranks `h^q(X, Ω^p ⊗ α)` as `α` ranges over the
//! dual torus `Pic⁰ = (ℝ/ℤ)^{2g}`: a generic value plus finitely many strata,
//! each a rational translate of a closed subgroup given by a congruence system
//! `A·x ≡ b (mod ℤ^k)`. Invariants of the cover `X_d → X` induced by
//! multiplication by `d` on the Albanese torus are sums of these ranks over the
//! `d`-torsion points, which reduce to exact congruence counts.
//!
//! Everything here is exact (arbitrary-precision integers and rationals) and
//! the crate needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod catalog;
pub mod error;
pub mod matrix;
pub mod model;
pub mod snf;
pub mod torsion;
pub mod torus;
pub mod tower;

pub use error::{Error, Result};
pub use matrix::IntMatrix;
pub use model::{RankFunction, Stratum, VarietyModel};
pub use torsion::Limits;
pub use torus::{CongruenceCoset, NormalizedCoset, TorusPoint};
pub use tower::{Invariant, Tower};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
