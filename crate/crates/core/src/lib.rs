//! Exact computation of antisymmetric vector-valued cusp forms for dual Weil
//! representations of finite quadratic modules, their theta lifts, and the
//! class-number identities that fall out of weight three.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel maps and the local
//! density cache are injected through [`exec::ParMap`] and
//! [`exec::DensityStore`]; the sequential defaults live here as well.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod bernoulli;
pub mod classnum;
pub mod cuspgen;
pub mod density;
pub mod dimensions;
pub mod eisenstein;
pub mod error;
pub mod exec;
pub mod matrix;
pub mod modularity;
pub mod qexp;
pub mod quadfield;
pub mod quadmod;
pub mod thetalift;
pub mod weight3;

pub use arith::{HalfInteger, Rational};
pub use error::{Error, Result};
pub use qexp::QExpansion;
pub use quadmod::{EvenLattice, FiniteQuadraticModule, FqmElement};
