//! Desk-scale toolkit for Kloosterman-sum averages and mollified moments of
//! Dirichlet L-functions.
//!
//! The crate is organised around five subsystems:
//!
//! * [`arith`]: exact integer arithmetic (factorization, CRT, modular
//!   inverses) and the modulus decompositions the sum evaluators rely on.
//! * [`expsum`]: evaluators for the exponential-sum families (Kloosterman,
//!   Gauss, Salié-type, polynomial Gauss sums, and a constrained unit sum),
//!   each with a naive oracle path and, for Kloosterman, a CRT-accelerated
//!   path.
//! * [`quartic`]: the quartic Kloosterman average `G_q`, the paired-tuple
//!   set `D(p)`, the counting functions `N1`/`N2`, and the averaged bound
//!   machinery.
//! * [`dirichlet`]: Dirichlet characters with conductor and parity, two
//!   independent central-value evaluators, the mollifier, moments, and the
//!   non-vanishing optimizer.
//! * [`harness`]: deterministic sweep scheduling, CSV/JSON emission, the
//!   counter-based RNG, and the envelope suites behind the CLI.

pub mod arith;
pub mod dirichlet;
pub mod error;
pub mod expsum;
pub mod harness;
pub mod quartic;
pub mod util;

pub use error::{Error, Result};
