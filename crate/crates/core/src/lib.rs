//! Exact Toeplitz-operator calculus on the harmonic Bergman space of the unit disk.
//!
//! The crate is layered bottom-up:
//!
//! * [`exactalg`]: Gaussian rationals and polynomial coefficients in the formal
//!   constants `C_k` and `abar_l`.
//! * [`radial`]: finite sums of `r^a (ln r)^b`.
//! * [`ratfun`]: univariate rational functions with concrete rational poles.
//! * [`mellin`]: the Mellin transform on `[0, 1)` and its termwise inverse.
//! * [`toeplitz`]: symbols, the harmonic basis, operator application and
//!   commutator certification, both for concrete basis vectors and uniformly in
//!   the basis index.
//! * [`derive`]: the telescoping functional-equation solver and the derivation
//!   pipeline for symbols commuting with `T_{z + conj(g)}`.
//! * [`oracle`]: floating-point quadrature cross-checks, independent of the
//!   exact engine.

pub mod derive;
pub mod error;
pub mod exactalg;
pub mod mellin;
pub mod oracle;
pub mod radial;
pub mod ratfun;
pub mod toeplitz;

pub use error::{Error, Result};
pub use exactalg::{Coeff, GaussianRational, Indeterminate, Monomial, Rational};
pub use radial::{RadialFunction, RadialKey};
pub use ratfun::{PartialFractions, RationalFn};
pub use toeplitz::{BasisVector, GenericAction, HarmonicVector, Side, Symbol};
