//! Weighted GJMS operators on model smooth metric measure spaces.
//!
//! Every operator is computed on a single eigenfunction sector of the base
//! weighted Laplacian, so each route produces a polynomial in the eigenvalue
//! symbol `sigma` with exact rational coefficients. The routes are:
//!
//! * closed-form factorization products ([`factorization`]),
//! * iterated ambient Laplacian and its jet recursion ([`ambient`]),
//! * the harmonic-extension obstruction ([`ambient::obstruction`]),
//! * the log coefficient of the scattering problem ([`scattering`]).
//!
//! The [`sl2`] module checks the operator algebra behind the ambient
//! constructions in a PBW normal form.

pub mod algebra;
pub mod ambient;
pub mod background;
pub mod cli;
pub mod error;
pub mod factorization;
pub mod scattering;
pub mod sl2;
pub mod verify;

pub use algebra::{LogSeries, Rational, SigmaPoly, TruncatedSeries, Variable};
pub use background::{Background, BackgroundKind};
pub use error::{Error, Result};
