//! Exact rational arithmetic, polynomials in `sigma`, and truncated series.

mod poly;
mod rational;
mod series;

pub use poly::SigmaPoly;
pub use rational::Rational;
pub use series::{LogSeries, TruncatedSeries, Variable};
