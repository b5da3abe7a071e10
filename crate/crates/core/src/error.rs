use thiserror::Error;

use crate::algebra::{Rational, Variable};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("series variables differ: {left} vs {right}")]
    VariableMismatch { left: Variable, right: Variable },

    #[error("series has no invertible constant term")]
    NotInvertible,

    #[error("truncation order shortfall: need order {needed}, have {available}")]
    OrderShortfall { needed: usize, available: usize },

    #[error("read of coefficient {index} beyond truncation order {order}")]
    BeyondOrder { index: usize, order: usize },

    #[error("k = {k} exceeds (d+m)/2 = {half} with d+m even")]
    Restricted { k: u32, half: Rational },

    #[error("k must be a positive integer")]
    ZeroK,

    #[error("harmonic extension obstructed at order l = {l}")]
    Obstructed { l: usize },

    #[error("invalid background: {0}")]
    InvalidBackground(String),

    #[error("degenerate denominator: {0}")]
    Degenerate(&'static str),

    #[error("reduced remainder is not divisible by x on the left: {0}")]
    NotXDivisible(String),

    #[error("perturbation must vanish at order 0")]
    PerturbationConstantTerm,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}
