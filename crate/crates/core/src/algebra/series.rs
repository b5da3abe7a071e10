//! Truncated power series in `rho` or `r` with [`SigmaPoly`] coefficients.
//!
//! Order bookkeeping is pessimistic: every result records the highest order
//! at which its coefficients are known, and reads beyond it are refused.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Rational, SigmaPoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Rho,
    R,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Rho => write!(f, "rho"),
            Variable::R => write!(f, "r"),
        }
    }
}

/// `sum_{j <= order} c_j var^j + O(var^(order+1))`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    variable: Variable,
    order: usize,
    coeffs: Vec<SigmaPoly>,
}

impl TruncatedSeries {
    /// Builds a series from leading coefficients; missing ones up to `order`
    /// are zero and extra ones are dropped.
    pub fn new(variable: Variable, order: usize, mut coeffs: Vec<SigmaPoly>) -> Self {
        coeffs.resize(order + 1, SigmaPoly::zero());
        TruncatedSeries { variable, order, coeffs }
    }

    pub fn from_rationals(variable: Variable, order: usize, coeffs: Vec<Rational>) -> Self {
        Self::new(variable, order, coeffs.into_iter().map(SigmaPoly::constant).collect())
    }

    pub fn zero(variable: Variable, order: usize) -> Self {
        Self::new(variable, order, Vec::new())
    }

    pub fn one(variable: Variable, order: usize) -> Self {
        Self::constant(variable, order, SigmaPoly::one())
    }

    pub fn constant(variable: Variable, order: usize, c: SigmaPoly) -> Self {
        Self::new(variable, order, vec![c])
    }

    /// `c * var^power`, known to `order`.
    pub fn monomial(variable: Variable, order: usize, c: SigmaPoly, power: usize) -> Self {
        let mut coeffs = vec![SigmaPoly::zero(); order + 1];
        if power <= order {
            coeffs[power] = c;
        }
        TruncatedSeries { variable, order, coeffs }
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[SigmaPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Result<&SigmaPoly> {
        self.coeffs.get(j).ok_or(Error::BeyondOrder { index: j, order: self.order })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(SigmaPoly::is_zero)
    }

    /// Index of the first nonzero coefficient, if any within the order.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Drops information above `order`; asking for more than is known fails.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(Error::OrderShortfall { needed: order, available: self.order });
        }
        Ok(TruncatedSeries { variable: self.variable, order, coeffs: self.coeffs[..=order].to_vec() })
    }

    fn check_variable(&self, other: &Self) -> Result<()> {
        if self.variable != other.variable {
            return Err(Error::VariableMismatch { left: self.variable, right: other.variable });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_variable(other)?;
        let order = self.order.min(other.order);
        let coeffs = (0..=order).map(|j| &self.coeffs[j] + &other.coeffs[j]).collect();
        Ok(TruncatedSeries { variable: self.variable, order, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_variable(other)?;
        let order = self.order.min(other.order);
        let mut coeffs = vec![SigmaPoly::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(TruncatedSeries { variable: self.variable, order, coeffs })
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|a| a.scale(c))
    }

    pub fn scale_poly(&self, p: &SigmaPoly) -> Self {
        self.map(|a| a * p)
    }

    fn map(&self, f: impl Fn(&SigmaPoly) -> SigmaPoly) -> Self {
        TruncatedSeries { variable: self.variable, order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Multiplication by `var^power`; the known order grows by `power`.
    pub fn shift_up(&self, power: usize) -> Self {
        let mut coeffs = vec![SigmaPoly::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries { variable: self.variable, order: self.order + power, coeffs }
    }

    /// Division by `var`; requires a vanishing constant term.
    pub fn shift_down(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Consistency(format!(
                "cannot divide by {} a series with nonzero constant term",
                self.variable
            )));
        }
        if self.order == 0 {
            return Err(Error::OrderShortfall { needed: 1, available: 0 });
        }
        Ok(TruncatedSeries { variable: self.variable, order: self.order - 1, coeffs: self.coeffs[1..].to_vec() })
    }

    /// `d/dvar`; the known order drops by one.
    pub fn derivative(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderShortfall { needed: 1, available: 0 });
        }
        let coeffs = (1..=self.order).map(|j| self.coeffs[j].scale(&Rational::from_integer(j as i64))).collect();
        Ok(TruncatedSeries { variable: self.variable, order: self.order - 1, coeffs })
    }

    /// `var * d/dvar`, which preserves the known order.
    pub fn euler(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(j, c)| c.scale(&Rational::from_integer(j as i64))).collect();
        TruncatedSeries { variable: self.variable, order: self.order, coeffs }
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0].as_constant().filter(|c| !c.is_zero()).ok_or(Error::NotInvertible)?;
        let inv0 = a0.recip()?;
        let mut out: Vec<SigmaPoly> = vec![SigmaPoly::constant(inv0.clone())];
        for n in 1..=self.order {
            let mut acc = SigmaPoly::zero();
            for j in 1..=n {
                acc = &acc + &(&self.coeffs[j] * &out[n - j]);
            }
            out.push(acc.scale(&(-&inv0)));
        }
        Ok(TruncatedSeries { variable: self.variable, order: self.order, coeffs: out })
    }

    /// Expansion of `(1 + a * var)^e` to `order`.
    pub fn binomial_power(variable: Variable, order: usize, a: &Rational, e: &Rational) -> Self {
        Self::binomial_power_monomial(variable, order, a, 1, e)
    }

    /// Expansion of `(1 + a * var^step)^e` to `order`.
    pub fn binomial_power_monomial(variable: Variable, order: usize, a: &Rational, step: usize, e: &Rational) -> Self {
        assert!(step >= 1);
        let mut coeffs = vec![SigmaPoly::zero(); order + 1];
        let mut a_pow = Rational::one();
        for j in 0..=order / step {
            coeffs[j * step] = SigmaPoly::constant(Rational::binomial(e, j) * &a_pow);
            a_pow *= a;
        }
        TruncatedSeries { variable, order, coeffs }
    }

    /// Substitutes `var -> c * target^step`; the known order becomes
    /// `(order + 1) * step - 1`.
    pub fn substitute_monomial(&self, target: Variable, c: &Rational, step: usize) -> Self {
        assert!(step >= 1);
        let order = (self.order + 1) * step - 1;
        let mut coeffs = vec![SigmaPoly::zero(); order + 1];
        let mut c_pow = Rational::one();
        for (j, a) in self.coeffs.iter().enumerate() {
            coeffs[j * step] = a.scale(&c_pow);
            c_pow *= c;
        }
        TruncatedSeries { variable: target, order, coeffs }
    }

    /// Value at `var = 0`.
    pub fn constant_term(&self) -> &SigmaPoly {
        &self.coeffs[0]
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            wrote = true;
            match j {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*{}", self.variable)?,
                _ => write!(f, "({c})*{}^{j}", self.variable)?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.variable, self.order + 1)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries[{self}]")
    }
}

/// `regular + logpart * log(var)`, both truncated at the same order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LogSeries {
    regular: TruncatedSeries,
    logpart: TruncatedSeries,
}

impl LogSeries {
    pub fn new(regular: TruncatedSeries, logpart: TruncatedSeries) -> Result<Self> {
        regular.check_variable(&logpart)?;
        let order = regular.order.min(logpart.order);
        Ok(LogSeries { regular: regular.truncate(order)?, logpart: logpart.truncate(order)? })
    }

    pub fn from_regular(regular: TruncatedSeries) -> Self {
        let logpart = TruncatedSeries::zero(regular.variable, regular.order);
        LogSeries { regular, logpart }
    }

    pub fn regular(&self) -> &TruncatedSeries {
        &self.regular
    }

    pub fn logpart(&self) -> &TruncatedSeries {
        &self.logpart
    }

    pub fn order(&self) -> usize {
        self.regular.order
    }

    pub fn variable(&self) -> Variable {
        self.regular.variable
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        LogSeries::new(self.regular.try_add(&other.regular)?, self.logpart.try_add(&other.logpart)?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LogSeries { regular: self.regular.scale(c), logpart: self.logpart.scale(c) }
    }

    pub fn scale_poly(&self, p: &SigmaPoly) -> Self {
        LogSeries { regular: self.regular.scale_poly(p), logpart: self.logpart.scale_poly(p) }
    }

    pub fn mul_regular(&self, s: &TruncatedSeries) -> Result<Self> {
        LogSeries::new(self.regular.try_mul(s)?, self.logpart.try_mul(s)?)
    }

    /// Product, keeping terms linear in `log(var)`. The `log^2` part is not
    /// represented, so the known order is lowered below its first nonzero
    /// coefficient.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let regular = self.regular.try_mul(&other.regular)?;
        let logpart = self.regular.try_mul(&other.logpart)?.try_add(&self.logpart.try_mul(&other.regular)?)?;
        let squared = self.logpart.try_mul(&other.logpart)?;
        let mut order = regular.order.min(logpart.order);
        if let Some(v) = squared.valuation() {
            if v == 0 {
                return Err(Error::Consistency("log^2 term at order 0".into()));
            }
            order = order.min(v - 1);
        }
        LogSeries::new(regular.truncate(order)?, logpart.truncate(order)?)
    }

    pub fn shift_up(&self, power: usize) -> Self {
        LogSeries { regular: self.regular.shift_up(power), logpart: self.logpart.shift_up(power) }
    }

    /// `d/dvar (a + b log var) = a' + b/var + b' log var`.
    pub fn derivative(&self) -> Result<Self> {
        let b_over_var = if self.logpart.is_zero() {
            TruncatedSeries::zero(self.variable(), self.order().saturating_sub(1))
        } else {
            self.logpart.shift_down()?
        };
        let regular = self.regular.derivative()?.try_add(&b_over_var)?;
        LogSeries::new(regular, self.logpart.derivative()?)
    }
}
