//! Univariate polynomials in the eigenvalue symbol `sigma`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

/// Polynomial in `sigma` with exact rational coefficients, stored in
/// ascending degree with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SigmaPoly {
    coeffs: Vec<Rational>,
}

impl SigmaPoly {
    pub fn zero() -> Self {
        SigmaPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        SigmaPoly::constant(Rational::one())
    }

    /// The indeterminate `sigma` itself.
    pub fn sigma() -> Self {
        SigmaPoly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        SigmaPoly::from_coeffs(vec![c])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        SigmaPoly::from_coeffs(coeffs)
    }

    /// `sigma + c`.
    pub fn linear(c: Rational) -> Self {
        SigmaPoly::from_coeffs(vec![c, Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        SigmaPoly { coeffs }
    }

    /// Ascending coefficients; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Rational::is_one)
    }

    /// The constant value, if the polynomial has degree <= 0.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> SigmaPoly {
        if c.is_zero() {
            return SigmaPoly::zero();
        }
        SigmaPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn evaluate(&self, at: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * at + c)
    }

    pub fn pow(&self, n: u32) -> SigmaPoly {
        (0..n).fold(SigmaPoly::one(), |acc, _| &acc * self)
    }
}

impl Add<&SigmaPoly> for &SigmaPoly {
    type Output = SigmaPoly;
    fn add(self, rhs: &SigmaPoly) -> SigmaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        SigmaPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&SigmaPoly> for &SigmaPoly {
    type Output = SigmaPoly;
    fn sub(self, rhs: &SigmaPoly) -> SigmaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        SigmaPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&SigmaPoly> for &SigmaPoly {
    type Output = SigmaPoly;
    fn mul(self, rhs: &SigmaPoly) -> SigmaPoly {
        if self.is_zero() || rhs.is_zero() {
            return SigmaPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        SigmaPoly::from_coeffs(out)
    }
}

impl Neg for &SigmaPoly {
    type Output = SigmaPoly;
    fn neg(self) -> SigmaPoly {
        SigmaPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<SigmaPoly> for SigmaPoly {
            type Output = SigmaPoly;
            fn $method(self, rhs: SigmaPoly) -> SigmaPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&SigmaPoly> for SigmaPoly {
            type Output = SigmaPoly;
            fn $method(self, rhs: &SigmaPoly) -> SigmaPoly {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for SigmaPoly {
    type Output = SigmaPoly;
    fn neg(self) -> SigmaPoly {
        -&self
    }
}

impl From<Rational> for SigmaPoly {
    fn from(c: Rational) -> Self {
        SigmaPoly::constant(c)
    }
}

/// Descending, e.g. `sigma^2 - 11*sigma + 105/4`.
impl fmt::Display for SigmaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let var = match deg {
                0 => String::new(),
                1 => "sigma".to_string(),
                n => format!("sigma^{n}"),
            };
            if deg == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{abs}*{var}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SigmaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaPoly({self})")
    }
}

impl Serialize for SigmaPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SigmaPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(SigmaPoly::from_coeffs(Vec::<Rational>::deserialize(deserializer)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn product_of_two_linear_factors() {
        let p = SigmaPoly::linear(q("-7/2")) * SigmaPoly::linear(q("-15/2"));
        assert_eq!(p, SigmaPoly::from_coeffs(vec![q("105/4"), q("-11"), q("1")]));
        assert_eq!(p.to_string(), "sigma^2 - 11*sigma + 105/4");
        assert_eq!(p.evaluate(&Rational::zero()), q("105/4"));
    }

    #[test]
    fn zero_absorbs() {
        let p = SigmaPoly::linear(q("3"));
        assert!((&p * &SigmaPoly::zero()).is_zero());
        assert_eq!(SigmaPoly::zero().degree(), None);
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = SigmaPoly::from_coeffs(vec![q("1"), q("0"), q("0")]);
        assert_eq!(p.degree(), Some(0));
        let cancel = &SigmaPoly::sigma() - &SigmaPoly::sigma();
        assert!(cancel.is_zero());
    }

    #[test]
    fn display_and_serde() {
        assert_eq!(SigmaPoly::linear(q("3/4")).to_string(), "sigma + 3/4");
        assert_eq!(SigmaPoly::monomial(q("-1/16"), 2).to_string(), "-1/16*sigma^2");
        assert_eq!(SigmaPoly::zero().to_string(), "0");
        let p = SigmaPoly::from_coeffs(vec![q("105/4"), q("-11"), q("1")]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"["105/4","-11","1"]"#);
    }
}
