//! Model backgrounds and their closed-form expansion data.
//!
//! Both models deform the base metric by a factor constant in `x`:
//!
//! * quasi-Einstein: `g_rho = (1 + lambda rho)^2 g`, `f_rho = (1 + lambda rho) f`
//! * Gover-Leitner: `g_rho = (1 - rho/2)^2 g`, `f_rho = 1 + rho/2`
//!
//! so every quantity the operators need is a scalar series. The Poincare
//! picture uses `rho = -r^2/2` throughout.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Rational, TruncatedSeries, Variable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackgroundKind {
    QuasiEinstein,
    GoverLeitner,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Background {
    kind: BackgroundKind,
    d: u32,
    m: Rational,
    lambda: Option<Rational>,
    mu: Rational,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

impl Background {
    pub fn quasi_einstein(d: u32, m: Rational, lambda: Rational) -> Result<Self> {
        Self::quasi_einstein_with_mu(d, m, lambda, Rational::one())
    }

    /// `mu` is carried as metadata only; it never enters the expansions.
    pub fn quasi_einstein_with_mu(d: u32, m: Rational, lambda: Rational, mu: Rational) -> Result<Self> {
        validate(d, &m)?;
        Ok(Background { kind: BackgroundKind::QuasiEinstein, d, m, lambda: Some(lambda), mu })
    }

    pub fn gover_leitner(d: u32, m: Rational) -> Result<Self> {
        validate(d, &m)?;
        Ok(Background { kind: BackgroundKind::GoverLeitner, d, m, lambda: None, mu: Rational::one() })
    }

    pub fn kind(&self) -> BackgroundKind {
        self.kind
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn d_rational(&self) -> Rational {
        Rational::from(self.d)
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn lambda(&self) -> Option<&Rational> {
        self.lambda.as_ref()
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    /// `d + m`.
    pub fn total_dim(&self) -> Rational {
        self.d_rational() + &self.m
    }

    /// `(d + m) / 2`.
    pub fn half_dim(&self) -> Rational {
        self.total_dim() * q(1, 2)
    }

    /// Whether `d + m` is a positive even integer.
    pub fn is_even_dimension(&self) -> bool {
        let n = self.total_dim();
        n.to_i64().is_some_and(|n| n > 0 && n % 2 == 0)
    }

    /// Rejects `k > (d+m)/2` when `d + m` is even.
    pub fn check_order(&self, k: u32) -> Result<()> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if self.is_even_dimension() && Rational::from(k) > self.half_dim() {
            return Err(Error::Restricted { k, half: self.half_dim() });
        }
        Ok(())
    }

    /// Weight `-(d+m)/2 + k` of the densities the order-`2k` operator acts on.
    pub fn critical_weight(&self, k: u32) -> Rational {
        Rational::from(k) - self.half_dim()
    }

    fn lambda_or_zero(&self) -> Rational {
        self.lambda.clone().unwrap_or_else(Rational::zero)
    }

    /// `g^{ij} g'_{ij}` in the `rho` picture (twice the metric half-trace).
    pub fn metric_trace(&self, order: usize) -> TruncatedSeries {
        let rho = Variable::Rho;
        match self.kind {
            // 2 d lambda / (1 + lambda rho)
            BackgroundKind::QuasiEinstein => {
                let lam = self.lambda_or_zero();
                TruncatedSeries::binomial_power(rho, order, &lam, &q(-1, 1)).scale(&(Rational::from(2 * self.d) * &lam))
            }
            // -d / (1 - rho/2)
            BackgroundKind::GoverLeitner => {
                TruncatedSeries::binomial_power(rho, order, &q(-1, 2), &q(-1, 1)).scale(&-self.d_rational())
            }
        }
    }

    /// `(m/f) f'` in the `rho` picture.
    pub fn weight_log_derivative(&self, order: usize) -> TruncatedSeries {
        let rho = Variable::Rho;
        match self.kind {
            // m lambda / (1 + lambda rho)
            BackgroundKind::QuasiEinstein => {
                let lam = self.lambda_or_zero();
                TruncatedSeries::binomial_power(rho, order, &lam, &q(-1, 1)).scale(&(&self.m * &lam))
            }
            // (m/2) / (1 + rho/2)
            BackgroundKind::GoverLeitner => {
                TruncatedSeries::binomial_power(rho, order, &q(1, 2), &q(-1, 1)).scale(&(&self.m * q(1, 2)))
            }
        }
    }

    /// `1/2 g^{ij} g'_{ij} + (m/f) f'` with the prime taken in the chosen
    /// picture's variable.
    pub fn trace_term(&self, picture: Variable, order: usize) -> TruncatedSeries {
        match picture {
            Variable::Rho => self
                .metric_trace(order)
                .scale(&q(1, 2))
                .try_add(&self.weight_log_derivative(order))
                .expect("same variable"),
            Variable::R => self.trace_term_r(order),
        }
    }

    /// Built directly from `g_r`, `f_r`, independent of the `rho` data.
    fn trace_term_r(&self, order: usize) -> TruncatedSeries {
        let r = Variable::R;
        // Series of r / (1 + a r^2), known to `order`.
        let odd = |a: Rational| {
            if order == 0 {
                return TruncatedSeries::zero(r, 0);
            }
            TruncatedSeries::binomial_power_monomial(r, order - 1, &a, 2, &q(-1, 1)).shift_up(1)
        };
        match self.kind {
            // -(d+m) lambda r / (1 - lambda r^2 / 2)
            BackgroundKind::QuasiEinstein => {
                let lam = self.lambda_or_zero();
                odd(-(&lam * q(1, 2))).scale(&-(self.total_dim() * &lam))
            }
            // (d/2) r / (1 + r^2/4) - (m/2) r / (1 - r^2/4)
            BackgroundKind::GoverLeitner => {
                let metric = odd(q(1, 4)).scale(&(self.d_rational() * q(1, 2)));
                let weight = odd(q(-1, 4)).scale(&(&self.m * q(-1, 2)));
                metric.try_add(&weight).expect("same variable")
            }
        }
    }

    /// Factor `c` with `(Delta_phi)_{g_rho} = c * Delta_phi` on functions of `x`.
    pub fn laplacian_factor(&self, picture: Variable, order: usize) -> TruncatedSeries {
        let (a, e) = match self.kind {
            BackgroundKind::QuasiEinstein => (self.lambda_or_zero(), q(-2, 1)),
            BackgroundKind::GoverLeitner => (q(-1, 2), q(-2, 1)),
        };
        match picture {
            Variable::Rho => TruncatedSeries::binomial_power(Variable::Rho, order, &a, &e),
            // rho = -r^2/2
            Variable::R => TruncatedSeries::binomial_power_monomial(Variable::R, order, &(-(a * q(1, 2))), 2, &e),
        }
    }

    /// `(f_r/f)^m (det g_r / det g)^(1/2)` in the `r` picture.
    pub fn density_factor(&self, order: usize) -> TruncatedSeries {
        let r = Variable::R;
        match self.kind {
            BackgroundKind::QuasiEinstein => {
                let lam = self.lambda_or_zero();
                TruncatedSeries::binomial_power_monomial(r, order, &-(lam * q(1, 2)), 2, &self.total_dim())
            }
            BackgroundKind::GoverLeitner => {
                let metric = TruncatedSeries::binomial_power_monomial(r, order, &q(1, 4), 2, &self.d_rational());
                let weight = TruncatedSeries::binomial_power_monomial(r, order, &q(-1, 4), 2, &self.m);
                metric.try_mul(&weight).expect("same variable")
            }
        }
    }
}

fn validate(d: u32, m: &Rational) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidBackground(format!("d = {d} must be at least 2")));
    }
    if m.is_negative() {
        return Err(Error::InvalidBackground(format!("m = {m} must be nonnegative")));
    }
    if Rational::from(d) + m == 2 {
        return Err(Error::InvalidBackground("d + m = 2".into()));
    }
    Ok(())
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BackgroundKind::QuasiEinstein => {
                write!(f, "quasi_einstein(d={}, m={}, lambda={})", self.d, self.m, self.lambda_or_zero())
            }
            BackgroundKind::GoverLeitner => write!(f, "gover_leitner(d={}, m={})", self.d, self.m),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BackgroundRepr {
    QuasiEinstein {
        d: u32,
        m: Rational,
        lambda: Rational,
        #[serde(default = "Rational::one", skip_serializing_if = "Rational::is_one")]
        mu: Rational,
    },
    GoverLeitner {
        d: u32,
        m: Rational,
    },
}

impl Serialize for Background {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self.kind {
            BackgroundKind::QuasiEinstein => BackgroundRepr::QuasiEinstein {
                d: self.d,
                m: self.m.clone(),
                lambda: self.lambda_or_zero(),
                mu: self.mu.clone(),
            },
            BackgroundKind::GoverLeitner => BackgroundRepr::GoverLeitner { d: self.d, m: self.m.clone() },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Background {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let built = match BackgroundRepr::deserialize(deserializer)? {
            BackgroundRepr::QuasiEinstein { d, m, lambda, mu } => Background::quasi_einstein_with_mu(d, m, lambda, mu),
            BackgroundRepr::GoverLeitner { d, m } => Background::gover_leitner(d, m),
        };
        built.map_err(serde::de::Error::custom)
    }
}

/// Weighted curvature scalars of a constant-curvature base with constant `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceformReport {
    pub r_phi: Rational,
    pub j_phi: Rational,
    /// `lambda` in `P_phi^m = lambda g`.
    pub p_coeff: Rational,
    pub is_quasi_einstein: bool,
    pub is_gover_leitner: bool,
}

/// Evaluates the weighted scalar curvature, Schouten scalar and Schouten
/// tensor of a `d`-dimensional spaceform of sectional curvature `kappa`
/// with constant `f = f0`, and classifies the result.
///
/// With `phi` constant, `Ric_phi^m = (d-1) kappa g` and
/// `R_phi^m = d(d-1) kappa + m(m-1) mu f0^(-2)`.
pub fn verify_spaceform_conditions(
    d: u32,
    m: &Rational,
    mu: &Rational,
    kappa: &Rational,
    f0: &Rational,
) -> Result<SpaceformReport> {
    let dd = Rational::from(d);
    let n = &dd + m;
    if n == 1 {
        return Err(Error::Degenerate("d + m = 1"));
    }
    if n == 2 {
        return Err(Error::Degenerate("d + m = 2"));
    }
    if f0.is_zero() {
        return Err(Error::Degenerate("f0 = 0"));
    }
    let one = Rational::one();
    let ric = (&dd - &one) * kappa;
    let r_phi = &dd * &ric + m * &(m - &one) * mu * f0.pow(-2)?;
    let j_phi = r_phi.checked_div(&(Rational::from_integer(2) * (&n - &one)))?;
    let p_coeff = (&ric - &j_phi).checked_div(&(&n - &Rational::from_integer(2)))?;
    let is_quasi_einstein = j_phi == &n * &p_coeff;
    let is_gover_leitner = f0.is_one() && mu.is_one() && ric == &one - &dd;
    Ok(SpaceformReport { r_phi, j_phi, p_coeff, is_quasi_einstein, is_gover_leitner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SigmaPoly;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rats(s: &TruncatedSeries) -> Vec<Rational> {
        s.coeffs().iter().map(|c| c.as_constant().unwrap()).collect()
    }

    fn qe(d: u32, m: &str, lam: &str) -> Background {
        Background::quasi_einstein(d, r(m), r(lam)).unwrap()
    }

    fn gl(d: u32, m: &str) -> Background {
        Background::gover_leitner(d, r(m)).unwrap()
    }

    #[test]
    fn trace_term_examples() {
        assert_eq!(rats(&qe(3, "2", "1").trace_term(Variable::Rho, 2)), vec![r("5"), r("-5"), r("5")]);
        assert_eq!(rats(&gl(3, "2").trace_term(Variable::Rho, 2)), vec![r("-1/2"), r("-5/4"), r("-1/8")]);
        for pic in [Variable::Rho, Variable::R] {
            assert!(qe(4, "1/2", "0").trace_term(pic, 6).is_zero());
        }
    }

    #[test]
    fn laplacian_factor_examples() {
        assert_eq!(rats(&qe(3, "2", "1").laplacian_factor(Variable::Rho, 3)), vec![r("1"), r("-2"), r("3"), r("-4")]);
        assert_eq!(qe(3, "2", "0").laplacian_factor(Variable::Rho, 3), TruncatedSeries::one(Variable::Rho, 3));
        assert_eq!(
            rats(&gl(3, "2").laplacian_factor(Variable::R, 4)),
            vec![r("1"), r("0"), r("-1/2"), r("0"), r("3/16")]
        );
    }

    #[test]
    fn density_factor_examples() {
        assert_eq!(rats(&qe(3, "2", "1").density_factor(2)), vec![r("1"), r("0"), r("-5/2")]);
        assert_eq!(qe(3, "2", "0").density_factor(4), TruncatedSeries::one(Variable::R, 4));
        assert_eq!(rats(&gl(3, "2").density_factor(2)), vec![r("1"), r("0"), r("1/4")]);
    }

    #[test]
    fn gover_leitner_trace_at_origin() {
        for (d, m) in [(3, "2"), (2, "1/2"), (5, "7/3")] {
            let bg = gl(d, m);
            let expected = (r(m) - Rational::from(d)) * r("1/2");
            assert_eq!(bg.trace_term(Variable::Rho, 0).constant_term(), &SigmaPoly::constant(expected));
        }
    }

    #[test]
    fn invalid_backgrounds() {
        assert!(Background::quasi_einstein(1, r("3"), r("1")).is_err());
        assert!(Background::quasi_einstein(2, r("0"), r("1")).is_err());
        assert!(Background::gover_leitner(3, r("-1")).is_err());
    }

    #[test]
    fn restriction_for_even_total_dimension() {
        let bg = qe(4, "2", "1");
        assert!(bg.check_order(3).is_ok());
        assert!(matches!(bg.check_order(4), Err(Error::Restricted { k: 4, .. })));
        assert!(qe(3, "2", "1").check_order(9).is_ok());
        assert!(qe(3, "1/2", "1").check_order(9).is_ok());
    }

    #[test]
    fn json_shape() {
        let bg = qe(3, "2", "1");
        let json = serde_json::to_string(&bg).unwrap();
        assert_eq!(json, r#"{"kind":"quasi_einstein","d":3,"m":"2","lambda":"1"}"#);
        assert_eq!(serde_json::from_str::<Background>(&json).unwrap(), bg);
        let json = serde_json::to_string(&gl(3, "2")).unwrap();
        assert_eq!(json, r#"{"kind":"gover_leitner","d":3,"m":"2"}"#);
        assert!(serde_json::from_str::<Background>(r#"{"kind":"gover_leitner","d":1,"m":"1"}"#).is_err());
    }

    #[test]
    fn spaceform_sphere_is_quasi_einstein() {
        let rep = verify_spaceform_conditions(2, &r("2"), &r("1"), &r("1"), &r("1")).unwrap();
        assert_eq!(rep.r_phi, r("4"));
        assert_eq!(rep.j_phi, r("2/3"));
        assert_eq!(rep.p_coeff, r("1/6"));
        assert!(rep.is_quasi_einstein);
        assert!(!rep.is_gover_leitner);
    }

    #[test]
    fn spaceform_flat_trivial_weight() {
        for (d, m) in [(3, "2"), (4, "1/2"), (2, "7/3")] {
            let rep = verify_spaceform_conditions(d, &r(m), &r("0"), &r("0"), &r("1")).unwrap();
            assert_eq!(rep.p_coeff, r("0"));
            assert!(rep.is_quasi_einstein);
        }
    }

    #[test]
    fn spaceform_hyperbolic_is_gover_leitner_only() {
        let rep = verify_spaceform_conditions(3, &r("2"), &r("1"), &r("-1"), &r("1")).unwrap();
        assert_eq!(rep.j_phi, r("-1/2"));
        assert_eq!(rep.p_coeff, r("-1/2"));
        assert!(rep.is_gover_leitner);
        assert!(!rep.is_quasi_einstein);
    }

    #[test]
    fn spaceform_degenerate() {
        assert!(verify_spaceform_conditions(2, &r("0"), &r("1"), &r("1"), &r("1")).is_err());
        assert!(verify_spaceform_conditions(3, &r("1"), &r("1"), &r("1"), &r("0")).is_err());
    }
}
