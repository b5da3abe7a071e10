//! Poincare-picture construction: formal solutions of the weighted scattering
//! equation, their `r^(2k) log r` obstruction, and the log coefficient of the
//! boundary pairing.
//!
//! Laplacians here use the same trace ("analyst") sign as the ambient module.
//! Conjugating `Delta_+ + s(d+m-s)` by `r^(d+m-s)` and negating gives
//!
//! ```text
//! D_s = -r d_r^2 + [2s - d - m - 1 - r T] d_r - (d + m - s) T - r Delta_phi
//! ```
//!
//! with `T = g^{ij} g'_{ij}/2 + (m/f) f'` and primes in `r`.

use serde::Serialize;

use crate::algebra::{LogSeries, Rational, SigmaPoly, TruncatedSeries, Variable};
use crate::ambient::{GjmsOptions, GjmsPolynomial, Route};
use crate::background::Background;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScatteringSolution {
    pub k: u32,
    pub route: Route,
    pub background: Background,
    pub s: Rational,
    /// `convention_factor * log_coeff / d_k`.
    #[serde(rename = "poly_sigma")]
    pub normalized: SigmaPoly,
    /// `v_0 = 1` through `v_{2k-1}`.
    pub v_coeffs: Vec<SigmaPoly>,
    /// The coefficient `p_{2k}` of `r^(2k) log r`.
    pub log_coeff: SigmaPoly,
}

/// `d_k = [2^(2k-1) k! (k-1)!]^(-1)`.
pub fn normalization(k: u32) -> Rational {
    assert!(k >= 1);
    let denom = Rational::from_integer(2).pow(2 * k as i32 - 1).expect("nonzero")
        * Rational::factorial(k)
        * Rational::factorial(k - 1);
    denom.recip().expect("nonzero")
}

/// Sign relating `p_{2k} / d_k` to the ambient operator under the trace sign
/// convention. It is `-1` for every `k`: the leading term of `p_{2k}` is
/// `-d_k sigma^k`.
pub fn convention_factor(_k: u32) -> Rational {
    -Rational::one()
}

/// `a (a - d - m) + s (d + m - s)`: the leading coefficient of
/// `(Delta_+ + s(d+m-s)) r^a` on the model hyperbolic end.
pub fn indicial_value(bg: &Background, s: &Rational, a: &Rational) -> Rational {
    let n = bg.total_dim();
    a * &(a - &n) + s * &(&n - s)
}

fn regular_part(bg: &Background, s: &Rational, a: &TruncatedSeries) -> Result<TruncatedSeries> {
    let n = a.order() - 1;
    let trace = bg.trace_term(Variable::R, n);
    let lap = bg.laplacian_factor(Variable::R, n);
    let da = a.derivative()?;
    let a_n = a.truncate(n)?;
    let nd = bg.total_dim();
    let drift = &(s * Rational::from_integer(2)) - &nd - Rational::one();

    let mut out = da.euler().neg();
    out = out.try_add(&da.scale(&drift))?;
    out = out.try_sub(&trace.try_mul(&da)?.shift_up(1).truncate(n)?)?;
    out = out.try_sub(&trace.try_mul(&a_n)?.scale(&(&nd - s)))?;
    let potential = lap.try_mul(&a_n)?.scale_poly(&SigmaPoly::sigma()).shift_up(1).truncate(n)?;
    out = out.try_sub(&potential)?;
    Ok(out)
}

/// Applies `D_s` to `a + b log r`:
///
/// ```text
/// D_s(a + b log r) = D_s(a) + [-2 b' + (2s - d - m) b / r - T b] + D_s(b) log r
/// ```
///
/// The result is known to one order less than the input.
pub fn apply_ds(bg: &Background, s: &Rational, u: &LogSeries) -> Result<LogSeries> {
    if u.variable() != Variable::R {
        return Err(Error::VariableMismatch { left: u.variable(), right: Variable::R });
    }
    if u.order() == 0 {
        return Err(Error::OrderShortfall { needed: 1, available: 0 });
    }
    let n = u.order() - 1;
    let b = u.logpart();
    let mut regular = regular_part(bg, s, u.regular())?;
    let logpart = regular_part(bg, s, b)?;
    if !b.is_zero() {
        let trace = bg.trace_term(Variable::R, n);
        let weight = &(s * Rational::from_integer(2)) - &bg.total_dim();
        let cross = b
            .derivative()?
            .scale(&Rational::from_integer(-2))
            .try_add(&b.shift_down()?.scale(&weight))?
            .try_sub(&trace.try_mul(&b.truncate(n)?)?)?;
        regular = regular.try_add(&cross)?;
    }
    LogSeries::new(regular, logpart)
}

pub fn scattering_solve(bg: &Background, k: u32) -> Result<ScatteringSolution> {
    scattering_solve_with(bg, k, &GjmsOptions::default())
}

/// Solves `D_s V = O(r^(2k-1))` order by order from `V_0 = 1`,
///
/// ```text
/// j (2k - j) v_j = -[r^(j-1)] D_s(V_{j-1}),      1 <= j < 2k
/// p_{2k}         = [r^(2k-1)] D_s(V_{2k-1}) / (2k)
/// ```
///
/// and checks that `V + p_{2k} r^(2k) log r` is annihilated through
/// `r^(2k-1)`.
pub fn scattering_solve_with(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<ScatteringSolution> {
    opts.admit(bg, k)?;
    let twok = 2 * k as usize;
    let order = opts.order.unwrap_or(twok + 2);
    if order < twok {
        return Err(Error::OrderShortfall { needed: twok, available: order });
    }
    let s = bg.half_dim() + Rational::from(k);
    let r = Variable::R;

    let mut v = TruncatedSeries::one(r, order);
    let mut v_coeffs = vec![SigmaPoly::one()];
    for j in 1..twok {
        let image = apply_ds(bg, &s, &LogSeries::from_regular(v.clone()))?;
        let factor = Rational::from_integer((j * (twok - j)) as i64);
        assert!(!factor.is_zero(), "j (2k - j) vanishes only at j = 0, 2k");
        let vj = image.regular().coeff(j - 1)?.scale(&(-factor.recip()?));
        v = v.try_add(&TruncatedSeries::monomial(r, order, vj.clone(), j))?;
        v_coeffs.push(vj);
    }
    let image = apply_ds(bg, &s, &LogSeries::from_regular(v.clone()))?;
    let log_coeff = image.regular().coeff(twok - 1)?.scale(&Rational::from_integer(twok as i64).recip()?);

    let u = LogSeries::new(v, TruncatedSeries::monomial(r, order, log_coeff.clone(), twok))?;
    let residual = apply_ds(bg, &s, &u)?;
    for j in 0..twok {
        if !residual.regular().coeff(j)?.is_zero() || !residual.logpart().coeff(j)?.is_zero() {
            return Err(Error::Consistency(format!("D_s u has a nonzero r^{j} term")));
        }
    }
    let n = bg.total_dim();
    for (j, vj) in v_coeffs.iter().enumerate() {
        if j % 2 == 1 && Rational::from_integer(j as i64) < n && !vj.is_zero() {
            return Err(Error::Consistency(format!("odd coefficient v_{j} = {vj} is nonzero")));
        }
    }

    let normalized = log_coeff.scale(&(convention_factor(k) * normalization(k).recip()?));
    Ok(ScatteringSolution { k, route: Route::Scattering, background: bg.clone(), s, normalized, v_coeffs, log_coeff })
}

impl ScatteringSolution {
    /// The profile `V + p_{2k} r^(2k) log r` of `u = r^((d+m)/2 - k) (...)`.
    pub fn profile(&self, order: usize) -> Result<LogSeries> {
        let r = Variable::R;
        let regular = TruncatedSeries::new(r, order, self.v_coeffs.clone());
        let twok = 2 * self.k as usize;
        LogSeries::new(regular, TruncatedSeries::monomial(r, order, self.log_coeff.clone(), twok))
    }

    pub fn to_polynomial(&self) -> GjmsPolynomial {
        GjmsPolynomial {
            k: self.k,
            route: Route::Scattering,
            background: self.background.clone(),
            poly: self.normalized.clone(),
        }
    }
}

pub fn gjms_route_scattering(bg: &Background, k: u32) -> Result<GjmsPolynomial> {
    gjms_route_scattering_with(bg, k, &GjmsOptions::default())
}

/// `convention_factor * p_{2k} / d_k`.
pub fn gjms_route_scattering_with(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    Ok(scattering_solve_with(bg, k, opts)?.to_polynomial())
}

/// Both sides as multiples of `A = int v^2 dv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreenCheck {
    pub lp: SigmaPoly,
    pub rhs: SigmaPoly,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Coefficient of `log eps` in
/// `-eps^(1-d-m) U(eps) U'(eps) J(eps)` for `u_1 = u_2 = u`, where
/// `U = r^a (V + p r^(2k) log r)`, `a = (d+m)/2 - k` and `J` is the
/// density factor, compared against `-(d+m) p_{2k}`.
pub fn greens_log_coefficient(bg: &Background, k: u32) -> Result<GreenCheck> {
    greens_log_coefficient_with(bg, k, &GjmsOptions::default())
}

pub fn greens_log_coefficient_with(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<GreenCheck> {
    let sol = scattering_solve_with(bg, k, opts)?;
    let twok = 2 * k as usize;
    let order = opts.order.unwrap_or(twok + 2);
    let w = sol.profile(order)?;
    let a = bg.half_dim() - Rational::from(k);

    // U U' = r^(2a-1) (a W^2 + r W W'), and eps^(1-d-m) r^(2a-1) = r^(-2k),
    // so log eps at eps^0 is the r^(2k) log r coefficient of the bracket.
    let bracket = w.try_mul(&w)?.scale(&a).try_add(&w.try_mul(&w.derivative()?)?.shift_up(1))?;
    let weighted = bracket.mul_regular(&bg.density_factor(bracket.order()))?;
    let lp = -weighted.logpart().coeff(twok)?;
    let rhs = sol.log_coeff.scale(&-bg.total_dim());
    let matches = lp == rhs;
    Ok(GreenCheck { lp, rhs, matches })
}
