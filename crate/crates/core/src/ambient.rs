//! Ambient weighted Laplacian on homogeneous functions over a model
//! background, and the ambient constructions of the weighted GJMS operator.
//!
//! A homogeneous function `t^w psi(rho) psi_0(x)` is stored as its weight and
//! the profile `psi(rho)`, where `psi_0` is a fixed eigenfunction of the base
//! weighted Laplacian with eigenvalue `sigma`. In normal form `Q = 2 rho t^2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Rational, SigmaPoly, TruncatedSeries, Variable};
use crate::background::Background;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousFunction {
    pub weight: Rational,
    pub profile: TruncatedSeries,
}

impl HomogeneousFunction {
    pub fn new(weight: Rational, profile: TruncatedSeries) -> Self {
        HomogeneousFunction { weight, profile }
    }

    /// `t^w` times the constant profile 1, known to `order`.
    pub fn pure_power(weight: Rational, order: usize) -> Self {
        HomogeneousFunction::new(weight, TruncatedSeries::one(Variable::Rho, order))
    }

    /// Restriction to `rho = 0`.
    pub fn restrict(&self) -> SigmaPoly {
        self.profile.constant_term().clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Factorization,
    Iterated,
    Recursion,
    Obstruction,
    Scattering,
}

impl Route {
    pub const ALL: [Route; 5] =
        [Route::Factorization, Route::Iterated, Route::Recursion, Route::Obstruction, Route::Scattering];

    pub fn name(self) -> &'static str {
        match self {
            Route::Factorization => "factorization",
            Route::Iterated => "iterated",
            Route::Recursion => "recursion",
            Route::Obstruction => "obstruction",
            Route::Scattering => "scattering",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| Error::Parse(format!("unknown route {s:?}")))
    }
}

/// The operator of order `2k` on one eigenfunction sector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GjmsPolynomial {
    pub k: u32,
    pub route: Route,
    pub background: Background,
    #[serde(rename = "poly_sigma")]
    pub poly: SigmaPoly,
}

#[derive(Debug, Clone, Default)]
pub struct GjmsOptions {
    /// Permit `k > (d+m)/2` when `d + m` is even.
    pub allow_unrestricted: bool,
    /// Profile truncation order; defaults to `k + 1`.
    pub order: Option<usize>,
}

impl GjmsOptions {
    pub fn unrestricted() -> Self {
        GjmsOptions { allow_unrestricted: true, order: None }
    }

    pub(crate) fn admit(&self, bg: &Background, k: u32) -> Result<()> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if self.allow_unrestricted {
            Ok(())
        } else {
            bg.check_order(k)
        }
    }
}

/// `(-4)^(k-1) ((k-1)!)^2`.
pub fn multiplicative_constant(k: u32) -> Rational {
    assert!(k >= 1);
    Rational::from_integer(-4).pow(k as i32 - 1).expect("nonzero base")
        * Rational::factorial(k - 1).pow(2).expect("nonzero base")
}

/// Weighted ambient Laplacian of `t^w psi`:
///
/// ```text
/// t^(w-2) [ -2 rho psi'' + (2w + d + m - 2 - rho g^{ij} g'_{ij}) psi'
///           + Delta_phi psi + (w/2) psi g^{ij} g'_{ij}
///           + (m/f) f' (w psi - 2 rho psi') ]
/// ```
///
/// with `Delta_phi psi = c(rho) sigma psi`. The result is known to one
/// order less than the input.
pub fn ambient_laplacian(bg: &Background, f: &HomogeneousFunction) -> Result<HomogeneousFunction> {
    let psi = &f.profile;
    if psi.variable() != Variable::Rho {
        return Err(Error::VariableMismatch { left: psi.variable(), right: Variable::Rho });
    }
    if psi.order() == 0 {
        return Err(Error::OrderShortfall { needed: 1, available: 0 });
    }
    let n = psi.order() - 1;
    let w = &f.weight;
    let gtr = bg.metric_trace(n);
    let weight_log = bg.weight_log_derivative(n);
    let lap = bg.laplacian_factor(Variable::Rho, n);

    let dpsi = psi.derivative()?;
    let rho_ddpsi = dpsi.euler();
    let rho_dpsi = psi.euler().truncate(n)?;
    let psi_n = psi.truncate(n)?;

    let linear = &(w * Rational::from_integer(2)) + &bg.total_dim() - Rational::from_integer(2);
    let half_w = w * Rational::new(1, 2);

    let mut out = rho_ddpsi.scale(&Rational::from_integer(-2));
    out = out.try_add(&dpsi.scale(&linear))?;
    out = out.try_sub(&gtr.try_mul(&rho_dpsi)?)?;
    out = out.try_add(&lap.try_mul(&psi_n)?.scale_poly(&SigmaPoly::sigma()))?;
    out = out.try_add(&gtr.try_mul(&psi_n)?.scale(&half_w))?;
    let bracket = psi_n.scale(w).try_sub(&rho_dpsi.scale(&Rational::from_integer(2)))?;
    out = out.try_add(&weight_log.try_mul(&bracket)?)?;

    Ok(HomogeneousFunction::new(w - Rational::from_integer(2), out))
}

/// `k` applications of [`ambient_laplacian`].
pub fn laplacian_power(bg: &Background, f: &HomogeneousFunction, k: u32) -> Result<HomogeneousFunction> {
    (0..k).try_fold(f.clone(), |acc, _| ambient_laplacian(bg, &acc))
}

/// Builds `1 + perturbation` at order `order`; the perturbation encodes a
/// `Q H` freedom and so must vanish at `rho = 0`.
fn perturbed_profile(perturbation: Option<&TruncatedSeries>, order: usize) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::one(Variable::Rho, order);
    match perturbation {
        None => Ok(one),
        Some(p) => {
            if p.variable() != Variable::Rho {
                return Err(Error::VariableMismatch { left: p.variable(), right: Variable::Rho });
            }
            if !p.constant_term().is_zero() {
                return Err(Error::PerturbationConstantTerm);
            }
            one.try_add(p)
        }
    }
}

fn profile_order(k: u32, opts: &GjmsOptions) -> Result<usize> {
    let order = opts.order.unwrap_or(k as usize + 1);
    if order < k as usize {
        return Err(Error::OrderShortfall { needed: k as usize, available: order });
    }
    Ok(order)
}

/// `Delta^k (t^w (1 + perturbation))` restricted to `rho = 0`, at an
/// arbitrary weight.
pub fn iterated_at_weight(
    bg: &Background,
    w: &Rational,
    k: u32,
    perturbation: Option<&TruncatedSeries>,
    order: usize,
) -> Result<SigmaPoly> {
    let f = HomogeneousFunction::new(w.clone(), perturbed_profile(perturbation, order)?);
    Ok(laplacian_power(bg, &f, k)?.restrict())
}

pub fn gjms_iterated(bg: &Background, k: u32) -> Result<GjmsPolynomial> {
    gjms_iterated_with(bg, k, None, &GjmsOptions::default())
}

/// Iterated ambient route: extend at the critical weight `-(d+m)/2 + k`,
/// apply the ambient Laplacian `k` times and restrict. The answer does not
/// depend on the perturbation.
pub fn gjms_iterated_with(
    bg: &Background,
    k: u32,
    perturbation: Option<&TruncatedSeries>,
    opts: &GjmsOptions,
) -> Result<GjmsPolynomial> {
    opts.admit(bg, k)?;
    let order = profile_order(k, opts)?;
    let poly = iterated_at_weight(bg, &bg.critical_weight(k), k, perturbation, order)?;
    Ok(GjmsPolynomial { k, route: Route::Iterated, background: bg.clone(), poly })
}

pub fn gjms_recursion(bg: &Background, k: u32) -> Result<GjmsPolynomial> {
    gjms_recursion_with(bg, k, &GjmsOptions::default())
}

/// `c_k = (-1)^(k-1) / (2^(k-1) (k-1)!)`.
pub fn recursion_constant(k: u32) -> Rational {
    let sign = if (k - 1).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let denom = Rational::from_integer(2).pow(k as i32 - 1).expect("nonzero") * Rational::factorial(k - 1);
    sign.checked_div(&denom).expect("nonzero")
}

/// Jet recursion route. With `T = g^{ij}g'_{ij}/2 + (m/f) f'` and
/// `E[psi] = Delta_phi psi - 2 rho psi' T + w psi T`, the jets at `rho = 0`
/// satisfy
///
/// ```text
/// 2 (l + 1 - k) psi^{(l+1)}(0) = (d/drho)^l E[psi] (0)     for l < k - 1
/// c_k L psi                     = (d/drho)^(k-1) E[psi] (0)
/// ```
pub fn gjms_recursion_with(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    opts.admit(bg, k)?;
    let top = k as usize - 1;
    let w = bg.critical_weight(k);
    let trace = bg.trace_term(Variable::Rho, top);
    let lap = bg.laplacian_factor(Variable::Rho, top);

    // jets[j] = psi^{(j)}(0); psi(0) = 1.
    let mut jets = vec![SigmaPoly::one()];
    let e_jet = |jets: &[SigmaPoly], l: usize| -> Result<SigmaPoly> {
        let coeffs = jets
            .iter()
            .enumerate()
            .map(|(j, p)| p.scale(&Rational::factorial(j as u32).recip().expect("nonzero")))
            .collect();
        let psi = TruncatedSeries::new(Variable::Rho, l, coeffs);
        let e = lap
            .truncate(l)?
            .try_mul(&psi)?
            .scale_poly(&SigmaPoly::sigma())
            .try_sub(&psi.euler().try_mul(&trace.truncate(l)?)?.scale(&Rational::from_integer(2)))?
            .try_add(&psi.try_mul(&trace.truncate(l)?)?.scale(&w))?;
        Ok(e.coeff(l)?.scale(&Rational::factorial(l as u32)))
    };
    for l in 0..top {
        let rhs = e_jet(&jets, l)?;
        let factor = Rational::from_integer(2 * (l as i64 + 1 - k as i64));
        jets.push(rhs.scale(&factor.recip()?));
    }
    let rhs = e_jet(&jets, top)?;
    let poly = rhs.scale(&recursion_constant(k).recip()?);
    Ok(GjmsPolynomial { k, route: Route::Recursion, background: bg.clone(), poly })
}

/// Profile `1 + a_1 rho + ... + a_upto rho^upto` at weight `w` whose ambient
/// Laplacian vanishes through order `upto - 1`. Each `a_l` is forced by
/// `2 l (k - l) a_l = -(order l-1 remainder)` with `k = w + (d+m)/2`.
fn solve_extension(bg: &Background, w: &Rational, upto: usize) -> Result<Vec<SigmaPoly>> {
    let k = w + &bg.half_dim();
    let mut coeffs = vec![SigmaPoly::one()];
    for l in 1..=upto {
        let trial = TruncatedSeries::new(Variable::Rho, l, coeffs.clone());
        let image = ambient_laplacian(bg, &HomogeneousFunction::new(w.clone(), trial))?;
        let remainder = image.profile.coeff(l - 1)?;
        let ll = Rational::from_integer(l as i64);
        let factor = Rational::from_integer(2) * &ll * (&k - &ll);
        if factor.is_zero() {
            return Err(Error::Obstructed { l });
        }
        coeffs.push(remainder.scale(&(-factor.recip()?)));
    }
    Ok(coeffs)
}

/// Formal harmonic extension of weight `w` through order `order`:
/// the ambient Laplacian of the result vanishes through order `order - 1`.
/// Fails at the first `l <= order` with `l = w + (d+m)/2`.
pub fn harmonic_extension(bg: &Background, w: &Rational, order: usize) -> Result<HomogeneousFunction> {
    let coeffs = solve_extension(bg, w, order)?;
    Ok(HomogeneousFunction::new(w.clone(), TruncatedSeries::new(Variable::Rho, order, coeffs)))
}

pub fn obstruction(bg: &Background, k: u32) -> Result<GjmsPolynomial> {
    obstruction_with(bg, k, &GjmsOptions::default())
}

/// `Q^(1-k) Delta F_{k-1}` restricted, where `F_{k-1}` is harmonic modulo
/// `Q^(k-1)`. Since `Q = 2 rho t^2`, this is the `rho^(k-1)` coefficient
/// divided by `2^(k-1)`.
pub fn obstruction_with(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    opts.admit(bg, k)?;
    let top = k as usize - 1;
    let w = bg.critical_weight(k);
    let coeffs = solve_extension(bg, &w, top)?;
    // F_{k-1} is exactly this polynomial, so its profile is known to any order.
    let f = HomogeneousFunction::new(w, TruncatedSeries::new(Variable::Rho, top + 1, coeffs));
    let image = ambient_laplacian(bg, &f)?;
    let scale = Rational::from_integer(2).pow(-(top as i32))?;
    let poly = image.profile.coeff(top)?.scale(&scale);
    Ok(GjmsPolynomial { k, route: Route::Obstruction, background: bg.clone(), poly })
}

#[derive(Debug, Clone)]
pub struct ConstantCheck {
    pub holds: bool,
    pub constant: Rational,
    pub iterated: GjmsPolynomial,
    pub obstruction: GjmsPolynomial,
}

/// Whether `iterated = (-4)^(k-1) ((k-1)!)^2 * obstruction`.
pub fn check_multiplicative_constant(bg: &Background, k: u32) -> Result<ConstantCheck> {
    check_multiplicative_constant_with(bg, k, &GjmsOptions::default())
}

pub fn check_multiplicative_constant_with(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<ConstantCheck> {
    let iterated = gjms_iterated_with(bg, k, None, opts)?;
    let obstruction = obstruction_with(bg, k, opts)?;
    let constant = multiplicative_constant(k);
    let holds = iterated.poly == obstruction.poly.scale(&constant);
    Ok(ConstantCheck { holds, constant, iterated, obstruction })
}
