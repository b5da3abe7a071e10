//! Closed-form factorizations and the cross-route comparison.
//!
//! Quasi-Einstein, `w = -(d+m)/2 + k`:
//!
//! ```text
//! prod_{l=0}^{k-1} [ Delta_phi + 2 lambda (w - 2l)(w + d + m - 1 - 2l) ]
//! ```
//!
//! Gover-Leitner:
//!
//! ```text
//! prod_{j=0}^{k-1} [ Delta + (2k - 4j - d - m)(2 - d + m - 2k + 4j) / 4 ]
//! ```

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Rational, SigmaPoly};
use crate::ambient::{self, multiplicative_constant, GjmsOptions, GjmsPolynomial, Route};
use crate::background::{Background, BackgroundKind};
use crate::error::Result;
use crate::scattering;

/// Constants `c_l` of the factors `sigma + c_l`, `l = 0..k`.
pub fn qe_factor_constants(d: u32, m: &Rational, lambda: &Rational, k: u32) -> Vec<Rational> {
    let n = Rational::from(d) + m;
    let w = Rational::from(k) - &n * Rational::new(1, 2);
    (0..k)
        .map(|l| {
            let two_l = Rational::from(2 * l);
            Rational::from_integer(2) * lambda * (&w - &two_l) * (&w + &n - Rational::one() - &two_l)
        })
        .collect()
}

pub fn gl_factor_constants(d: u32, m: &Rational, k: u32) -> Vec<Rational> {
    let (d, k) = (Rational::from(d), Rational::from(k));
    let two = Rational::from_integer(2);
    (0..k.to_i64().unwrap_or(0))
        .map(|j| {
            let four_j = Rational::from_integer(4 * j);
            let left = &two * &k - &four_j - &d - m;
            let right = &two - &d + m - &two * &k + &four_j;
            left * right * Rational::new(1, 4)
        })
        .collect()
}

fn product(constants: &[Rational]) -> SigmaPoly {
    constants.iter().fold(SigmaPoly::one(), |acc, c| &acc * &SigmaPoly::linear(c.clone()))
}

pub fn qe_product(d: u32, m: &Rational, lambda: &Rational, k: u32) -> Result<GjmsPolynomial> {
    qe_product_with(d, m, lambda, k, &GjmsOptions::default())
}

pub fn qe_product_with(d: u32, m: &Rational, lambda: &Rational, k: u32, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    let bg = Background::quasi_einstein(d, m.clone(), lambda.clone())?;
    opts.admit(&bg, k)?;
    let poly = product(&qe_factor_constants(d, m, lambda, k));
    Ok(GjmsPolynomial { k, route: Route::Factorization, background: bg, poly })
}

pub fn gl_product(d: u32, m: &Rational, k: u32) -> Result<GjmsPolynomial> {
    gl_product_with(d, m, k, &GjmsOptions::default())
}

pub fn gl_product_with(d: u32, m: &Rational, k: u32, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    let bg = Background::gover_leitner(d, m.clone())?;
    opts.admit(&bg, k)?;
    let poly = product(&gl_factor_constants(d, m, k));
    Ok(GjmsPolynomial { k, route: Route::Factorization, background: bg, poly })
}

/// Factorization product for whichever model `bg` is.
pub fn factorization_for(bg: &Background, k: u32, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    match bg.kind() {
        BackgroundKind::QuasiEinstein => {
            let lam = bg.lambda().cloned().unwrap_or_else(Rational::zero);
            qe_product_with(bg.d(), bg.m(), &lam, k, opts)
        }
        BackgroundKind::GoverLeitner => gl_product_with(bg.d(), bg.m(), k, opts),
    }
}

/// Runs one route.
pub fn run_route(bg: &Background, k: u32, route: Route, opts: &GjmsOptions) -> Result<GjmsPolynomial> {
    match route {
        Route::Factorization => factorization_for(bg, k, opts),
        Route::Iterated => ambient::gjms_iterated_with(bg, k, None, opts),
        Route::Recursion => ambient::gjms_recursion_with(bg, k, opts),
        Route::Obstruction => ambient::obstruction_with(bg, k, opts),
        Route::Scattering => scattering::gjms_route_scattering_with(bg, k, opts),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteEntry {
    pub route: Route,
    /// The route's own output; for the obstruction route this is before
    /// scaling by the multiplicative constant.
    pub result: std::result::Result<SigmaPoly, String>,
}

impl RouteEntry {
    /// Output on the common normalization used for comparison.
    fn comparable(&self, k: u32) -> Option<SigmaPoly> {
        let poly = self.result.as_ref().ok()?;
        Some(match self.route {
            Route::Obstruction => poly.scale(&multiplicative_constant(k)),
            _ => poly.clone(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RouteReport {
    pub background: Background,
    pub k: u32,
    pub entries: Vec<RouteEntry>,
    /// `agreement[i][j]`: entries `i` and `j` both succeeded and agree.
    pub agreement: Vec<Vec<bool>>,
    /// Iterated equals the scaled obstruction; `None` if either failed.
    pub constant_check: Option<bool>,
}

impl RouteReport {
    pub fn all_agree(&self) -> bool {
        self.agreement.iter().flatten().all(|&b| b) && self.constant_check == Some(true)
    }

    pub fn entry(&self, route: Route) -> Option<&RouteEntry> {
        self.entries.iter().find(|e| e.route == route)
    }

    fn recompute(&mut self) {
        let comparable: Vec<_> = self.entries.iter().map(|e| e.comparable(self.k)).collect();
        self.agreement = comparable
            .iter()
            .map(|a| comparable.iter().map(|b| matches!((a, b), (Some(a), Some(b)) if a == b)).collect())
            .collect();
        let get = |r: Route| self.entry(r).and_then(|e| e.result.as_ref().ok());
        self.constant_check = match (get(Route::Iterated), get(Route::Obstruction)) {
            (Some(it), Some(ob)) => Some(*it == ob.scale(&multiplicative_constant(self.k))),
            _ => None,
        };
    }

    /// Harness self-test hook: adds 1 to the constant coefficient of one
    /// route's output and recomputes the comparisons.
    pub fn inject_fault(&mut self, route: Route) {
        if let Some(entry) = self.entries.iter_mut().find(|e| e.route == route) {
            if let Ok(p) = &entry.result {
                entry.result = Ok(p + &SigmaPoly::one());
            }
        }
        self.recompute();
    }

    fn poly_text(&self, route: Route) -> String {
        match self.entry(route).map(|e| &e.result) {
            Some(Ok(p)) => p.to_string(),
            Some(Err(e)) => format!("error: {e}"),
            None => String::new(),
        }
    }

    pub fn csv_header() -> &'static str {
        "kind,d,m,lambda,k,factorization,iterated,recursion,obstruction,scattering,all_agree,constant_check"
    }

    /// One wide row for this `(background, k)` cell.
    pub fn csv_row(&self) -> String {
        let bg = &self.background;
        let mut fields = vec![
            kind_name(bg.kind()).to_string(),
            bg.d().to_string(),
            bg.m().to_string(),
            bg.lambda().map(ToString::to_string).unwrap_or_default(),
            self.k.to_string(),
        ];
        fields.extend(Route::ALL.iter().map(|&r| self.poly_text(r)));
        fields.push(self.all_agree().to_string());
        fields.push(self.constant_check.map(|b| b.to_string()).unwrap_or_default());
        fields.iter().map(|f| csv_quote(f)).collect::<Vec<_>>().join(",")
    }

    /// One row per route: `kind,d,m,lambda,k,route,poly_sigma,agrees_with_all`.
    pub fn long_csv_rows(&self) -> Vec<String> {
        let bg = &self.background;
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let poly = match &e.result {
                    Ok(p) => p.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>().join(";"),
                    Err(err) => format!("error: {err}"),
                };
                let fields = [
                    kind_name(bg.kind()).to_string(),
                    bg.d().to_string(),
                    bg.m().to_string(),
                    bg.lambda().map(ToString::to_string).unwrap_or_default(),
                    self.k.to_string(),
                    e.route.to_string(),
                    poly,
                    self.agreement[i].iter().all(|&b| b).to_string(),
                ];
                fields.iter().map(|f| csv_quote(f)).collect::<Vec<_>>().join(",")
            })
            .collect()
    }
}

pub fn kind_name(kind: BackgroundKind) -> &'static str {
    match kind {
        BackgroundKind::QuasiEinstein => "quasi_einstein",
        BackgroundKind::GoverLeitner => "gover_leitner",
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[derive(Serialize)]
struct RouteJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    poly_sigma: Option<&'a SigmaPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

impl Serialize for RouteReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            background: &'a Background,
            k: u32,
            routes: BTreeMap<&'static str, RouteJson<'a>>,
            agreement: BTreeMap<&'static str, BTreeMap<&'static str, bool>>,
            constant_check: Option<bool>,
            all_agree: bool,
        }
        let routes = self
            .entries
            .iter()
            .map(|e| {
                let json = match &e.result {
                    Ok(p) => RouteJson { poly_sigma: Some(p), error: None },
                    Err(err) => RouteJson { poly_sigma: None, error: Some(err.as_str()) },
                };
                (e.route.name(), json)
            })
            .collect();
        let agreement = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let row =
                    self.entries.iter().enumerate().map(|(j, b)| (b.route.name(), self.agreement[i][j])).collect();
                (a.route.name(), row)
            })
            .collect();
        Repr {
            background: &self.background,
            k: self.k,
            routes,
            agreement,
            constant_check: self.constant_check,
            all_agree: self.all_agree(),
        }
        .serialize(serializer)
    }
}

/// Runs all five routes; a failing route is recorded in its cell.
pub fn cross_route_report(bg: &Background, k: u32) -> RouteReport {
    cross_route_report_with(bg, k, &GjmsOptions::default())
}

pub fn cross_route_report_with(bg: &Background, k: u32, opts: &GjmsOptions) -> RouteReport {
    let entries = Route::ALL
        .par_iter()
        .map(|&route| {
            let result = run_route(bg, k, route, opts).map(|p| p.poly).map_err(|e| e.to_string());
            RouteEntry { route, result }
        })
        .collect();
    let mut report = RouteReport { background: bg.clone(), k, entries, agreement: Vec::new(), constant_check: None };
    report.recompute();
    report
}

/// Parameter grid over one background family.
#[derive(Debug, Clone)]
pub struct Grid {
    pub kind: BackgroundKind,
    pub ds: Vec<u32>,
    pub ms: Vec<Rational>,
    /// Ignored for Gover-Leitner grids.
    pub lambdas: Vec<Rational>,
    pub ks: Vec<u32>,
}

impl Grid {
    /// Admissible `(background, k)` cells in nested `d, m, lambda, k` order.
    /// Invalid backgrounds and restricted `k` are skipped.
    pub fn cells(&self, opts: &GjmsOptions) -> Vec<(Background, u32)> {
        let mut out = Vec::new();
        for &d in &self.ds {
            for m in &self.ms {
                let bgs: Vec<Background> = match self.kind {
                    BackgroundKind::QuasiEinstein => self
                        .lambdas
                        .iter()
                        .filter_map(|lam| Background::quasi_einstein(d, m.clone(), lam.clone()).ok())
                        .collect(),
                    BackgroundKind::GoverLeitner => Background::gover_leitner(d, m.clone()).into_iter().collect(),
                };
                for bg in bgs {
                    for &k in &self.ks {
                        if opts.admit(&bg, k).is_ok() {
                            out.push((bg.clone(), k));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Evaluates every cell concurrently; the output order is that of
/// [`Grid::cells`].
pub fn build_table(grid: &Grid, opts: &GjmsOptions) -> Vec<RouteReport> {
    grid.cells(opts).par_iter().map(|(bg, k)| cross_route_report_with(bg, *k, opts)).collect()
}
