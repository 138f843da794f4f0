//! Heuristic excess-risk bounds as a function of the recycling ratio `c`.
//!
//! With a training set of `m = cT` points and `T` iterations:
//!
//! * SGD: `1/(lambda T) + (lambda/2)|w0|^2 + sqrt(d/(cT))`
//! * reduced variance: `exp(-T/(1/lambda + cT)) + (lambda/2)|w0|^2 + sqrt(d/(cT))`
//!
//! All hidden constants are 1, so only the shapes are meaningful.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub norm_w0: f64,
    /// Expected loss of the reference predictor; shifts the risk column only.
    pub risk_w0: f64,
    pub d: usize,
    pub t: u64,
    pub lambda: f64,
    pub c: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.norm_w0 > 0.0
            && self.norm_w0.is_finite()
            && self.risk_w0.is_finite()
            && self.d > 0
            && self.t > 0
            && self.lambda > 0.0
            && self.lambda.is_finite()
            && self.c > 0.0
            && self.c <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid bound parameters {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    Sgd,
    Rv,
}

impl FromStr for BoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" => Ok(BoundMode::Sgd),
            "rv" => Ok(BoundMode::Rv),
            other => Err(Error::InvalidParameter(format!(
                "unknown bound mode '{other}'"
            ))),
        }
    }
}

impl fmt::Display for BoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMode::Sgd => "sgd",
            BoundMode::Rv => "rv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaPolicy {
    /// Use `params.lambda` at every `c`.
    Fixed,
    /// Minimize the bound over `lambda` separately at each `c`.
    Minimized,
}

impl FromStr for LambdaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(LambdaPolicy::Fixed),
            "minimized" | "min" => Ok(LambdaPolicy::Minimized),
            other => Err(Error::InvalidParameter(format!(
                "unknown lambda policy '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub c: f64,
    pub lambda: f64,
    pub optimization: f64,
    pub regularization: f64,
    pub estimation: f64,
    /// Sum of the three terms: the excess-risk bound.
    pub total: f64,
    /// `risk_w0 + total`.
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub mode: BoundMode,
    pub policy: LambdaPolicy,
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    /// The grid point with the smallest bound; ties go to the larger `c`.
    pub fn argmin(&self) -> Option<&BoundPoint> {
        self.points
            .iter()
            .fold(None, |best: Option<&BoundPoint>, p| match best {
                Some(b) if b.total < p.total || (b.total == p.total && b.c > p.c) => Some(b),
                _ => Some(p),
            })
    }
}

/// `n` log-spaced values in `[lo, hi]`, both endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Default `c` grid: 400 log-spaced points in `[1e-3, 1]`.
pub fn default_c_grid() -> Vec<f64> {
    log_grid(1e-3, 1.0, 400)
}

fn point(p: &BoundParams, mode: BoundMode, lambda: f64, c: f64) -> BoundPoint {
    let t = p.t as f64;
    let optimization = match mode {
        BoundMode::Sgd => 1.0 / (lambda * t),
        BoundMode::Rv => (-t / (1.0 / lambda + c * t)).exp(),
    };
    let regularization = 0.5 * lambda * p.norm_w0 * p.norm_w0;
    let estimation = (p.d as f64 / (c * t)).sqrt();
    let total = optimization + regularization + estimation;
    BoundPoint {
        c,
        lambda,
        optimization,
        regularization,
        estimation,
        total,
        risk: p.risk_w0 + total,
    }
}

/// The bound at `params.c` and `params.lambda`.
pub fn bound_at(params: &BoundParams, mode: BoundMode) -> Result<BoundPoint> {
    params.validate()?;
    Ok(point(params, mode, params.lambda, params.c))
}

fn minimize_lambda(p: &BoundParams, mode: BoundMode, c: f64) -> BoundPoint {
    // coarse log grid, then golden-section refinement in log space
    let grid = log_grid(1e-14, 1e4, 721);
    let (best_i, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &l)| (i, point(p, mode, l, c).total))
        .fold(
            (0, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        );
    let lo = grid[best_i.saturating_sub(1)].ln();
    let hi = grid[(best_i + 1).min(grid.len() - 1)].ln();
    let f = |x: f64| point(p, mode, x.exp(), c).total;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let refined = point(p, mode, ((a + b) / 2.0).exp(), c);
    let coarse = point(p, mode, grid[best_i], c);
    if refined.total <= coarse.total {
        refined
    } else {
        coarse
    }
}

/// Evaluates the bound on every `c` in `c_grid`. `params.c` is ignored.
pub fn bound_curves(
    params: &BoundParams,
    mode: BoundMode,
    policy: LambdaPolicy,
    c_grid: &[f64],
) -> Result<BoundCurve> {
    BoundParams { c: 1.0, ..*params }.validate()?;
    if let Some(bad) = c_grid.iter().find(|&&c| !(c > 0.0 && c <= 1.0)) {
        return Err(Error::InvalidParameter(format!("c = {bad} outside (0, 1]")));
    }
    let points = c_grid
        .iter()
        .map(|&c| match policy {
            LambdaPolicy::Fixed => point(params, mode, params.lambda, c),
            LambdaPolicy::Minimized => minimize_lambda(params, mode, c),
        })
        .collect();
    Ok(BoundCurve {
        mode,
        policy,
        points,
    })
}
