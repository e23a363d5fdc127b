//! Decay-law fits, curve crossings and parameter scans.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    Exponential,
    PowerLaw,
}

impl DecayModel {
    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::Exponential => "exponential",
            DecayModel::PowerLaw => "power_law",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: DecayModel,
    /// Decay rate `κ` in `y = A e^{−κx}`, or exponent `p` in `y = A x^p`.
    pub rate_or_exponent: f64,
    /// `ln A`.
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

pub const MIN_FIT_POINTS: usize = 5;

/// Ordinary least squares `v = a + b u`; returns `(a, b, r²)`.
fn ols(u: &[f64], v: &[f64]) -> (f64, f64, f64) {
    let n = u.len() as f64;
    let (mu, mv) = (u.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let (mut suu, mut suv, mut svv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        suu += (a - mu) * (a - mu);
        suv += (a - mu) * (b - mv);
        svv += (b - mv) * (b - mv);
    }
    let slope = if suu > 0.0 { suv / suu } else { 0.0 };
    let intercept = mv - slope * mu;
    let ss_res: f64 = u.iter().zip(v).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if svv > 0.0 { (1.0 - ss_res / svv).clamp(0.0, 1.0) } else { 1.0 };
    (intercept, slope, r2)
}

fn check(points: &[(f64, f64)], positive_x: bool) -> Result<()> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { min: MIN_FIT_POINTS, got: points.len() });
    }
    for &(x, y) in points {
        if !(y > 0.0) {
            return Err(Error::NonPositive { value: y });
        }
        if positive_x && !(x > 0.0) {
            return Err(Error::NonPositive { value: x });
        }
    }
    Ok(())
}

/// Points whose abscissa lies in `[lo, hi]`.
pub fn window(points: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    points.iter().copied().filter(|&(x, _)| x >= lo && x <= hi).collect()
}

fn sorted(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p
}

fn span(points: &[(f64, f64)]) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
}

/// Fits `y = A e^{−κx}` by least squares on `(x, ln y)`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    check(points, false)?;
    // sorting makes the summation order, and so the result, independent of input order
    let p = sorted(points);
    let u: Vec<f64> = p.iter().map(|q| q.0).collect();
    let v: Vec<f64> = p.iter().map(|q| q.1.ln()).collect();
    let (a, b, r2) = ols(&u, &v);
    Ok(FitResult { model: DecayModel::Exponential, rate_or_exponent: -b, intercept: a, r_squared: r2, window: span(&p) })
}

/// Fits `y = A x^p` by least squares on `(ln x, ln y)`.
pub fn fit_power(points: &[(f64, f64)]) -> Result<FitResult> {
    check(points, true)?;
    let p = sorted(points);
    let u: Vec<f64> = p.iter().map(|q| q.0.ln()).collect();
    let v: Vec<f64> = p.iter().map(|q| q.1.ln()).collect();
    let (a, b, r2) = ols(&u, &v);
    Ok(FitResult { model: DecayModel::PowerLaw, rate_or_exponent: b, intercept: a, r_squared: r2, window: span(&p) })
}

/// Straight-line fit `y = a + b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on raw `(x, y)`; needs three points.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { min: 3, got: points.len() });
    }
    let p = sorted(points);
    let u: Vec<f64> = p.iter().map(|q| q.0).collect();
    let v: Vec<f64> = p.iter().map(|q| q.1).collect();
    let (a, b, r2) = ols(&u, &v);
    Ok(LinearFit { slope: b, intercept: a, r_squared: r2 })
}

fn interp_log(curve: &[(f64, f64)], x: f64) -> f64 {
    let k = curve.partition_point(|p| p.0 < x);
    if k < curve.len() && curve[k].0 == x {
        return curve[k].1.ln();
    }
    let (a, b) = (curve[k - 1], curve[k]);
    let s = (x - a.0) / (b.0 - a.0);
    a.1.ln() + s * (b.1.ln() - a.1.ln())
}

/// Abscissa where two positive curves cross. Each curve is interpolated linearly in `ln y`
/// on the union of both abscissa sets inside the shared window.
pub fn crossover(curve1: &[(f64, f64)], curve2: &[(f64, f64)]) -> Result<f64> {
    for c in [curve1, curve2] {
        if c.len() < 2 {
            return Err(Error::TooFewPoints { min: 2, got: c.len() });
        }
        if let Some(p) = c.iter().find(|p| !(p.1 > 0.0)) {
            return Err(Error::NonPositive { value: p.1 });
        }
    }
    let (c1, c2) = (sorted(curve1), sorted(curve2));
    let lo = c1[0].0.max(c2[0].0);
    let hi = c1[c1.len() - 1].0.min(c2[c2.len() - 1].0);
    if !(hi > lo) {
        return Err(Error::NoCrossing);
    }
    let mut xs: Vec<f64> = c1.iter().chain(&c2).map(|p| p.0).filter(|&x| x >= lo && x <= hi).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let diff: Vec<f64> = xs.iter().map(|&x| interp_log(&c1, x) - interp_log(&c2, x)).collect();

    let mut roots = Vec::new();
    for k in 0..xs.len() {
        if diff[k] == 0.0 {
            roots.push(xs[k]);
        } else if k + 1 < xs.len() && diff[k + 1] != 0.0 && (diff[k] < 0.0) != (diff[k + 1] < 0.0) {
            let s = diff[k] / (diff[k] - diff[k + 1]);
            roots.push(xs[k] + s * (xs[k + 1] - xs[k]));
        }
    }
    match roots.len() {
        0 => Err(Error::NoCrossing),
        1 => Ok(roots[0]),
        count => Err(Error::MultipleCrossings { count }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow<T> {
    pub value: f64,
    pub outcome: Result<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable<T> {
    pub parameter: String,
    pub rows: Vec<ScanRow<T>>,
}

impl<T> ScanTable<T> {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.outcome.is_err())
    }

    pub fn ok_rows(&self) -> impl Iterator<Item = (f64, &T)> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(|t| (r.value, t)))
    }
}

/// Evaluates `f` at every value (in parallel), keeping input order and per-row failures.
pub fn scan<T, F>(parameter: &str, values: &[f64], f: F) -> Result<ScanTable<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::NotMonotone);
    }
    let rows = values.par_iter().map(|&v| ScanRow { value: v, outcome: f(v) }).collect();
    Ok(ScanTable { parameter: parameter.to_string(), rows })
}
