//! Parallel scans of |L(1/2 + it)| against the Weyl and convexity scales.

use rayon::prelude::*;
use serde::Serialize;

use super::{analytic_conductor, critical_params, determine_root_number, smoothed};
use crate::arithforms::{coeff_table, NewformSpec};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// How the Farey parameter M0 is tied to t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum M0Rule {
    /// M0 = ⌈t^{2/3}⌉, the balancing choice.
    TwoThirds,
    /// M0 = ⌈c·t^{2/3}⌉.
    Scaled(f64),
}

impl M0Rule {
    pub fn m0(&self, t: f64) -> u64 {
        let c = match self {
            M0Rule::TwoThirds => 1.0,
            M0Rule::Scaled(c) => *c,
        };
        (c * t.powf(2.0 / 3.0)).ceil().max(1.0) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub re_l: f64,
    pub im_l: f64,
    pub abs_l: f64,
    /// |L| / (t^{1/3} ln t).
    pub weyl_ratio: f64,
    /// |L| / t^{1/2}.
    pub convexity_ratio: f64,
    pub conductor: f64,
    pub x_trunc: usize,
    pub m0: u64,
}

/// Evaluates every t in the grid; row order follows the grid regardless of
/// thread count. The coefficient table is sized once for the largest t.
pub fn subconvexity_scan(spec: &NewformSpec, t_grid: &[f64], rule: M0Rule) -> Result<Vec<ScanRow>> {
    if let Some(&bad) = t_grid.iter().find(|&&t| !(2.0..=1e4).contains(&t)) {
        return Err(Error::Invalid(format!("scan height {bad} outside [2, 1e4]")));
    }
    let eps = determine_root_number(spec)?;
    let p = critical_params();
    let t_max = t_grid.iter().cloned().fold(2.0, f64::max);
    let need = smoothed::terms_needed(spec.level, spec.weight, Complex64::new(0.5, t_max), &p);
    let table = coeff_table(spec, need)?;
    t_grid
        .par_iter()
        .map(|&t| {
            let v = smoothed::smoothed_l_critical(&table, eps, t, &p)?;
            let abs_l = v.value.norm();
            Ok(ScanRow {
                t,
                re_l: v.value.re,
                im_l: v.value.im,
                abs_l,
                weyl_ratio: abs_l / (t.cbrt() * t.ln()),
                convexity_ratio: abs_l / t.sqrt(),
                conductor: analytic_conductor(spec, t),
                x_trunc: v.terms,
                m0: rule.m0(t),
            })
        })
        .collect()
}

/// Running maxima of both ratios over rows with t ≥ `from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunningMax {
    pub t: f64,
    pub weyl: f64,
    pub convexity: f64,
}

pub fn running_maxima(rows: &[ScanRow], from: f64) -> Vec<RunningMax> {
    let (mut w, mut c) = (0.0f64, 0.0f64);
    rows.iter()
        .filter(|r| r.t >= from)
        .map(|r| {
            w = w.max(r.weyl_ratio);
            c = c.max(r.convexity_ratio);
            RunningMax { t: r.t, weyl: w, convexity: c }
        })
        .collect()
}

/// Maximum of a ratio over consecutive windows of `width` in t; shows whether
/// a normalization flattens or decays.
pub fn window_maxima(rows: &[ScanRow], width: f64, pick: impl Fn(&ScanRow) -> f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        let start = (r.t / width).floor() * width;
        match out.last_mut() {
            Some((s, m)) if *s == start => *m = m.max(pick(r)),
            _ => out.push((start, pick(r))),
        }
    }
    out
}
