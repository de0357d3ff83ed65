//! L-function evaluation: Dirichlet series, completed Λ, root numbers, the
//! approximate functional equation, coefficient averages and scans.

pub mod scan;
pub mod smoothed;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::arithforms::{coeff_table, CoeffTable, NewformSpec};
use crate::error::{Error, Result};
use crate::special::gamma::{gamma_c, upper_incomplete_gamma};
use crate::special::{gamma_ratio_unit, CutoffG};
use smoothed::{smoothed_l, smoothed_l_critical, terms_needed, Kernel, SmoothedParams};

pub use scan::{running_maxima, subconvexity_scan, window_maxima, M0Rule, RunningMax, ScanRow};

/// C = (N/π²)|(k+1)/2 + it||(k+3)/2 + it|.
pub fn analytic_conductor(spec: &NewformSpec, t: f64) -> f64 {
    let k = spec.weight as f64;
    spec.level as f64 / (PI * PI) * ((k + 1.0) / 2.0).hypot(t) * ((k + 3.0) / 2.0).hypot(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Σ_{n>X} d(n) n^{−σ}, estimated by its integral.
    pub tail_bound: f64,
}

/// Crude tail bound Σ_{n>X} d(n) n^{−σ} ≈ X^{1−σ}(ln X/(σ−1) + 1/(σ−1)² + 2γ/(σ−1)).
pub fn divisor_tail(x: f64, sigma: f64) -> f64 {
    let a = sigma - 1.0;
    x.powf(-a) * (x.ln() / a + 1.0 / (a * a) + 2.0 * 0.577_215_664_901_532_9 / a)
}

/// Partial sum Σ_{n≤X} λ(n) n^{−s}.
pub fn dirichlet_series(table: &CoeffTable, s: Complex64, x: usize) -> Result<SeriesValue> {
    if s.re < 1.5 {
        return Err(Error::Invalid(format!("Re s = {} below 1.5", s.re)));
    }
    table.require(x)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=x {
        let l = table.lambda(n);
        if l != 0.0 {
            acc += (-s * (n as f64).ln()).exp() * l;
        }
    }
    Ok(SeriesValue { value: acc, tail_bound: divisor_tail(x as f64, s.re) })
}

// Σ_n a_n x_n^{−w} Γ(w, x_n y) and Σ_n a_n x_n^{−(k−w)} Γ(k−w, x_n/y) with x_n = 2πn/√N.
fn split_sums(table: &CoeffTable, w: f64, y: f64) -> Result<(f64, f64)> {
    let k = table.weight as f64;
    let rn = (table.level as f64).sqrt();
    let ymin = y.min(1.0 / y);
    let x_max = (70.0 + 4.0 * k) / ymin;
    let n_max = (x_max * rn / TAU).ceil() as usize;
    table.require(n_max)?;
    let (mut p, mut q) = (0.0, 0.0);
    for n in 1..=n_max {
        let l = table.lambda(n);
        if l == 0.0 {
            continue;
        }
        let nf = n as f64;
        let x = TAU * nf / rn;
        let a = l * nf.powf((k - 1.0) / 2.0);
        p += a * x.powf(-w) * upper_incomplete_gamma(w, x * y)?;
        q += a * x.powf(-(k - w)) * upper_incomplete_gamma(k - w, x / y)?;
    }
    Ok((p, q))
}

#[derive(Debug, Clone, Serialize)]
pub struct RootNumberReport {
    pub value: f64,
    /// Unsnapped estimates at each trial s.
    pub raw: Vec<(f64, f64)>,
}

/// Root number from the Y-independence of the incomplete-gamma split of Λ.
/// For each real trial s, P(Y₁) + εQ(Y₁) = P(Y₂) + εQ(Y₂) is solved for ε.
pub fn root_number_report(spec: &NewformSpec) -> Result<RootNumberReport> {
    let table = coeff_table(spec, 4096)?;
    let k = spec.weight as f64;
    let (y1, y2) = (0.8, 1.25);
    let mut raw = Vec::new();
    for s in [1.5, 2.0, 2.5] {
        let w = s + (k - 1.0) / 2.0;
        let (p1, q1) = split_sums(&table, w, y1)?;
        let (p2, q2) = split_sums(&table, w, y2)?;
        let den = q2 - q1;
        if den.abs() < 1e-12 * (q1.abs() + q2.abs()) {
            return Err(Error::NoiseFloor(format!("{}: degenerate split at s = {s}", spec.label)));
        }
        raw.push((s, (p1 - p2) / den));
    }
    let first = raw[0].1;
    if raw.iter().any(|&(_, e)| (e - first).abs() > 1e-6) {
        return Err(Error::NoiseFloor(format!("{}: root number estimates disagree: {raw:?}", spec.label)));
    }
    let snapped = first.round();
    if snapped.abs() != 1.0 || (first - snapped).abs() > 1e-6 {
        return Err(Error::NoiseFloor(format!("{}: estimate {first} is not ±1", spec.label)));
    }
    Ok(RootNumberReport { value: snapped, raw })
}

/// Cached root number ε_f ∈ {±1}.
pub fn determine_root_number(spec: &NewformSpec) -> Result<f64> {
    static C: OnceLock<Mutex<HashMap<&'static str, f64>>> = OnceLock::new();
    let cache = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&e) = cache.lock().expect("root cache").get(spec.label) {
        return Ok(e);
    }
    let e = root_number_report(spec)?.value;
    cache.lock().expect("root cache").insert(spec.label, e);
    Ok(e)
}

/// Λ(s) for real s via the incomplete-gamma split at `y`.
pub fn completed_lambda_real(spec: &NewformSpec, s: f64, y: f64) -> Result<f64> {
    let eps = determine_root_number(spec)?;
    let table = coeff_table(spec, 4096)?;
    let k = spec.weight as f64;
    let w = s + (k - 1.0) / 2.0;
    let (p, q) = split_sums(&table, w, y)?;
    let n = spec.level as f64;
    Ok(2.0 * n.powf(-s / 2.0 - (k - 1.0) / 4.0) * (p + eps * q))
}

fn lambda_params(y: f64) -> SmoothedParams {
    SmoothedParams { kernel: Kernel::Gaussian { beta: 3.0 }, y, tol: 1e-15 }
}

/// Λ(s) = Γ_C(s + (k−1)/2) L(s); real s use the incomplete-gamma split,
/// complex s the Gaussian-smoothed functional equation.
pub fn completed_lambda(spec: &NewformSpec, s: Complex64) -> Result<Complex64> {
    completed_lambda_y(spec, s, 1.1)
}

/// As `completed_lambda`, with an explicit split parameter Y.
pub fn completed_lambda_y(spec: &NewformSpec, s: Complex64, y: f64) -> Result<Complex64> {
    if s.im == 0.0 {
        return Ok(Complex64::new(completed_lambda_real(spec, s.re, y)?, 0.0));
    }
    let eps = determine_root_number(spec)?;
    let p = lambda_params(y);
    let table = coeff_table(spec, terms_needed(spec.level, spec.weight, s, &p))?;
    let l = smoothed_l(&table, eps, s, &p)?.value;
    let w = s + (spec.weight as f64 - 1.0) / 2.0;
    Ok(gamma_c(w)? * l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AfeMode {
    /// The two g(n/√C)-weighted sums as written, without correction.
    Literal,
    /// The smoothed functional equation whose Mellin kernel is that of g.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Afe(AfeMode),
    CompletedLambda,
    Smoothed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValueRecord {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub method: Method,
    pub truncation: usize,
    pub error_estimate: f64,
}

impl LValueRecord {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// L(1/2 + it) by the approximate functional equation with cutoff `g`.
pub fn afe_evaluate(spec: &NewformSpec, t: f64, g: &CutoffG, mode: AfeMode) -> Result<LValueRecord> {
    let eps = determine_root_number(spec)?;
    match mode {
        AfeMode::Literal => {
            let c = analytic_conductor(spec, t);
            let rc = c.sqrt();
            let x = (g.support_end() * rc).floor() as usize;
            let table = coeff_table(spec, x.max(1))?;
            let (mut a, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for n in 1..=x {
                let l = table.lambda(n);
                let wt = g.eval(n as f64 / rc);
                if l == 0.0 || wt == 0.0 {
                    continue;
                }
                let nf = n as f64;
                let amp = l * wt / nf.sqrt();
                a += Complex64::from_polar(amp, -t * nf.ln());
                b += Complex64::from_polar(amp, t * nf.ln());
            }
            let pref = Complex64::from_polar(eps, -t * (spec.level as f64).ln()) * gamma_ratio_unit(spec.weight, t);
            let v = a + pref * b;
            let err = (spec.level as f64).sqrt() * c.powf(-0.25);
            Ok(LValueRecord { t, re: v.re, im: v.im, method: Method::Afe(mode), truncation: x, error_estimate: err })
        }
        AfeMode::Exact => {
            if t.abs() > 20.0 {
                return Err(Error::Invalid(format!("exact cutoff kernel loses precision beyond |t| = 20 (t = {t})")));
            }
            let p = SmoothedParams { kernel: Kernel::Cutoff(*g), y: 1.0, tol: 1e-15 };
            smoothed_record(spec, eps, t, &p, Method::Afe(mode))
        }
    }
}

fn smoothed_record(spec: &NewformSpec, eps: f64, t: f64, p: &SmoothedParams, method: Method) -> Result<LValueRecord> {
    let s = Complex64::new(0.5, t);
    let table = coeff_table(spec, terms_needed(spec.level, spec.weight, s, p))?;
    let r = smoothed_l_critical(&table, eps, t, p)?;
    // cancellation inside the trapezoid sums scales with e^{π²β²/16}
    let amplification = match p.kernel {
        Kernel::Gaussian { beta } => (PI * PI * beta * beta / 16.0).exp(),
        Kernel::Cutoff(_) => (PI * t.abs() / 2.0).exp(),
    };
    let err = 1e-15 * amplification * (r.terms as f64).sqrt() + p.tol;
    Ok(LValueRecord { t, re: r.value.re, im: r.value.im, method, truncation: r.terms, error_estimate: err })
}

/// Parameters used for L(1/2 + it) at arbitrary height.
pub fn critical_params() -> SmoothedParams {
    SmoothedParams { kernel: Kernel::Gaussian { beta: 4.0 }, y: 1.0, tol: 1e-13 }
}

/// L(1/2 + it) by the Gaussian-smoothed functional equation; usable at any t.
pub fn lvalue_critical(spec: &NewformSpec, t: f64) -> Result<LValueRecord> {
    let eps = determine_root_number(spec)?;
    smoothed_record(spec, eps, t, &critical_params(), Method::Smoothed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffStats {
    pub x: usize,
    /// X^{−1} Σ |λ(n)|².
    pub rankin_mean: f64,
    /// X^{−1} Σ |λ(n)|.
    pub abs_mean: f64,
    /// X^{−1/2} Σ |λ(n)| n^{−1/2}.
    pub half_weighted: f64,
    /// Σ_{n≤X} |λ(n)| n^{−5/4}.
    pub sum_5_4: f64,
    /// Σ_{n≤X} |λ(n)| n^{−7/4}.
    pub sum_7_4: f64,
    /// Exponent in the (log x)^{−δ} savings; fixed at 0.
    pub delta: f64,
}

pub fn coeff_average_stats(spec: &NewformSpec, x: usize) -> Result<CoeffStats> {
    let table = coeff_table(spec, x.max(1))?;
    let mut st =
        CoeffStats { x, rankin_mean: 0.0, abs_mean: 0.0, half_weighted: 0.0, sum_5_4: 0.0, sum_7_4: 0.0, delta: 0.0 };
    for n in 1..=x {
        let a = table.lambda(n).abs();
        let nf = n as f64;
        st.rankin_mean += a * a;
        st.abs_mean += a;
        st.half_weighted += a / nf.sqrt();
        st.sum_5_4 += a * nf.powf(-1.25);
        st.sum_7_4 += a * nf.powf(-1.75);
    }
    let xf = x as f64;
    st.rankin_mean /= xf;
    st.abs_mean /= xf;
    st.half_weighted /= xf.sqrt();
    Ok(st)
}

/// Σ_{M1≤n≤M2} λ(n) n^{−it}, Kahan-compensated.
pub fn block_sum(table: &CoeffTable, m1: usize, m2: usize, t: f64) -> Result<Complex64> {
    table.require(m2)?;
    let (mut re, mut im) = (Kahan::default(), Kahan::default());
    for n in m1.max(1)..=m2 {
        let l = table.lambda(n);
        if l != 0.0 {
            let z = Complex64::from_polar(l, -t * (n as f64).ln());
            re.add(z.re);
            im.add(z.im);
        }
    }
    Ok(Complex64::new(re.sum, im.sum))
}

/// Plain left-to-right version of `block_sum`.
pub fn block_sum_plain(table: &CoeffTable, m1: usize, m2: usize, t: f64) -> Result<Complex64> {
    table.require(m2)?;
    Ok((m1.max(1)..=m2).map(|n| Complex64::from_polar(table.lambda(n), -t * (n as f64).ln())).sum())
}

#[derive(Debug, Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}
