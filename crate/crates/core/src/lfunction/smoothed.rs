//! Smoothed approximate functional equation evaluated by trapezoidal
//! quadrature of the Mellin–Barnes weight on vertical lines.
//!
//! For a kernel G (entire, even, G(0) = 1) and w = s + (k−1)/2,
//!
//!   L(s) = Σ λ(n) n^{−s} V_w(x_n / Y)
//!        + ε N^{1/2−s} Γ_C(k−w)/Γ_C(w) Σ λ(n) n^{s−1} V_{k−w}(x_n Y),
//!
//! with x_n = 2πn/√N and V_w(x) = (1/2πi) ∫ G(u) Γ(w+u)/Γ(w) x^{−u} du/u.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arithforms::CoeffTable;
use crate::error::{Error, Result};
use crate::special::gamma::{gamma_c, ln_gamma};
use crate::special::CutoffG;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// G(u) = exp(u²/β²).
    Gaussian { beta: f64 },
    /// Mellin kernel of the compactly supported cutoff g.
    Cutoff(CutoffG),
}

impl Kernel {
    fn eval(&self, u: Complex64) -> Complex64 {
        match self {
            Kernel::Gaussian { beta } => (u * u / (beta * beta)).exp(),
            Kernel::Cutoff(g) => g.mellin(u),
        }
    }

    // V_w(x) is negligible once x exceeds reach·|w| (plus a margin)
    fn reach(&self, tol: f64) -> f64 {
        match self {
            Kernel::Gaussian { beta } => (2.0 / beta * (1.0 / tol).ln().sqrt()).exp(),
            Kernel::Cutoff(g) => g.support_end(),
        }
    }
}

/// Trapezoidal discretization of V_w on the line Re u = c.
#[derive(Debug, Clone)]
struct Line {
    c: f64,
    v0: f64,
    h: f64,
    // weights include G(u) Γ(w+u)/Γ(w) / u · h/(2π)
    weights: Vec<Complex64>,
    residue: f64,
}

const STEP: f64 = 0.08;

fn build_line(w: Complex64, kernel: &Kernel, c: f64, residue: f64, tol: f64) -> Result<Line> {
    let lw = ln_gamma(w)?;
    let f = |v: f64| -> Result<Complex64> {
        let u = Complex64::new(c, v);
        Ok(kernel.eval(u) * (ln_gamma(w + u)? - lw).exp() / u)
    };
    let mut peak = 0.0f64;
    let mut vals_pos = Vec::new();
    let mut vals_neg = Vec::new();
    for (dir, store) in [(1.0, &mut vals_pos), (-1.0, &mut vals_neg)] {
        let mut j = if dir > 0.0 { 0 } else { 1 };
        loop {
            let v = dir * j as f64 * STEP;
            let val = f(v)?;
            peak = peak.max(val.norm());
            store.push(val);
            if (val.norm() < tol * peak.max(1.0) && v.abs() > 5.0) || v.abs() > 600.0 {
                break;
            }
            j += 1;
        }
    }
    let v0 = -(vals_neg.len() as f64) * STEP;
    let scale = STEP / TAU;
    let weights: Vec<Complex64> = vals_neg.into_iter().rev().chain(vals_pos).map(|z| z * scale).collect();
    Ok(Line { c, v0, h: STEP, weights, residue })
}

/// Accumulates Σ_n coef(n) n^{−z} V_w(B n) for the terms assigned to a line.
struct LineSum<'a> {
    line: &'a Line,
    acc: Vec<Complex64>,
    plain: Complex64,
}

impl<'a> LineSum<'a> {
    fn new(line: &'a Line) -> Self {
        LineSum { line, acc: vec![Complex64::new(0.0, 0.0); line.weights.len()], plain: Complex64::new(0.0, 0.0) }
    }

    // add coef · n^{-z} · (B n)^{-u_j} for all nodes
    fn add(&mut self, coef: Complex64, n: f64) {
        let ln = n.ln();
        let base = coef * (-self.line.c * ln).exp();
        let mut z = base * Complex64::from_polar(1.0, -self.line.v0 * ln);
        let r = Complex64::from_polar(1.0, -self.line.h * ln);
        for a in self.acc.iter_mut() {
            *a += z;
            z *= r;
        }
        self.plain += coef;
    }

    fn finish(&self, b: f64) -> Complex64 {
        let lb = b.ln();
        let mut z = Complex64::from_polar((-self.line.c * lb).exp(), -self.line.v0 * lb);
        let r = Complex64::from_polar(1.0, -self.line.h * lb);
        let mut s = Complex64::new(0.0, 0.0);
        for (wgt, a) in self.line.weights.iter().zip(&self.acc) {
            s += wgt * a * z;
            z *= r;
        }
        s + self.plain * self.line.residue
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SmoothedParams {
    pub kernel: Kernel,
    /// Split parameter; any Y > 0 gives the same value.
    pub y: f64,
    pub tol: f64,
}

impl Default for SmoothedParams {
    fn default() -> Self {
        SmoothedParams { kernel: Kernel::Gaussian { beta: 4.0 }, y: 1.0, tol: 1e-15 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SmoothedValue {
    pub value: Complex64,
    /// Number of coefficients touched.
    pub terms: usize,
    pub nodes: usize,
}

/// One side: Σ_n λ(n) n^{−z} V_w(x_n · scale).
fn side(
    table: &CoeffTable,
    z: Complex64,
    w: Complex64,
    scale: f64,
    p: &SmoothedParams,
    n_max: usize,
) -> Result<(Complex64, usize)> {
    let root_n = (table.level as f64).sqrt();
    let b = TAU / root_n * scale;
    let c0 = 0.5;
    let pos_c = (-w.re).max(0.0) + c0;
    let pos = build_line(w, &p.kernel, pos_c, 0.0, p.tol)?;
    let neg = if w.re > 2.0 * c0 { Some(build_line(w, &p.kernel, -c0, 1.0, p.tol)?) } else { None };
    let mut sp = LineSum::new(&pos);
    let mut sn = neg.as_ref().map(LineSum::new);
    let split = w.norm();
    for n in 1..=n_max {
        let lam = table.lambda(n);
        if lam == 0.0 {
            continue;
        }
        let nf = n as f64;
        let coef = (-z * nf.ln()).exp() * lam;
        match sn.as_mut() {
            Some(s) if b * nf < split => s.add(coef, nf),
            _ => sp.add(coef, nf),
        }
    }
    let mut total = sp.finish(b);
    let mut nodes = pos.weights.len();
    if let (Some(s), Some(l)) = (sn.as_ref(), neg.as_ref()) {
        total += s.finish(b);
        nodes += l.weights.len();
    }
    Ok((total, nodes))
}

fn reach_terms(w: Complex64, scale: f64, level: u64, p: &SmoothedParams) -> usize {
    let m = w.norm();
    let x_max = p.kernel.reach(p.tol) * (m + 30.0 + 6.0 * m.sqrt());
    (x_max * (level as f64).sqrt() / (TAU * scale)).ceil() as usize
}

/// Coefficients needed to evaluate at `s` with these parameters.
pub fn terms_needed(level: u64, weight: u32, s: Complex64, p: &SmoothedParams) -> usize {
    let w = s + (weight as f64 - 1.0) / 2.0;
    let wd = Complex64::new(weight as f64, 0.0) - w;
    reach_terms(w, 1.0 / p.y, level, p).max(reach_terms(wd, p.y, level, p))
}

/// L(s) for a self-dual form with root number `eps`.
pub fn smoothed_l(table: &CoeffTable, eps: f64, s: Complex64, p: &SmoothedParams) -> Result<SmoothedValue> {
    let k = table.weight as f64;
    let w = s + (k - 1.0) / 2.0;
    let wd = Complex64::new(k, 0.0) - w;
    let n1 = reach_terms(w, 1.0 / p.y, table.level, p);
    let n2 = reach_terms(wd, p.y, table.level, p);
    let need = n1.max(n2);
    if need > table.limit {
        return Err(Error::TableTooShort { need, have: table.limit });
    }
    let (s1, nodes1) = side(table, s, w, 1.0 / p.y, p, n1)?;
    let one = Complex64::new(1.0, 0.0);
    let (s2, nodes2) = side(table, one - s, wd, p.y, p, n2)?;
    let nf = (table.level as f64).ln();
    let pref = ((0.5 - s) * nf).exp() * gamma_c(wd)? / gamma_c(w)? * eps;
    Ok(SmoothedValue { value: s1 + pref * s2, terms: need, nodes: nodes1 + nodes2 })
}

/// Same as `smoothed_l` but with the dual gamma factor at s = 1/2 + it
/// computed through the unimodular ratio, which avoids underflow at large t.
pub fn smoothed_l_critical(table: &CoeffTable, eps: f64, t: f64, p: &SmoothedParams) -> Result<SmoothedValue> {
    let k = table.weight as f64;
    let s = Complex64::new(0.5, t);
    let w = s + (k - 1.0) / 2.0;
    let wd = Complex64::new(k, 0.0) - w;
    let n1 = reach_terms(w, 1.0 / p.y, table.level, p);
    let n2 = reach_terms(wd, p.y, table.level, p);
    let need = n1.max(n2);
    if need > table.limit {
        return Err(Error::TableTooShort { need, have: table.limit });
    }
    let (s1, nodes1) = side(table, s, w, 1.0 / p.y, p, n1)?;
    let (s2, nodes2) = side(table, s.conj(), wd, p.y, p, n2)?;
    let pref =
        Complex64::from_polar(eps, -t * (table.level as f64).ln()) * crate::special::gamma_ratio_unit(table.weight, t);
    Ok(SmoothedValue { value: s1 + pref * s2, terms: need, nodes: nodes1 + nodes2 })
}
