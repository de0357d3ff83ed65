//! Voronoi summation at arbitrary level as a two-sided numerical identity.
//!
//! The additive character e(an/q) is split as e(a₁n/q₁)e(a₂n/q₂), where q₂
//! collects the primes of q that divide N/(N, q). The q₂ part is expanded into
//! multiplicative twists, and each resulting twisted form is summed
//! classically at level D. This leaves one unimodular constant η_g(D₂) per
//! (form, D₂). It is measured once on a held-out test function and then frozen.

pub mod kernel;
pub mod twist;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arithforms::factor::{gcd, gcd_i, gcd_power, mod_inverse};
use crate::arithforms::{coeff_table, CoeffTable, NewformSpec};
use crate::error::{Error, Result};
pub use kernel::{kernel_integral, kernel_integral_ibp, kernel_integral_quad, Bump, KernelPlan};
pub use twist::{
    additive_twist_decompose, twisted_form_resolve, verify_twist_identity, TwistCheck, TwistDecomposition,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VoronoiSplit {
    pub n1: u64,
    pub n2: u64,
    pub q1: u64,
    pub q2: u64,
    pub a1: i64,
    pub a2: i64,
}

/// N₁ = (N, q), N₂ = N/N₁, q₂ = (N₂^∞, q), q₁ = q/q₂ and a/q ≡ a₁/q₁ + a₂/q₂ (mod 1).
pub fn split_fraction(a: i64, q: u64, level: u64) -> Result<VoronoiSplit> {
    if q == 0 || gcd_i(a, q as i64) != 1 {
        return Err(Error::NotCoprime(a, q as i64));
    }
    let n1 = gcd(level, q);
    let n2 = level / n1;
    let q2 = gcd_power(n2, q);
    let q1 = q / q2;
    let inv = |x: u64, m: u64| mod_inverse((x % m) as i64, m as i64).unwrap_or(0) as i128;
    let a1 = if q1 == 1 { 0 } else { (a as i128 * inv(q2, q1)).rem_euclid(q1 as i128) as i64 };
    let a2 = if q2 == 1 { 0 } else { (a as i128 * inv(q1, q2)).rem_euclid(q2 as i128) as i64 };
    Ok(VoronoiSplit { n1, n2, q1, q2, a1, a2 })
}

/// e(num/den) with the numerator reduced first.
fn e_frac(num: i128, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i128) as f64 / den as f64;
    Complex64::from_polar(1.0, TAU * r)
}

/// Σ λ(n) e(an/q) F(n) over the support of F.
pub fn voronoi_lhs(table: &CoeffTable, a: i64, q: u64, f: &Bump) -> Result<Complex64> {
    let lo = f.x0.ceil().max(1.0) as usize;
    let hi = f.x3.floor() as usize;
    if hi < lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    table.require(hi)?;
    let mut s = Complex64::new(0.0, 0.0);
    for n in lo..=hi {
        let w = f.eval(n as f64);
        let l = table.lambda(n);
        if w != 0.0 && l != 0.0 {
            s += e_frac(a as i128 * n as i128, q) * (l * w);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VoronoiParams {
    /// Target relative size of the estimated ℓ-tail.
    pub tol: f64,
    pub l_min: usize,
    pub l_max: usize,
}

impl Default for VoronoiParams {
    fn default() -> Self {
        VoronoiParams { tol: 1e-7, l_min: 1 << 12, l_max: 250_000 }
    }
}

/// One (m, g) block of the dual side.
#[derive(Debug, Clone, Serialize)]
pub struct DualBlock {
    pub m: u64,
    pub form: &'static str,
    pub d2: u64,
    pub r: u64,
    pub re_c: f64,
    pub im_c: f64,
    pub re_sum: f64,
    pub im_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhsReport {
    pub re: f64,
    pub im: f64,
    pub l_trunc: usize,
    /// C·Σ_{ℓ>L} d(ℓ)ℓ^{−9/4} with C the largest observed |I(ℓ)|ℓ^{9/4} in the upper half.
    pub tail_bound: f64,
    pub blocks: Vec<DualBlock>,
}

impl RhsReport {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

const CHUNK: usize = 4096;

// Σ_{ℓ>L} ln ℓ · ℓ^{−9/4}
fn tail_sum(l: f64) -> f64 {
    0.8 * l.powf(-1.25) * (l.ln() + 0.8)
}

struct Dual<'a> {
    table: &'a CoeffTable,
    f: Bump,
    plan: KernelPlan,
    q1: u64,
    r: u64,
    inv: i128,
}

impl Dual<'_> {
    // Σ_{ℓ in range} λ(ℓ) e(−inv·ℓ/q₁) I(ℓ), and max |I(ℓ)| ℓ^{9/4}
    fn chunk(&self, lo: usize, hi: usize) -> (Complex64, f64) {
        let mut s = Complex64::new(0.0, 0.0);
        let mut env = 0.0f64;
        let base = 4.0 * PI / ((self.q1 * self.r) as f64).sqrt();
        for l in lo..hi {
            let lam = self.table.lambda(l);
            if lam == 0.0 {
                continue;
            }
            let lf = l as f64;
            let i = self.plan.integral(&self.f, base * lf.sqrt());
            env = env.max(i.abs() * lf.powf(2.25));
            s += e_frac(-self.inv * l as i128, self.q1) * (lam * i);
        }
        (s, env)
    }
}

/// Right-hand side with the given η values per (form label, D₂).
pub fn voronoi_rhs_with(
    spec: &NewformSpec,
    a: i64,
    q: u64,
    f: &Bump,
    p: &VoronoiParams,
    eta: &dyn Fn(&NewformSpec, u64) -> Result<Complex64>,
) -> Result<RhsReport> {
    let sp = split_fraction(a, q, spec.level)?;
    let dec = additive_twist_decompose(spec, sp.a2, sp.q2)?;
    // aggregate by (m, form)
    let mut groups: BTreeMap<(u64, &'static str), (Complex64, NewformSpec)> = BTreeMap::new();
    for t in &dec.terms {
        groups.entry((t.m, t.form.label)).or_insert((Complex64::new(0.0, 0.0), t.form.clone())).0 += t.coeff;
    }
    let k = spec.weight;
    let ik = Complex64::new(0.0, 1.0).powu(k);
    let fq = f.compressed(sp.q1 as f64);
    let mut blocks = Vec::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    let mut l_trunc = 0;
    for ((m, _), (c, g)) in groups {
        if c.norm() < 1e-13 {
            continue;
        }
        let d = g.level;
        let d1 = gcd(d, sp.q1);
        let d2 = d / d1;
        let r = m * d2;
        let inv = if sp.q1 == 1 {
            0
        } else {
            let ar = (sp.a1 as i128 * r as i128).rem_euclid(sp.q1 as i128) as i64;
            mod_inverse(ar, sp.q1 as i64).ok_or(Error::NotCoprime(ar, sp.q1 as i64))? as i128
        };
        let coef = c * eta(&g, d2)? / (m as f64 * (d2 as f64).sqrt()) * ik * TAU;
        let table = coeff_table(&g, p.l_max + 1)?;
        let dual = Dual { table: &table, f: fq, plan: KernelPlan::new(&fq, k - 1), q1: sp.q1, r, inv };
        let mut sum = Complex64::new(0.0, 0.0);
        let mut env = 0.0f64;
        let mut l = 1usize;
        // fixed batches of chunks keep the summation order independent of threads
        loop {
            let starts: Vec<usize> = (0..8).map(|i| l + i * CHUNK).filter(|&s| s <= p.l_max).collect();
            if starts.is_empty() {
                break;
            }
            let parts: Vec<(Complex64, f64)> =
                starts.par_iter().map(|&s| dual.chunk(s, (s + CHUNK).min(p.l_max + 1))).collect();
            let upper = starts.len() * CHUNK;
            for (i, (s, e)) in parts.into_iter().enumerate() {
                sum += s;
                if l + i * CHUNK >= (l + upper) / 2 {
                    env = env.max(e);
                }
            }
            l += upper;
            let done = (l - 1).min(p.l_max);
            let bound = coef.norm() * env * tail_sum(done as f64);
            if done >= p.l_min && bound <= p.tol * (total + coef * sum).norm() {
                break;
            }
            if done >= p.l_max {
                break;
            }
        }
        let done = (l - 1).min(p.l_max);
        let bound = coef.norm() * env * tail_sum(done as f64);
        tail += bound;
        l_trunc = l_trunc.max(done);
        total += coef * sum;
        blocks.push(DualBlock {
            m,
            form: g.label,
            d2,
            r,
            re_c: coef.re,
            im_c: coef.im,
            re_sum: sum.re,
            im_sum: sum.im,
        });
    }
    Ok(RhsReport { re: total.re, im: total.im, l_trunc, tail_bound: tail, blocks })
}

/// Held-out test function used only to measure η.
pub const CALIBRATION_BUMP: Bump = Bump { x0: 700.0, x1: 1700.0, x2: 2900.0, x3: 3900.0 };

type EtaCache = Mutex<HashMap<(&'static str, u64), Complex64>>;

fn eta_cache() -> &'static EtaCache {
    static C: OnceLock<EtaCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaCalibration {
    pub re: f64,
    pub im: f64,
    pub q: u64,
    pub lhs_abs: f64,
}

/// Measures η_g(D₂) on the calibration bump with a = 1, q = D/D₂.
pub fn calibrate_eta_report(g: &NewformSpec, d2: u64) -> Result<EtaCalibration> {
    let d1 = g.level / d2;
    if !g.level.is_multiple_of(d2) || gcd(d1, d2) != 1 {
        return Err(Error::Invalid(format!("no calibration fraction for {} with D2 = {d2}", g.label)));
    }
    let q = d1;
    let p = VoronoiParams { tol: 1e-9, ..VoronoiParams::default() };
    let rhs = voronoi_rhs_with(g, 1, q, &CALIBRATION_BUMP, &p, &|_, _| Ok(Complex64::new(1.0, 0.0)))?;
    let table = coeff_table(g, CALIBRATION_BUMP.x3 as usize + 1)?;
    let lhs = voronoi_lhs(&table, 1, q, &CALIBRATION_BUMP)?;
    let eta = lhs / rhs.value();
    Ok(EtaCalibration { re: eta.re, im: eta.im, q, lhs_abs: lhs.norm() })
}

/// Cached η_g(D₂).
pub fn calibrated_eta(g: &NewformSpec, d2: u64) -> Result<Complex64> {
    if let Some(&e) = eta_cache().lock().expect("eta cache").get(&(g.label, d2)) {
        return Ok(e);
    }
    let c = calibrate_eta_report(g, d2)?;
    let e = Complex64::new(c.re, c.im);
    eta_cache().lock().expect("eta cache").insert((g.label, d2), e);
    Ok(e)
}

pub fn voronoi_rhs(spec: &NewformSpec, a: i64, q: u64, f: &Bump, p: &VoronoiParams) -> Result<RhsReport> {
    voronoi_rhs_with(spec, a, q, f, p, &calibrated_eta)
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiCheck {
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs: RhsReport,
    pub abs_err: f64,
    pub rel_err: f64,
}

pub fn voronoi_check(spec: &NewformSpec, a: i64, q: u64, f: &Bump, p: &VoronoiParams) -> Result<VoronoiCheck> {
    let table = coeff_table(spec, f.x3 as usize + 1)?;
    let lhs = voronoi_lhs(&table, a, q, f)?;
    let rhs = voronoi_rhs(spec, a, q, f, p)?;
    let abs_err = (lhs - rhs.value()).norm();
    Ok(VoronoiCheck { lhs_re: lhs.re, lhs_im: lhs.im, abs_err, rel_err: abs_err / lhs.norm(), rhs })
}
