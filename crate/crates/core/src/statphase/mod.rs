//! Stationary phase for the dual Bessel integrals of one Farey block.
//!
//! For the block j with α_j = −u/v = −a/q + c/d and a dual index ℓ with
//! modulus r, the integral
//!
//!   I^±(ℓ) = ∫ x^{−1/4} ω_j(x) e(φ_±(x)) dx,
//!   φ_±(x) = −(t/2π) log x − α_j x ∓ 2 (ℓx/(r q²))^{1/2} ∓ 1/8,
//!
//! has a single stationary point x^±(ℓ/r) and is approximated by
//! x^{−1/4} ω e(φ + 1/8)/√φ''. Multiplying by the Bessel normalisation turns
//! that into ω(x^±) h^±(ℓ/r) e(g^±(ℓ/r)), which is what the block main term
//! sums.
//!
//! Every function here takes the dual index ℓ and divides by r internally.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::arithforms::factor::{gcd, mod_inverse};
use crate::arithforms::{coeff_table, NewformSpec};
use crate::error::{Error, Result};
use crate::farey::{good_bad_decompose, omega_j, FareySystem};
use crate::special::quad::{oscillatory_integral, QuadratureSpec};
use crate::voronoi::twist::additive_twist_decompose;
use crate::voronoi::{calibrated_eta, split_fraction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn s(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// Everything the phase and amplitude formulas need for one (j, r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockPhaseData {
    pub j: usize,
    pub u: i64,
    pub v: i64,
    pub a: i64,
    pub q: i64,
    pub c: i64,
    pub d: i64,
    pub r: u64,
    pub t: f64,
    pub weight: u32,
    /// (a r)^{−1} mod q, 0 when q = 1.
    pub inv_ar: i64,
    /// N_{j−1}, N_j, H and the smoothness s of ω_j.
    pub n_lo: f64,
    pub n_hi: f64,
    pub h: f64,
    pub s: u32,
}

impl BlockPhaseData {
    pub fn new(sys: &FareySystem, j: usize, r: u64, level: u64, weight: u32) -> Result<Self> {
        if j == 0 || j > sys.len() {
            return Err(Error::Invalid(format!("block index {j} outside 1..={}", sys.len())));
        }
        let (u, v) = (sys.u[j - 1], sys.v[j - 1]);
        let g = good_bad_decompose(u, v, level)?;
        if r == 0 || gcd(r, g.q as u64) != 1 {
            return Err(Error::NotCoprime(r as i64, g.q));
        }
        let inv_ar = if g.q == 1 {
            0
        } else {
            let ar = (g.a as i128 * r as i128).rem_euclid(g.q as i128) as i64;
            mod_inverse(ar, g.q).ok_or(Error::NotCoprime(ar, g.q))?
        };
        Ok(BlockPhaseData {
            j,
            u,
            v,
            a: g.a,
            q: g.q,
            c: g.c,
            d: g.d,
            r,
            t: sys.params.t,
            weight,
            inv_ar,
            n_lo: sys.breaks[j - 1] as f64,
            n_hi: sys.breaks[j] as f64,
            h: sys.params.h as f64,
            s: sys.params.s,
        })
    }

    /// Same block with another dual modulus r.
    pub fn with_r(&self, r: u64) -> Result<Self> {
        if r == 0 || gcd(r, self.q as u64) != 1 {
            return Err(Error::NotCoprime(r as i64, self.q));
        }
        let inv_ar = if self.q == 1 {
            0
        } else {
            let ar = (self.a as i128 * r as i128).rem_euclid(self.q as i128) as i64;
            mod_inverse(ar, self.q).ok_or(Error::NotCoprime(ar, self.q))?
        };
        Ok(BlockPhaseData { r, inv_ar, ..*self })
    }

    pub fn omega(&self, x: f64) -> f64 {
        use crate::farey::omega;
        omega(x - self.n_lo, self.h, self.s) - omega(x - self.n_hi, self.h, self.s)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.n_lo - self.h, self.n_hi + self.h)
    }

    /// Points where ω_j changes formula.
    pub fn breaks(&self) -> Vec<f64> {
        let mut b = vec![self.n_lo - self.h, self.n_lo + self.h, self.n_hi - self.h, self.n_hi + self.h];
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn ell_r(&self, ell: f64) -> f64 {
        ell / self.r as f64
    }
}

/// ω_j through the system, for callers holding the system rather than the data.
pub fn omega_block(sys: &FareySystem, j: usize, x: f64) -> f64 {
    omega_j(sys, j, x)
}

pub fn phase_phi(data: &BlockPhaseData, ell: f64, sign: Sign, x: f64) -> f64 {
    let sg = sign.s();
    let q = data.q as f64;
    -data.t / TAU * x.ln() + data.u as f64 / data.v as f64 * x - sg * 2.0 * (data.ell_r(ell) * x).sqrt() / q - sg / 8.0
}

pub fn phase_phi_prime(data: &BlockPhaseData, ell: f64, sign: Sign, x: f64) -> f64 {
    let q = data.q as f64;
    -data.t / (TAU * x) + data.u as f64 / data.v as f64 - sign.s() * (data.ell_r(ell) / x).sqrt() / q
}

pub fn phase_phi_second(data: &BlockPhaseData, ell: f64, sign: Sign, x: f64) -> f64 {
    let q = data.q as f64;
    data.t / (TAU * x * x) + sign.s() * data.ell_r(ell).sqrt() / (2.0 * q) * x.powf(-1.5)
}

/// x^±(ℓ/r) = (d/2u)²(√(ℓ/r + T) ± √(ℓ/r))², T = 2tuq/(πd). The − branch
/// is rationalised to (tq/π)²/(√(ℓ/r + T) + √(ℓ/r))², which also covers u = 0;
/// the + branch has no stationary point when u = 0 and returns ∞.
pub fn stationary_point(data: &BlockPhaseData, ell: f64, sign: Sign) -> f64 {
    let l = data.ell_r(ell).max(0.0);
    let (u, d, q) = (data.u as f64, data.d as f64, data.q as f64);
    let big_t = 2.0 * data.t * u * q / (PI * d);
    let (a, b) = ((l + big_t).sqrt(), l.sqrt());
    match sign {
        Sign::Plus if data.u == 0 => f64::INFINITY,
        Sign::Plus => (d / (2.0 * u)).powi(2) * (a + b) * (a + b),
        Sign::Minus => (data.t * q / PI).powi(2) / ((a + b) * (a + b)),
    }
}

/// g^±(ℓ/r) = φ_±(x^±) + 1/8.
pub fn phase_g(data: &BlockPhaseData, ell: f64, sign: Sign) -> f64 {
    let x = stationary_point(data, ell, sign);
    let sg = sign.s();
    -data.t / TAU * x.ln() + data.u as f64 / data.v as f64 * x - sg * 2.0 / data.q as f64 * (data.ell_r(ell) * x).sqrt()
        + 0.125
        - sg * 0.125
}

/// h^±(ℓ/r) = (q t √(ℓ/r)/(π x^{3/2}) ± (ℓ/r)/x)^{−1/2}.
pub fn amplitude_h(data: &BlockPhaseData, ell: f64, sign: Sign) -> Result<f64> {
    let x = stationary_point(data, ell, sign);
    let l = data.ell_r(ell);
    let rad = data.q as f64 * data.t * l.sqrt() / (PI * x.powf(1.5)) + sign.s() * l / x;
    if !(rad > 0.0) {
        return Err(Error::Invalid(format!("h radicand {rad} ≤ 0 at ℓ = {ell}: outside the stationary regime")));
    }
    Ok(rad.powf(-0.5))
}

/// √(2√(ℓ/r) q) · x^{1/4} · √φ''(x) at the stationary point; equals 1/h, so
/// the stationary value of I^± is ω h e(g) √(2√(ℓ/r) q).
pub fn normalisation_lhs(data: &BlockPhaseData, ell: f64, sign: Sign) -> f64 {
    let x = stationary_point(data, ell, sign);
    (2.0 * data.ell_r(ell).sqrt() * data.q as f64).sqrt() * x.powf(0.25) * phase_phi_second(data, ell, sign, x).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryEval {
    pub ell: f64,
    pub sign: Sign,
    pub x_star: f64,
    pub g: f64,
    pub h: f64,
    pub omega: f64,
}

pub fn stationary_eval(data: &BlockPhaseData, ell: f64, sign: Sign) -> Result<StationaryEval> {
    let x = stationary_point(data, ell, sign);
    Ok(StationaryEval {
        ell,
        sign,
        x_star: x,
        g: phase_g(data, ell, sign),
        h: amplitude_h(data, ell, sign)?,
        omega: data.omega(x),
    })
}

/// I^±(ℓ) by adaptive oscillatory quadrature over supp ω_j.
pub fn integral_direct(data: &BlockPhaseData, ell: f64, sign: Sign, quad: &QuadratureSpec) -> Result<Complex64> {
    let breaks = data.breaks();
    let r = oscillatory_integral(
        |x| x.powf(-0.25) * data.omega(x),
        |x| phase_phi(data, ell, sign, x),
        |x| phase_phi_prime(data, ell, sign, x),
        &breaks,
        quad,
    )?;
    Ok(r.value)
}

/// Leading stationary-phase approximation of I^±(ℓ).
pub fn stationary_main_integral(data: &BlockPhaseData, ell: f64, sign: Sign) -> Result<Complex64> {
    let x = stationary_point(data, ell, sign);
    let f2 = phase_phi_second(data, ell, sign, x);
    if !(f2 > 0.0) {
        return Err(Error::Invalid(format!("φ'' = {f2} ≤ 0 at the stationary point")));
    }
    let amp = x.powf(-0.25) * data.omega(x) / f2.sqrt();
    Ok(Complex64::from_polar(amp, TAU * (phase_phi(data, ell, sign, x) + 0.125)))
}

/// (∓1)^k ω(x^±) h^± e(g^±): one summand of the block main term without the
/// coefficient and additive character.
pub fn main_term_single(data: &BlockPhaseData, ell: f64, sign: Sign) -> Result<Complex64> {
    let e = stationary_eval(data, ell, sign)?;
    let pm = match sign {
        Sign::Plus if data.weight % 2 == 1 => -1.0,
        _ => 1.0,
    };
    Ok(Complex64::from_polar(pm * e.omega * e.h, TAU * e.g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryCheck {
    pub ell: f64,
    pub sign: Sign,
    pub x_star: f64,
    pub direct_re: f64,
    pub direct_im: f64,
    pub main_re: f64,
    pub main_im: f64,
    pub rel_err: f64,
}

pub fn check_stationary_phase(
    data: &BlockPhaseData,
    ell: f64,
    sign: Sign,
    quad: &QuadratureSpec,
) -> Result<StationaryCheck> {
    let direct = integral_direct(data, ell, sign, quad)?;
    let main = stationary_main_integral(data, ell, sign)?;
    Ok(StationaryCheck {
        ell,
        sign,
        x_star: stationary_point(data, ell, sign),
        direct_re: direct.re,
        direct_im: direct.im,
        main_re: main.re,
        main_im: main.im,
        rel_err: (direct - main).norm() / main.norm(),
    })
}

/// Dual indices ℓ ≥ 1 whose stationary point sits where ω_j = 1, at most
/// `per_sign` of them per sign, spread evenly over the admissible range.
pub fn core_sample(data: &BlockPhaseData, ell_max: u64, per_sign: usize) -> Vec<(u64, Sign)> {
    let (lo, hi) = (data.n_lo + data.h, data.n_hi - data.h);
    let mut out = Vec::new();
    for sign in Sign::BOTH {
        let inside: Vec<u64> = (1..=ell_max)
            .filter(|&l| {
                let x = stationary_point(data, l as f64, sign);
                x >= lo && x <= hi
            })
            .collect();
        if inside.is_empty() {
            continue;
        }
        let n = per_sign.min(inside.len());
        for i in 0..n {
            out.push((inside[i * inside.len() / n], sign));
        }
    }
    out
}

/// |I^±| relative to max x^{−1/4}/min|φ'| over the support: the constant in a
/// first-derivative bound, for ℓ beyond the stationary range.
pub fn first_derivative_ratio(data: &BlockPhaseData, ell: f64, sign: Sign, quad: &QuadratureSpec) -> Result<f64> {
    let (a, b) = data.support();
    let n = 400;
    let min_d = (0..=n)
        .map(|i| phase_phi_prime(data, ell, sign, a + (b - a) * i as f64 / n as f64).abs())
        .fold(f64::INFINITY, f64::min);
    let i = integral_direct(data, ell, sign, quad)?;
    Ok(i.norm() * min_d / a.powf(-0.25))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformParams {
    pub c_k: f64,
    pub k1: u64,
    /// (M/(vR))^{2/(s−1)}·M0.
    pub k: f64,
}

impl TransformParams {
    pub fn new(sys: &FareySystem, v: i64, c_k: f64) -> Self {
        let p = &sys.params;
        let k1 = (c_k * p.m as f64 / (p.r * p.r)).ceil() as u64;
        let k = (p.m as f64 / (v as f64 * p.r)).powf(2.0 / (p.s as f64 - 1.0)) * p.m0 as f64;
        TransformParams { c_k, k1, k }
    }

    /// Last dual index of the stationary range, r·K1/d².
    pub fn ell_max(&self, data: &BlockPhaseData) -> u64 {
        data.r * self.k1 / (data.d * data.d) as u64
    }

    pub fn split_holds(&self, data: &BlockPhaseData) -> bool {
        self.ell_max(data) as f64 <= data.r as f64 * self.k.max(self.k1 as f64)
    }
}

pub const DEFAULT_C_K: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct DualTerm {
    pub m: u64,
    pub form: &'static str,
    pub r: u64,
    pub ell_max: u64,
    pub re_c: f64,
    pub im_c: f64,
    pub re_sum: f64,
    pub im_sum: f64,
    /// Σ |summand| over the top half of the ℓ range.
    pub top_half: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockTransformReport {
    pub j: usize,
    pub u: i64,
    pub v: i64,
    pub direct_re: f64,
    pub direct_im: f64,
    pub main_re: f64,
    pub main_im: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// √M (M/R²)^{1/(2(s−1))} + M^{5/2}R²/H³, constants unknown.
    pub envelope: f64,
    pub tail_estimate: f64,
    pub terms: Vec<DualTerm>,
}

/// Σ_n λ(n) n^{−it} ω_j(n) against the Voronoi-transformed main term
///
///   Σ_blocks C·η/(m√D₂) Σ_{ℓ ≤ rK1/d²} λ_g(ℓ) e(\overline{ar}ℓ/q) Σ_± (∓1)^k ω h e(g),
///
/// which is the Voronoi dual side with J_{k−1} replaced by its leading term
/// and each integral by its stationary-phase value. The 2πi^k/q of the dual
/// side cancels against the Bessel and stationary-phase normalisations.
pub fn block_transform_check(
    spec: &NewformSpec,
    sys: &FareySystem,
    j: usize,
    c_k: f64,
) -> Result<BlockTransformReport> {
    let (u, v) = (sys.u[j - 1], sys.v[j - 1]);
    let (lo, hi) = sys.support(j);
    let table = coeff_table(spec, hi.max(1) as usize + 1)?;
    let t = sys.params.t;
    let mut direct = Complex64::new(0.0, 0.0);
    for n in lo.max(1)..=hi {
        let w = omega_j(sys, j, n as f64);
        let l = table.lambda(n as usize);
        if w != 0.0 && l != 0.0 {
            direct += Complex64::from_polar(l * w, -t * (n as f64).ln());
        }
    }

    // e(αn) = e(a n/q) with a = −u; split and expand exactly as in Voronoi
    let sp = split_fraction(-u, v as u64, spec.level)?;
    let dec = additive_twist_decompose(spec, sp.a2, sp.q2)?;
    let base = BlockPhaseData::new(sys, j, 1, spec.level, spec.weight)?;
    debug_assert_eq!(base.q as u64, sp.q1);
    let tp = TransformParams::new(sys, v, c_k);
    let mut groups: std::collections::BTreeMap<(u64, &'static str), (Complex64, NewformSpec)> = Default::default();
    for term in &dec.terms {
        groups.entry((term.m, term.form.label)).or_insert((Complex64::new(0.0, 0.0), term.form.clone())).0 +=
            term.coeff;
    }
    let mut main = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    let mut terms = Vec::new();
    for ((m, _), (c, g)) in groups {
        if c.norm() < 1e-13 {
            continue;
        }
        let d1 = gcd(g.level, sp.q1);
        let d2 = g.level / d1;
        let r = m * d2;
        let data = base.with_r(r)?;
        let coef = c * calibrated_eta(&g, d2)? / (m as f64 * (d2 as f64).sqrt());
        let ell_max = tp.ell_max(&data);
        let gt = coeff_table(&g, ell_max as usize + 1)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut top = 0.0;
        for ell in 1..=ell_max {
            let lam = gt.lambda(ell as usize);
            if lam == 0.0 {
                continue;
            }
            let add = Complex64::from_polar(
                1.0,
                TAU * ((data.inv_ar as i128 * ell as i128).rem_euclid(data.q as i128) as f64 / data.q as f64),
            );
            for sign in Sign::BOTH {
                let x = stationary_point(&data, ell as f64, sign);
                if data.omega(x) == 0.0 {
                    continue;
                }
                let term = main_term_single(&data, ell as f64, sign)? * add * lam;
                sum += term;
                if 2 * ell > ell_max {
                    top += term.norm();
                }
            }
        }
        main += coef * sum;
        tail += coef.norm() * top;
        terms.push(DualTerm {
            m,
            form: g.label,
            r,
            ell_max,
            re_c: coef.re,
            im_c: coef.im,
            re_sum: sum.re,
            im_sum: sum.im,
            top_half: top,
        });
    }
    let p = &sys.params;
    let (mf, rr, hh) = (p.m as f64, p.r, p.h as f64);
    let envelope =
        mf.sqrt() * (mf / (rr * rr)).powf(1.0 / (2.0 * (p.s as f64 - 1.0))) + mf.powf(2.5) * rr * rr / hh.powi(3);
    let abs_diff = (direct - main).norm();
    Ok(BlockTransformReport {
        j,
        u,
        v,
        direct_re: direct.re,
        direct_im: direct.im,
        main_re: main.re,
        main_im: main.im,
        abs_diff,
        rel_diff: abs_diff / direct.norm(),
        envelope,
        tail_estimate: tail,
        terms,
    })
}

/// Median of the finite entries; NaN when there are none.
pub fn median(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests;
