//! Farey systems on a dyadic block: enumeration, mediants, breakpoints, the
//! smooth partition ω_j, block weights F_j and the good/bad split of a
//! fraction relative to the level.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::arithforms::factor::{factorize, mod_inverse};
use crate::arithforms::{CoeffTable, Rational};
use crate::error::{Error, Result};
use crate::lfunction::block_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FareyParams {
    pub t: f64,
    pub m: u64,
    pub m0: u64,
    pub r: f64,
    pub h: u64,
    pub m1: u64,
    pub m2: u64,
    pub s: u32,
}

impl FareyParams {
    /// R = √(M/M0), H = ⌈M²/(R²t)⌉ = ⌈M·M0/t⌉.
    pub fn new(t: f64, m: u64, m0: u64, m1: u64, m2: u64, s: u32) -> Result<Self> {
        if !(t > 0.0) || m0 == 0 || m < m0 {
            return Err(Error::Invalid(format!("need t > 0 and 1 ≤ M0 ≤ M (t={t}, M={m}, M0={m0})")));
        }
        if s < 6 || s % 2 == 1 {
            return Err(Error::Invalid(format!("smoothness s = {s} must be even and at least 6")));
        }
        if m1 >= m2 || m2 > 2 * m1 {
            return Err(Error::Invalid(format!("need M1 < M2 ≤ 2·M1 (M1={m1}, M2={m2})")));
        }
        let r = (m as f64 / m0 as f64).sqrt();
        let h = ((m as f64 * m0 as f64) / t).ceil().max(1.0) as u64;
        Ok(FareyParams { t, m, m0, r, h, m1, m2, s })
    }

    /// The block [M, 2M] with s = 6.
    pub fn dyadic(t: f64, m: u64, m0: u64) -> Result<Self> {
        Self::new(t, m, m0, m, 2 * m, 6)
    }

    pub fn interval(&self) -> (f64, f64) {
        let lo = (self.m1 + 2 * self.h) as f64;
        let hi = self.m2 as f64 - 2.0 * self.h as f64;
        (-self.t / (TAU * lo), -self.t / (TAU * hi))
    }
}

/// Reduced fractions with denominator ≤ ⌊R⌋ in [x1, x2], ascending.
pub fn farey_in_interval(r: f64, x1: f64, x2: f64) -> Result<Vec<Rational>> {
    if !(x1 < x2) || !(r >= 1.0) {
        return Err(Error::Invalid(format!("bad Farey request R={r}, [{x1}, {x2}]")));
    }
    let q = r.floor() as i64;
    // first element ≥ x1
    let (mut a, mut b) = (x1.ceil() as i64, 1i64);
    for v in 2..=q {
        let u = (x1 * v as f64).ceil() as i64;
        if (u as i128) * (b as i128) < (a as i128) * (v as i128) {
            a = u;
            b = v;
        }
    }
    let first = Rational::new(a, b);
    let (a, b) = (first.num(), first.den());
    // successor: c·b − a·d = 1 with d ≤ Q maximal
    let d = if b == 1 {
        q
    } else {
        let inv = mod_inverse(a.rem_euclid(b), b).expect("reduced fraction");
        let r0 = (-inv).rem_euclid(b);
        r0 + (q - r0) / b * b
    };
    let c = (1 + a * d) / b;
    let (mut a, mut b, mut c, mut d) = (a, b, c, d);
    let mut out = Vec::new();
    while (a as f64) <= x2 * b as f64 {
        out.push(Rational::new(a, b));
        let k = (q + b) / d;
        let (e, f) = (k * c - a, k * d - b);
        (a, b, c, d) = (c, d, e, f);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FareySystem {
    pub params: FareyParams,
    /// α_j = −u_j/v_j, increasing.
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    /// Mediants ρ_j between α_j and α_{j+1}, j = 1..J−1, as (−num, den).
    pub rho: Vec<(i64, i64)>,
    /// N_0 = M1 + H, N_j = ⌊h(ρ_j) + 1/2⌋, N_J = M2 − H; the ω transitions at
    /// the ends then sit inside [M1, M1 + 2H] and [M2 − 2H, M2].
    pub breaks: Vec<i64>,
}

impl FareySystem {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn alpha(&self, j: usize) -> Rational {
        Rational::new(-self.u[j - 1], self.v[j - 1])
    }

    /// Support of ω_j.
    pub fn support(&self, j: usize) -> (i64, i64) {
        let h = self.params.h as i64;
        (self.breaks[j - 1] - h, self.breaks[j] + h)
    }
}

/// h(y) = −t/(2πy).
fn h_of(t: f64, y: f64) -> f64 {
    -t / (TAU * y)
}

pub fn build_farey_system(params: FareyParams) -> Result<FareySystem> {
    let h = params.h as i64;
    if (params.m2 as i64 - params.m1 as i64) < 4 * h {
        return Err(Error::DegenerateInterval(format!("M2 − M1 < 4H (H = {h})")));
    }
    let (x1, x2) = params.interval();
    let fr = farey_in_interval(params.r, x1, x2)?;
    if fr.is_empty() {
        return Err(Error::DegenerateInterval(format!("no fractions of height ≤ {} in [{x1}, {x2}]", params.r)));
    }
    let u: Vec<i64> = fr.iter().map(|a| -a.num()).collect();
    let v: Vec<i64> = fr.iter().map(|a| a.den()).collect();
    let j = u.len();
    let mut rho = Vec::with_capacity(j.saturating_sub(1));
    let mut breaks = vec![(params.m1 + params.h) as i64];
    for i in 0..j - 1 {
        let (num, den) = (u[i] + u[i + 1], v[i] + v[i + 1]);
        rho.push((num, den));
        breaks.push((h_of(params.t, -(num as f64) / den as f64) + 0.5).floor() as i64);
    }
    breaks.push(params.m2 as i64 - h);
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateInterval(format!("breakpoints not increasing: {breaks:?}")));
    }
    Ok(FareySystem { params, u, v, rho, breaks })
}

/// ω(x): 0 below −H, 1 above H, (1 + sin^{s+1}(πx/2H))/2 between.
pub fn omega(x: f64, h: f64, s: u32) -> f64 {
    if x >= h {
        1.0
    } else if x <= -h {
        0.0
    } else {
        0.5 * (1.0 + (PI * x / (2.0 * h)).sin().powi(s as i32 + 1))
    }
}

/// ω_j(x) = ω(x − N_{j−1}) − ω(x − N_j), 1 ≤ j ≤ J.
pub fn omega_j(sys: &FareySystem, j: usize, x: f64) -> f64 {
    let (h, s) = (sys.params.h as f64, sys.params.s);
    omega(x - sys.breaks[j - 1] as f64, h, s) - omega(x - sys.breaks[j] as f64, h, s)
}

/// Σ_j ω_j(x), which telescopes to ω(x − N_0) − ω(x − N_J).
pub fn omega_total(sys: &FareySystem, x: f64) -> f64 {
    (1..=sys.len()).map(|j| omega_j(sys, j, x)).sum()
}

/// e(u·x/v) with the integer part of u·x/v removed before scaling by 2π.
fn e_frac(u: i64, v: i64, x: f64) -> Complex64 {
    let p = (u as f64 * x) % v as f64;
    Complex64::from_polar(1.0, TAU * p / v as f64)
}

/// F_j(x) = x^{−it} e(−α_j x) ω_j(x).
pub fn block_weight_f(sys: &FareySystem, j: usize, x: f64) -> Complex64 {
    let w = omega_j(sys, j, x);
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(w, -sys.params.t * x.ln()) * e_frac(sys.u[j - 1], sys.v[j - 1], x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockCheck {
    pub direct: Complex64Ser,
    pub blocks: Complex64Ser,
    /// direct − blocks.
    pub difference: Complex64Ser,
    /// Edge terms Σ λ(n)n^{−it}(1 − Σ_j ω_j(n)).
    pub compensation: Complex64Ser,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(z: Complex64) -> Self {
        Complex64Ser { re: z.re, im: z.im }
    }
}

/// Compares the block sum over [M1, M2] with its Farey decomposition; the
/// difference must equal the explicit edge compensation.
pub fn block_decomposition_check(table: &CoeffTable, sys: &FareySystem) -> Result<BlockCheck> {
    let p = &sys.params;
    let t = p.t;
    let hi = sys.breaks[sys.len()] + p.h as i64;
    table.require(hi.max(p.m2 as i64) as usize)?;
    let direct = block_sum(table, p.m1 as usize, p.m2 as usize, t)?;
    let mut blocks = Complex64::new(0.0, 0.0);
    for j in 1..=sys.len() {
        let (a, b) = sys.support(j);
        let (u, v) = (sys.u[j - 1], sys.v[j - 1]);
        for n in a.max(1)..=b {
            let l = table.lambda(n as usize);
            if l == 0.0 {
                continue;
            }
            let x = n as f64;
            // e(α_j n) F_j(n)
            blocks += e_frac(-u, v, x) * block_weight_f(sys, j, x) * l;
        }
    }
    let mut comp = Complex64::new(0.0, 0.0);
    let core_lo = (p.m1 + 2 * p.h) as i64;
    let core_hi = p.m2 as i64 - 2 * p.h as i64;
    let edges = (p.m1 as i64..core_lo).chain(core_hi + 1..=p.m2 as i64);
    for n in edges {
        let rest = 1.0 - omega_total(sys, n as f64);
        if rest != 0.0 {
            comp += Complex64::from_polar(table.lambda(n as usize) * rest, -t * (n as f64).ln());
        }
    }
    let diff = direct - blocks;
    Ok(BlockCheck {
        direct: direct.into(),
        blocks: blocks.into(),
        difference: diff.into(),
        compensation: comp.into(),
        residual: (diff - comp).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoodBadSplit {
    pub u: i64,
    pub v: i64,
    pub level: u64,
    pub a: i64,
    pub q: i64,
    pub c: i64,
    pub d: i64,
}

impl GoodBadSplit {
    /// −a/q + c/d.
    pub fn recombine(&self) -> Rational {
        Rational::new(-self.a, self.q) + Rational::new(self.c, self.d)
    }
}

/// −u/v = −a/q + c/d with d built from primes where v has lower order than N.
pub fn good_bad_decompose(u: i64, v: i64, level: u64) -> Result<GoodBadSplit> {
    if v < 1 || crate::arithforms::factor::gcd_i(u, v) != 1 {
        return Err(Error::NotCoprime(u, v));
    }
    let fv = factorize(v as u64);
    let fnn = factorize(level);
    let d: i64 = fv.0.iter().filter(|&&(p, e)| e < fnn.ord(p)).map(|&(p, e)| (p as i64).pow(e)).product();
    let q = v / d;
    let c = if d == 1 {
        0
    } else {
        let inv = mod_inverse(q.rem_euclid(d), d).expect("q and d coprime");
        ((-u).rem_euclid(d) as i128 * inv as i128).rem_euclid(d as i128) as i64
    };
    let a = (u as i128 + c as i128 * q as i128) / d as i128;
    Ok(GoodBadSplit { u, v, level, a: a as i64, q, c, d })
}

pub fn good_bad_split(sys: &FareySystem, level: u64) -> Result<Vec<GoodBadSplit>> {
    sys.u.iter().zip(&sys.v).map(|(&u, &v)| good_bad_decompose(u, v, level)).collect()
}

/// Row of the CSV dump of a system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FareyRow {
    pub j: usize,
    pub u: i64,
    pub v: i64,
    pub rho_num: i64,
    pub rho_den: i64,
    pub n_j: i64,
    pub q: i64,
    pub d: i64,
    pub c: i64,
    pub a: i64,
}

/// One row per fraction; the mediant columns hold ρ_j (0/0 for the last).
pub fn farey_rows(sys: &FareySystem, level: u64) -> Result<Vec<FareyRow>> {
    let split = good_bad_split(sys, level)?;
    Ok((1..=sys.len())
        .map(|j| {
            let (rn, rd) = sys.rho.get(j - 1).map(|&(n, d)| (-n, d)).unwrap_or((0, 0));
            let g = split[j - 1];
            FareyRow {
                j,
                u: sys.u[j - 1],
                v: sys.v[j - 1],
                rho_num: rn,
                rho_den: rd,
                n_j: sys.breaks[j],
                q: g.q,
                d: g.d,
                c: g.c,
                a: g.a,
            }
        })
        .collect())
}

/// Empirical constants c₁, c₂ with c₁·HR/v_j ≤ N_j − N_{j−1} ≤ c₂·HR/v_j.
pub fn spacing_band(sys: &FareySystem) -> (f64, f64) {
    let hr = sys.params.h as f64 * sys.params.r;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for j in 1..=sys.len() {
        let ratio = (sys.breaks[j] - sys.breaks[j - 1]) as f64 * sys.v[j - 1] as f64 / hr;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

// Central-difference stencils for derivatives 1..4 (step h, offsets −3..3).
const STENCILS: [[f64; 7]; 4] = [
    [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
    [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0],
    [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0],
    [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0],
];

/// max over a grid in supp ω_j of |d^s/dx^s {F_j(x) x^{−(k−1)/2}}|·(v_j R)^s·x^{(k−1)/2}, s = 0..=s_max.
pub fn derivative_decay_diagnostic(sys: &FareySystem, j: usize, weight: u32, s_max: usize) -> Result<Vec<f64>> {
    if s_max > 4 {
        return Err(Error::Invalid("derivative order above 4 is dominated by rounding".into()));
    }
    let kk = (weight as f64 - 1.0) / 2.0;
    let vr = sys.v[j - 1] as f64 * sys.params.r;
    let (a, b) = sys.support(j);
    let (a, b) = (a as f64, b as f64);
    let step = (sys.params.h as f64).min(vr) / 16.0;
    if step < 1e-3 {
        return Err(Error::Invalid("difference step underflow".into()));
    }
    let f = |x: f64| block_weight_f(sys, j, x) * x.powf(-kk);
    let points = 400;
    let mut out = vec![0.0f64; s_max + 1];
    for i in 0..=points {
        let x = a + (b - a) * i as f64 / points as f64;
        let scale = x.powf(kk);
        out[0] = out[0].max(f(x).norm() * scale);
        if s_max == 0 {
            continue;
        }
        let vals: Vec<Complex64> = (-3..=3).map(|o| f(x + o as f64 * step)).collect();
        for s in 1..=s_max {
            let d: Complex64 =
                STENCILS[s - 1].iter().zip(&vals).map(|(w, v)| v * *w).sum::<Complex64>() / step.powi(s as i32);
            out[s] = out[s].max(d.norm() * vr.powi(s as i32) * scale);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
