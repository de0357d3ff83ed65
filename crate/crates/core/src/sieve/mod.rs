//! Large-sieve side of the block sums: pair phases, resonance counting and
//! the empirical large-sieve ratio.
//!
//! Phases here are the shifted ones, g_jr(ℓ) = g_j(ℓ/r) + \overline{r a_j} ℓ/q_j,
//! with amplitude h_jr(ℓ) = (ℓ/r) h_j(ℓ/r).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arithforms::factor::{gcd, gcd_i};
use crate::error::{Error, Result};
use crate::farey::{good_bad_decompose, FareySystem};
use crate::statphase::{amplitude_h, phase_g, stationary_point, BlockPhaseData, Sign};

/// Inverse of a modulo q in [0, q); 0 when q = 1.
pub fn mod_inverse(a: i64, q: i64) -> Result<i64> {
    if q < 1 {
        return Err(Error::Invalid(format!("modulus {q} < 1")));
    }
    if q == 1 {
        return Ok(0);
    }
    crate::arithforms::factor::mod_inverse(a.rem_euclid(q), q).ok_or(Error::NotCoprime(a, q))
}

pub fn g_jr(data: &BlockPhaseData, ell: f64, sign: Sign) -> f64 {
    phase_g(data, ell, sign) + data.inv_ar as f64 * ell / data.q as f64
}

pub fn h_jr(data: &BlockPhaseData, ell: f64, sign: Sign) -> Result<f64> {
    Ok(ell / data.r as f64 * amplitude_h(data, ell, sign)?)
}

/// y_j = d/(2 r u_j q_j).
pub fn y_of(data: &BlockPhaseData) -> f64 {
    data.d as f64 / (2.0 * data.r as f64 * data.u as f64 * data.q as f64)
}

/// (1/(r q)) √(x^±(ℓ/r)/(ℓ/r)) = y(√(1 + t/(π y ℓ)) ± 1).
fn slope_core(data: &BlockPhaseData, ell: f64, sign: Sign) -> f64 {
    let y = y_of(data);
    y * ((1.0 + data.t / (PI * y * ell)).sqrt() + sign.s())
}

/// Closed-form (g_jr', g_jr'').
pub fn g_jr_derivatives(data: &BlockPhaseData, ell: f64, sign: Sign) -> (f64, f64) {
    let first = -sign.s() * slope_core(data, ell, sign) + data.inv_ar as f64 / data.q as f64;
    let second = sign.s() * data.t / (TAU * ell * ell) / (1.0 + data.t / (PI * ell * y_of(data))).sqrt();
    (first, second)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairDerivatives {
    pub first: f64,
    pub second: f64,
}

/// Derivatives of g_ir − g_jr at ℓ. The second uses the factored difference
/// so that it stays accurate when y_i ≈ y_j.
pub fn pair_phase_derivatives(di: &BlockPhaseData, dj: &BlockPhaseData, ell: f64, sign: Sign) -> PairDerivatives {
    let (fi, _) = g_jr_derivatives(di, ell, sign);
    let (fj, _) = g_jr_derivatives(dj, ell, sign);
    let si = (1.0 + di.t / (PI * ell * y_of(di))).sqrt();
    let sj = (1.0 + dj.t / (PI * ell * y_of(dj))).sqrt();
    // 1/si − 1/sj = (sj² − si²)/(si sj (si + sj)), sj² − si² = (t/πℓ)(1/y_j − 1/y_i)
    let inv_y = |d: &BlockPhaseData| 2.0 * d.r as f64 * d.u as f64 * d.q as f64 / d.d as f64;
    let num = di.t / (PI * ell) * (inv_y(dj) - inv_y(di));
    let second = sign.s() * di.t / (TAU * ell * ell) * num / (si * sj * (si + sj));
    PairDerivatives { first: fi - fj, second }
}

/// Relative errors of the closed-form pair derivatives against Richardson-
/// extrapolated 5-point central differences of g_ir − g_jr. The phases are
/// of size t, so the steps (ℓ/32 for the first, ℓ/8 for the second, each
/// halved once) balance truncation against rounding.
pub fn pair_derivative_fd_errors(di: &BlockPhaseData, dj: &BlockPhaseData, ell: f64, sign: Sign) -> (f64, f64) {
    let f = |l: f64| g_jr(di, l, sign) - g_jr(dj, l, sign);
    let stencil = |h: f64| {
        let (m2, m1, f0, p1, p2) = (f(ell - 2.0 * h), f(ell - h), f(ell), f(ell + h), f(ell + 2.0 * h));
        ((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h), (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h))
    };
    let richardson = |coarse: f64, fine: f64| (16.0 * fine - coarse) / 15.0;
    let fd1 = richardson(stencil(ell / 32.0).0, stencil(ell / 64.0).0);
    let fd2 = richardson(stencil(ell / 8.0).1, stencil(ell / 16.0).1);
    let p = pair_phase_derivatives(di, dj, ell, sign);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
    (rel(fd1, p.first), rel(fd2, p.second))
}

/// z_ijr = \overline{a_i r}/q_i − \overline{a_j r}/q_j as a real number.
pub fn z_ijr(di: &BlockPhaseData, dj: &BlockPhaseData) -> f64 {
    di.inv_ar as f64 / di.q as f64 - dj.inv_ar as f64 / dj.q as f64
}

/// max over L1 ≤ L1' ≤ L2 of |Σ_{ℓ=L1'}^{L2} e(g_ir(ℓ) − g_jr(ℓ))|, one backward pass.
pub fn exp_sum_sigma(di: &BlockPhaseData, dj: &BlockPhaseData, l1: u64, l2: u64, sign: Sign) -> Result<f64> {
    if l1 == 0 || l2 < l1 || l2 - l1 > 1_000_000 {
        return Err(Error::Invalid(format!("need 1 ≤ L1 ≤ L2 ≤ L1 + 10^6 (L1={l1}, L2={l2})")));
    }
    let mut s = Complex64::new(0.0, 0.0);
    let mut best = 0.0f64;
    for l in (l1..=l2).rev() {
        s += pair_term(di, dj, l, sign);
        best = best.max(s.norm());
    }
    Ok(best)
}

pub(crate) fn pair_term(di: &BlockPhaseData, dj: &BlockPhaseData, l: u64, sign: Sign) -> Complex64 {
    let d = g_jr(di, l as f64, sign) - g_jr(dj, l as f64, sign);
    Complex64::from_polar(1.0, TAU * d.rem_euclid(1.0))
}

/// {(u, v): U1 ≤ u ≤ U2, V1 ≤ v ≤ V2, (u, v) = 1, du ≡ −cv (mod d²)}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionR {
    pub u1: i64,
    pub u2: i64,
    pub v1: i64,
    pub v2: i64,
    pub c: i64,
    pub d: i64,
}

impl RegionR {
    pub fn contains(&self, u: i64, v: i64) -> bool {
        let dd = self.d * self.d;
        (self.u1..=self.u2).contains(&u)
            && (self.v1..=self.v2).contains(&v)
            && gcd_i(u, v) == 1
            && (self.d as i128 * u as i128 + self.c as i128 * v as i128).rem_euclid(dd as i128) == 0
    }

    /// #R by enumeration.
    pub fn count(&self) -> u64 {
        (self.v1..=self.v2).map(|v| (self.u1..=self.u2).filter(|&u| self.contains(u, v)).count() as u64).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveBand {
    pub t: f64,
    pub r: u64,
    pub c: i64,
    pub d: i64,
    pub l1: u64,
    pub l2: u64,
    pub region: RegionR,
    /// Dyadic sizes: the least powers of two with L2 ≤ L, U2 ≤ U, V2 ≤ V.
    pub l: u64,
    pub u: u64,
    pub v: u64,
}

impl SieveBand {
    pub fn new(t: f64, r: u64, beta: (i64, i64), ls: (u64, u64), us: (i64, i64), vs: (i64, i64)) -> Result<Self> {
        let (c, d) = beta;
        if d < 1 || r < 1 || ls.0 < 1 || ls.0 > ls.1 || us.0 < 1 || us.0 > us.1 || vs.0 < 1 || vs.0 > vs.1 {
            return Err(Error::Invalid(format!("bad band: r={r}, β={c}/{d}, L={ls:?}, U={us:?}, V={vs:?}")));
        }
        if !(t > 0.0) {
            return Err(Error::Invalid(format!("t = {t} must be positive")));
        }
        Ok(SieveBand {
            t,
            r,
            c,
            d,
            l1: ls.0,
            l2: ls.1,
            region: RegionR { u1: us.0, u2: us.1, v1: vs.0, v2: vs.1, c, d },
            l: ls.1.next_power_of_two(),
            u: (us.1 as u64).next_power_of_two(),
            v: (vs.1 as u64).next_power_of_two(),
        })
    }

    /// η = √(d² t/(r L U V)).
    pub fn eta(&self) -> f64 {
        (self.d as f64 * self.d as f64 * self.t / (self.r as f64 * self.l as f64 * self.u as f64 * self.v as f64))
            .sqrt()
    }

    /// X0 = √(L max(η, 1)).
    pub fn x0(&self) -> f64 {
        (self.l as f64 * self.eta().max(1.0)).sqrt()
    }

    pub fn uv(&self) -> u64 {
        self.u * self.v
    }

    /// A = (r/d)(U1 + βV1) and C = V1/d.
    pub fn gk_parameters(&self) -> (f64, f64) {
        let (r, d) = (self.r as f64, self.d as f64);
        let beta = self.c as f64 / d;
        (r / d * (self.region.u1 as f64 + beta * self.region.v1 as f64), self.region.v1 as f64 / d)
    }

    /// L·(dR)²/(rM), V/R and U·M/(tV): each should be O(1) for a band the
    /// large sieve is meant for.
    pub fn shape_ratios(&self, sys: &FareySystem) -> (f64, f64, f64) {
        let p = &sys.params;
        let dr = self.d as f64 * p.r;
        (
            self.l as f64 * dr * dr / (self.r as f64 * p.m as f64),
            self.v as f64 / p.r,
            self.u as f64 * p.m as f64 / (self.t * self.v as f64),
        )
    }
}

/// Blocks j with β_j = c/d, (q_j, r) = 1 and (u_j, v_j) ∈ R.
pub fn band_members(sys: &FareySystem, band: &SieveBand, level: u64, weight: u32) -> Result<Vec<BlockPhaseData>> {
    let mut out = Vec::new();
    for j in 1..=sys.len() {
        let (u, v) = (sys.u[j - 1], sys.v[j - 1]);
        if !band.region.contains(u, v) {
            continue;
        }
        let g = good_bad_decompose(u, v, level)?;
        if g.d != band.d || g.c != band.c.rem_euclid(band.d.max(1)) || gcd(g.q as u64, band.r) != 1 {
            continue;
        }
        out.push(BlockPhaseData::new(sys, j, band.r, level, weight)?);
    }
    Ok(out)
}

/// Integer data the resonance count needs for one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resonant {
    pub inv: i64,
    pub q: i64,
    pub uv: i64,
}

impl From<&BlockPhaseData> for Resonant {
    fn from(d: &BlockPhaseData) -> Self {
        Resonant { inv: d.inv_ar, q: d.q, uv: d.u * d.v }
    }
}

pub const PAIR_BUDGET: usize = 10_000;

/// m ≤ x·q exactly, for m, q ≥ 0 and finite x.
pub fn le_scaled(m: u128, q: u128, x: f64) -> bool {
    if x.is_nan() || x < 0.0 {
        return false;
    }
    if x.is_infinite() {
        return true;
    }
    if x == 0.0 {
        return m == 0;
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let (mant, e) =
        if exp == 0 { (bits & ((1 << 52) - 1), -1074) } else { ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075) };
    // m·2^max(−e,0) ≤ mant·q·2^max(e,0), compared as 256-bit integers
    let lhs = shl256((0, m), (-e).max(0) as u32);
    let rhs = shl256(mul_wide(mant as u128, q), e.max(0) as u32);
    match (lhs, rhs) {
        (None, _) => false,
        (_, None) => true,
        (Some(l), Some(r)) => l <= r,
    }
}

/// Full product as (high, low) halves.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const M: u128 = u64::MAX as u128;
    let (a1, a0, b1, b0) = (a >> 64, a & M, b >> 64, b & M);
    let (p00, p01, p10, p11) = (a0 * b0, a0 * b1, a1 * b0, a1 * b1);
    let mid = (p00 >> 64) + (p01 & M) + (p10 & M);
    let lo = (p00 & M) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Left shift of a 256-bit value; None on overflow.
fn shl256((hi, lo): (u128, u128), s: u32) -> Option<(u128, u128)> {
    if hi == 0 && lo == 0 {
        return Some((0, 0));
    }
    let bits = if hi != 0 { 256 - hi.leading_zeros() } else { 128 - lo.leading_zeros() };
    if bits + s > 256 {
        return None;
    }
    Some(match s {
        0 => (hi, lo),
        1..=127 => ((hi << s) | (lo >> (128 - s)), lo << s),
        _ => (lo << (s - 128), 0),
    })
}

/// ‖inv_i/q_i − inv_j/q_j‖ ≤ Δ1, decided on integers.
pub fn near_in_frac(a: &Resonant, b: &Resonant, delta1: f64) -> bool {
    let qq = a.q as i128 * b.q as i128;
    let n = (a.inv as i128 * b.q as i128 - b.inv as i128 * a.q as i128).rem_euclid(qq);
    let m = n.min(qq - n);
    le_scaled(m as u128, qq as u128, delta1)
}

/// |u_i v_i − u_j v_j| ≤ UV Δ2.
pub fn near_in_product(a: &Resonant, b: &Resonant, uv: u64, delta2: f64) -> bool {
    le_scaled((a.uv - b.uv).unsigned_abs() as u128, uv as u128, delta2)
}

/// B(Δ1, Δ2): ordered pairs (i, j), diagonal included, satisfying both
/// conditions. Products are sorted so each i scans only its product window.
pub fn resonance_count_b(set: &[Resonant], uv: u64, delta1: f64, delta2: f64) -> Result<u64> {
    if set.len() > PAIR_BUDGET {
        return Err(Error::Budget { what: "resonance_count_b", achieved: set.len() as f64 });
    }
    let mut sorted = set.to_vec();
    sorted.sort_by_key(|x| x.uv);
    let keys: Vec<i64> = sorted.iter().map(|x| x.uv).collect();
    // generous float window, tightened by the exact predicate
    let w = (uv as f64 * delta2.max(0.0)).min(i64::MAX as f64 / 4.0).floor() as i64 + 1;
    let count = sorted
        .par_iter()
        .map(|a| {
            let lo = keys.partition_point(|&k| k < a.uv.saturating_sub(w));
            let hi = keys.partition_point(|&k| k <= a.uv.saturating_add(w));
            sorted[lo..hi].iter().filter(|b| near_in_product(a, b, uv, delta2) && near_in_frac(a, b, delta1)).count()
                as u64
        })
        .sum();
    Ok(count)
}

/// Lemma-shaped bound Δ1Δ2A²C² + Δ1²A²C² + AC + Δ2A² + Δ2C², unit constants.
pub fn gk_bound(delta1: f64, delta2: f64, a: f64, c: f64) -> f64 {
    let (a2, c2) = (a * a, c * c);
    delta1 * delta2 * a2 * c2 + delta1 * delta1 * a2 * c2 + a * c + delta2 * a2 + delta2 * c2
}

/// Δ1(X) = L/X², Δ2(X) = L/(ηX²), both capped at 1.
pub fn deltas_at(band: &SieveBand, x: f64) -> (f64, f64) {
    let l = band.l as f64;
    ((l / (x * x)).min(1.0), (l / (band.eta() * x * x)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub members: usize,
    pub region_size: u64,
    pub eta: f64,
    pub x0: f64,
    pub b_integral: f64,
}

/// ∫_{a}^{b} B(Δ1(X), Δ2(X)) dX. Each pair counts exactly while X stays
/// below √(L/‖·‖) and √(L/(η|Δuv|/UV)), so the integral is a sum of clipped
/// thresholds.
pub fn b_integral(set: &[Resonant], band: &SieveBand, a: f64, b: f64) -> Result<f64> {
    if set.len() > PAIR_BUDGET {
        return Err(Error::Budget { what: "b_integral", achieved: set.len() as f64 });
    }
    if b <= a {
        return Ok(0.0);
    }
    let (l, eta, uv) = (band.l as f64, band.eta(), band.uv() as f64);
    let reach = |dist: f64, scale: f64| {
        if dist == 0.0 {
            f64::INFINITY
        } else if dist > 1.0 {
            0.0
        } else {
            (l / (scale * dist)).sqrt()
        }
    };
    let total = set
        .par_iter()
        .map(|x| {
            set.iter()
                .map(|y| {
                    let qq = x.q as i128 * y.q as i128;
                    let n = (x.inv as i128 * y.q as i128 - y.inv as i128 * x.q as i128).rem_euclid(qq);
                    let frac = n.min(qq - n) as f64 / qq as f64;
                    let prod = (x.uv - y.uv).unsigned_abs() as f64 / uv;
                    reach(frac, 1.0).min(reach(prod, eta)).clamp(a, b) - a
                })
                .sum::<f64>()
        })
        .collect::<Vec<f64>>();
    Ok(total.iter().sum())
}

/// LHS and RHS of the Farey large-sieve inequality for the given weights.
/// `nu` is indexed like `members`, `lambda` by ℓ − L1.
pub fn large_sieve_check(
    members: &[BlockPhaseData],
    band: &SieveBand,
    nu: &[Complex64],
    lambda: &[Complex64],
    sign: Sign,
) -> Result<SieveReport> {
    let n_ell = (band.l2 - band.l1 + 1) as usize;
    if nu.len() != members.len() || lambda.len() != n_ell {
        return Err(Error::Invalid(format!(
            "weights: {} ν for {} blocks, {} λ for {} frequencies",
            nu.len(),
            members.len(),
            lambda.len(),
            n_ell
        )));
    }
    let inner: Vec<Complex64> = (0..n_ell)
        .into_par_iter()
        .map(|k| {
            let ell = (band.l1 + k as u64) as f64;
            let mut s = Complex64::new(0.0, 0.0);
            for (d, &w) in members.iter().zip(nu) {
                let om = d.omega(stationary_point(d, ell, sign));
                if om == 0.0 || w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let h = amplitude_h(d, ell, sign)?;
                s += w * Complex64::from_polar(h * om, TAU * g_jr(d, ell, sign).rem_euclid(1.0));
            }
            Ok(s * lambda[k])
        })
        .collect::<Result<Vec<_>>>()?;
    let lhs = inner.iter().sum::<Complex64>().norm_sqr();

    let set: Vec<Resonant> = members.iter().map(Resonant::from).collect();
    let region_size = band.region.count();
    let (eta, x0) = (band.eta(), band.x0());
    let integral = b_integral(&set, band, x0, band.l as f64)?;
    let max_nu = nu.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let sum_lambda: f64 = lambda.iter().map(|z| z.norm_sqr()).sum();
    let rhs = max_nu
        * sum_lambda
        * (eta * band.r as f64 * band.v as f64 / band.u as f64)
        * (x0 * (region_size as f64).powi(2) + integral);
    Ok(SieveReport {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        members: members.len(),
        region_size,
        eta,
        x0,
        b_integral: integral,
    })
}

/// |(g_ir − g_jr)' − z_ijr| / (η|u_iv_i − u_jv_j|/(UV)); None on equal products.
pub fn zest_ratio(di: &BlockPhaseData, dj: &BlockPhaseData, band: &SieveBand, ell: f64, sign: Sign) -> Option<f64> {
    let gap = (di.u * di.v - dj.u * dj.v).unsigned_abs();
    if gap == 0 {
        return None;
    }
    let p = pair_phase_derivatives(di, dj, ell, sign);
    Some((p.first - z_ijr(di, dj)).abs() / (band.eta() * gap as f64 / band.uv() as f64))
}

/// Seeded unimodular weights e(θ_k), θ_k uniform.
pub fn unimodular_weights(n: usize, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Complex64::from_polar(1.0, TAU * rng.gen::<f64>())).collect()
}

/// Reference count: the pairs passing each condition are collected
/// separately and intersected. Distances are compared in floating point;
/// the integer predicates are consulted only within 1e-9 of a tie.
pub fn resonance_count_b_oracle(set: &[Resonant], uv: u64, delta1: f64, delta2: f64) -> Result<u64> {
    use std::collections::HashSet;
    if set.len() > PAIR_BUDGET {
        return Err(Error::Budget { what: "resonance_count_b_oracle", achieved: set.len() as f64 });
    }
    let close = |dist: f64, bound: f64, exact: &dyn Fn() -> bool| {
        if (dist - bound).abs() <= 1e-9 * bound.abs().max(1e-300) {
            exact()
        } else {
            dist <= bound
        }
    };
    let mut first = HashSet::new();
    let mut second = HashSet::new();
    for (i, a) in set.iter().enumerate() {
        for (j, b) in set.iter().enumerate() {
            let x = a.inv as f64 / a.q as f64 - b.inv as f64 / b.q as f64;
            let frac = (x - x.round()).abs();
            if close(frac, delta1, &|| near_in_frac(a, b, delta1)) {
                first.insert((i, j));
            }
            let gap = (a.uv - b.uv).abs() as f64;
            if close(gap, uv as f64 * delta2, &|| near_in_product(a, b, uv, delta2)) {
                second.insert((i, j));
            }
        }
    }
    Ok(first.intersection(&second).count() as u64)
}

/// Farey systems the resonance grid is drawn from: (t, M, M0).
pub const GRID_SYSTEMS: [(f64, u64, u64); 3] = [(1e6, 20_000, 20), (1e6, 40_000, 20), (4e6, 40_000, 40)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub t: f64,
    pub m: u64,
    pub m0: u64,
    pub u1: i64,
    pub u2: i64,
    pub v1: i64,
    pub v2: i64,
    pub members: usize,
    pub x: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub a: f64,
    pub c: f64,
    pub count: u64,
    pub gk: f64,
    pub ratio: f64,
}

/// Bands of a system: V in the top dyadic range below R, U in each dyadic
/// range met by the fractions, L the dyadic range ending at the next power
/// of two above M0.
pub fn dyadic_bands(sys: &FareySystem) -> Result<Vec<SieveBand>> {
    let p = &sys.params;
    let vmax = *sys.v.iter().max().ok_or_else(|| Error::DegenerateInterval("empty system".into()))?;
    let v1 = 1i64 << (63 - (vmax as u64).leading_zeros());
    let v2 = (2 * v1 - 1).min(vmax);
    let l = p.m0.next_power_of_two().max(2);
    let (mut umin, mut umax) = (i64::MAX, 0);
    for (&u, &v) in sys.u.iter().zip(&sys.v) {
        if (v1..=v2).contains(&v) {
            umin = umin.min(u);
            umax = umax.max(u);
        }
    }
    let mut out = Vec::new();
    let mut u1 = 1i64 << (63 - (umin.max(1) as u64).leading_zeros());
    while u1 <= umax {
        out.push(SieveBand::new(p.t, 1, (0, 1), (l / 2 + 1, l), (u1, 2 * u1 - 1), (v1, v2))?);
        u1 *= 2;
    }
    Ok(out)
}

/// B against the counting bound over X-derived (Δ1, Δ2) for every band of
/// every grid system; `xs` points per band, geometric in [X0, L].
pub fn resonance_grid(level: u64, weight: u32, xs: usize) -> Result<Vec<GridPoint>> {
    resonance_grid_for(&GRID_SYSTEMS, level, weight, xs)
}

/// As `resonance_grid` over the given (t, M, M0) systems.
pub fn resonance_grid_for(systems: &[(f64, u64, u64)], level: u64, weight: u32, xs: usize) -> Result<Vec<GridPoint>> {
    let mut out = Vec::new();
    for &(t, m, m0) in systems {
        let sys = crate::farey::build_farey_system(crate::farey::FareyParams::dyadic(t, m, m0)?)?;
        for band in dyadic_bands(&sys)? {
            let set: Vec<Resonant> = band_members(&sys, &band, level, weight)?.iter().map(Resonant::from).collect();
            if set.is_empty() {
                continue;
            }
            let (a, c) = band.gk_parameters();
            let (x0, l) = (band.x0(), band.l as f64);
            for k in 0..xs {
                let x = if xs == 1 { x0 } else { x0 * (l / x0).powf(k as f64 / (xs - 1) as f64) };
                let (d1, d2) = deltas_at(&band, x);
                let count = resonance_count_b(&set, band.uv(), d1, d2)?;
                let gk = gk_bound(d1, d2, a, c);
                out.push(GridPoint {
                    t,
                    m,
                    m0,
                    u1: band.region.u1,
                    u2: band.region.u2,
                    v1: band.region.v1,
                    v2: band.region.v2,
                    members: set.len(),
                    x,
                    delta1: d1,
                    delta2: d2,
                    a,
                    c,
                    count,
                    gk,
                    ratio: count as f64 / gk,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
