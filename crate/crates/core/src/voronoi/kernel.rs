//! C² test functions with quintic smoothstep edges and the Bessel transforms
//! ∫ F(x) J_ν(c√x) dx.
//!
//! Because F is piecewise polynomial of degree 5, repeated integration by
//! parts with d/dx[z^{μ+1}J_{μ+1}(z)] = (c²/2) z^μ J_μ(z), z = c√x, leaves
//! only jump terms at the four breakpoints:
//!
//!   I = Σ_b Σ_j (−1)^{j+1} 2^{j+1} c^{−(j+1)} x_b^{(ν+j+1)/2} J_{ν+j+1}(z_b) [H_j]_b,
//!   H_j = d^j/dx^j (F(x) x^{−ν/2}),
//!
//! where [·]_b is the jump across x_b. Only F''', F'''' and F⁽⁵⁾ jump, and the
//! series in j is asymptotic in 1/z_b; it is used once every z_b ≥ 100.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::bessel::{bessel_j, bessel_j_seq};
use crate::special::quad::gauss_legendre;

/// 1 on [x1, x2], rising on [x0, x1] and falling on [x2, x3] along
/// s(τ) = 10τ³ − 15τ⁴ + 6τ⁵.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

// s^{(i)}(τ), i = 0..=5
fn smoothstep(i: usize, t: f64) -> f64 {
    match i {
        0 => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
        1 => 30.0 * t * t * (1.0 - t) * (1.0 - t),
        2 => 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
        3 => 60.0 - 360.0 * t + 360.0 * t * t,
        4 => -360.0 + 720.0 * t,
        5 => 720.0,
        _ => 0.0,
    }
}

impl Bump {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Result<Self> {
        if !(0.0 < x0 && x0 < x1 && x1 <= x2 && x2 < x3) {
            return Err(Error::Invalid(format!("bump breakpoints must increase: {x0}, {x1}, {x2}, {x3}")));
        }
        Ok(Bump { x0, x1, x2, x3 })
    }

    /// Support [a, b] with edges of the given fraction of b − a.
    pub fn with_edges(a: f64, b: f64, edge: f64) -> Result<Self> {
        let w = (b - a) * edge;
        Self::new(a, a + w, b - w, b)
    }

    pub fn breakpoints(&self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    /// x ↦ F(q·x).
    pub fn compressed(&self, q: f64) -> Bump {
        Bump { x0: self.x0 / q, x1: self.x1 / q, x2: self.x2 / q, x3: self.x3 / q }
    }

    /// i-th derivative, i ≤ 5; inside a piece, with `right` choosing the side at breakpoints.
    fn deriv_side(&self, i: usize, x: f64, right: bool) -> f64 {
        let inside = |lo: f64, hi: f64| if right { x >= lo && x < hi } else { x > lo && x <= hi };
        if inside(self.x0, self.x1) {
            let w = self.x1 - self.x0;
            smoothstep(i, (x - self.x0) / w) / w.powi(i as i32)
        } else if inside(self.x1, self.x2) {
            if i == 0 {
                1.0
            } else {
                0.0
            }
        } else if inside(self.x2, self.x3) {
            let w = self.x3 - self.x2;
            let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * smoothstep(i, (self.x3 - x) / w) / w.powi(i as i32)
        } else {
            0.0
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.deriv_side(0, x, true)
    }

    pub fn deriv(&self, i: usize, x: f64) -> f64 {
        self.deriv_side(i, x, true)
    }

    /// Jump F^{(i)}(x+) − F^{(i)}(x−).
    pub fn jump(&self, i: usize, x: f64) -> f64 {
        self.deriv_side(i, x, true) - self.deriv_side(i, x, false)
    }

    /// Pieces on which F is a single polynomial.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        let b = self.breakpoints();
        b.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
    }
}

/// Smallest z_b at which the jump expansion is trusted.
pub const IBP_MIN_Z: f64 = 100.0;
const MAX_J: usize = 60;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The c-independent part of the jump expansion for one (F, ν):
/// per breakpoint, A_j = (−1)^{j+1} 2^{j+1} x_b^{(ν+j+1)/2} [H_j]_b.
#[derive(Debug, Clone)]
pub struct KernelPlan {
    nu: u32,
    x_min: f64,
    points: Vec<(f64, Vec<f64>)>,
}

impl KernelPlan {
    pub fn new(f: &Bump, nu: u32) -> Self {
        let half = nu as f64 / 2.0;
        let bp = f.breakpoints();
        let mut points = Vec::new();
        for (bi, &x) in bp.iter().enumerate() {
            if bi > 0 && x == bp[bi - 1] {
                continue;
            }
            let jumps = [f.jump(3, x), f.jump(4, x), f.jump(5, x)];
            let coefs = (0..=MAX_J)
                .map(|j| {
                    // [H_j] = Σ_i C(j,i)[F^{(i)}] · d^{j−i}/dx^{j−i} x^{−ν/2}
                    let mut h = 0.0;
                    for (ii, &jmp) in jumps.iter().enumerate() {
                        let i = ii + 3;
                        if i > j || jmp == 0.0 {
                            continue;
                        }
                        let m = j - i;
                        let fall: f64 = (0..m).map(|l| -half - l as f64).product();
                        h += binom(j, i) * jmp * fall * x.powf(-half - m as f64);
                    }
                    let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                    sign * 2f64.powi(j as i32 + 1) * x.powf((nu as f64 + j as f64 + 1.0) / 2.0) * h
                })
                .collect();
            points.push((x, coefs));
        }
        KernelPlan { nu, x_min: bp[0], points }
    }

    /// ∫ F(x) J_ν(c√x) dx by the jump expansion; `None` when some z_b < 100.
    pub fn eval(&self, c: f64) -> Option<f64> {
        if c * self.x_min.sqrt() < IBP_MIN_Z {
            return None;
        }
        let nu = self.nu as usize;
        let mut total = 0.0;
        for (x, a) in &self.points {
            let z = c * x.sqrt();
            // terms shrink roughly like j!(2/z)^j until j ≈ z/2
            let j_max = MAX_J.min((z / 2.0) as usize);
            let js = bessel_j_seq((nu + j_max + 1) as u32, z);
            let amp = (2.0 / (std::f64::consts::PI * z)).sqrt();
            let inv_c = 1.0 / c;
            let mut cp = inv_c.powi(4);
            let mut first = 0.0;
            let mut prev = f64::INFINITY;
            for j in 3..=j_max {
                let coef = a[j] * cp;
                cp *= inv_c;
                total += coef * js[nu + j + 1];
                // envelopes rather than values, and two in a row, since the
                // jump sources can cancel at a single j
                let env = coef.abs() * amp;
                if j == 3 {
                    first = env;
                } else if env.max(prev) <= 1e-18 * first {
                    break;
                }
                prev = env;
            }
        }
        Some(total)
    }
}

/// ∫ F(x) J_ν(c√x) dx by the jump expansion; `None` when some z_b < 100.
pub fn kernel_integral_ibp(f: &Bump, nu: u32, c: f64) -> Option<f64> {
    KernelPlan::new(f, nu).eval(c)
}

/// Gauss–Legendre evaluation in u = √x, panels sized to the oscillation;
/// returns the value and the difference from a rule with half as many panels.
pub fn kernel_integral_quad(f: &Bump, nu: u32, c: f64) -> (f64, f64) {
    let gl = gauss_legendre(20);
    let run = |density: f64| -> f64 {
        let mut s = 0.0;
        for (a, b) in f.pieces() {
            let (ua, ub) = (a.sqrt(), b.sqrt());
            let panels = ((c * (ub - ua) / std::f64::consts::PI) * density).ceil().max(2.0) as usize;
            let h = (ub - ua) / panels as f64;
            for k in 0..panels {
                let lo = ua + k as f64 * h;
                s += gl.integrate(lo, lo + h, |u| 2.0 * u * f.eval(u * u) * bessel_j(nu, c * u));
            }
        }
        s
    };
    let fine = run(1.0);
    let coarse = run(0.5);
    (fine, (fine - coarse).abs())
}

/// ∫ F(x) J_ν(c√x) dx, by jumps when z is large and by quadrature otherwise.
pub fn kernel_integral(f: &Bump, nu: u32, c: f64) -> f64 {
    kernel_integral_ibp(f, nu, c).unwrap_or_else(|| kernel_integral_quad(f, nu, c).0)
}

impl KernelPlan {
    /// Same as [`kernel_integral`] with the plan's precomputation reused.
    pub fn integral(&self, f: &Bump, c: f64) -> f64 {
        self.eval(c).unwrap_or_else(|| kernel_integral_quad(f, self.nu, c).0)
    }
}
