//! Gauss–Legendre rules and a phase-adaptive oscillatory integrator.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                if n == 1 {
                    p0 = 1.0;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let (h, m) = ((b - a) / 2.0, (a + b) / 2.0);
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(m + h * x)).sum::<f64>() * h
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let (h, m) = ((b - a) / 2.0, (a + b) / 2.0);
        let mut s = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            s += f(m + h * x) * w;
        }
        s * h
    }
}

/// Shared Gauss–Legendre rule of order n.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let mut g = C.get_or_init(|| Mutex::new(HashMap::new())).lock().expect("rule cache");
    g.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
}

/// Composite Gauss–Legendre over `panels` equal pieces of [a, b].
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, order: usize, mut f: F) -> f64 {
    let gl = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| gl.integrate(a + i as f64 * h, a + (i + 1) as f64 * h, &mut f)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    /// Total panel budget across all refinement passes.
    pub max_panels: usize,
    /// Phase cycles covered by one panel on the first pass.
    pub cycles_per_panel: f64,
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, max_panels: 2_000_000, cycles_per_panel: 1.0, order: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

fn pass<A, P, D>(amp: &A, phase: &P, dphase: &D, breaks: &[f64], cycles: f64, order: usize) -> (Complex64, usize)
where
    A: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let gl = gauss_legendre(order);
    let mut total = Complex64::new(0.0, 0.0);
    let mut panels = 0;
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let scale = (b - a).min(cycles);
        let mut x = a;
        while x < b {
            let mut h = scale / (1.0 + dphase(x).abs());
            let probe = (x + h).min(b);
            h = h.min(scale / (1.0 + dphase(probe).abs()));
            let x1 = (x + h).min(b);
            total += gl.integrate_c(x, x1, |y| Complex64::from_polar(amp(y), TAU * phase(y)));
            panels += 1;
            x = x1;
        }
    }
    (total, panels)
}

/// ∫ amp(x) e(phase(x)) dx over the union of consecutive `breaks`. Panels
/// shrink like 1/(1 + |phase'|); successive halvings give the error estimate.
pub fn oscillatory_integral<A, P, D>(
    amp: A,
    phase: P,
    dphase: D,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<OscResult>
where
    A: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if breaks.len() < 2 {
        return Ok(OscResult { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0 });
    }
    let mut cycles = spec.cycles_per_panel;
    let (mut prev, mut used) = pass(&amp, &phase, &dphase, breaks, cycles, spec.order);
    loop {
        cycles /= 2.0;
        let (cur, n) = pass(&amp, &phase, &dphase, breaks, cycles, spec.order);
        used += n;
        let err = (cur - prev).norm();
        if err <= spec.abs_tol {
            return Ok(OscResult { value: cur, error: err, panels: used });
        }
        if used > spec.max_panels {
            return Err(Error::Budget { what: "oscillatory_integral", achieved: err });
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_on_polynomials() {
        for n in [1usize, 2, 5, 16, 40] {
            let gl = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn constant_and_linear_phase() {
        let spec = QuadratureSpec::default();
        let r = oscillatory_integral(|_| 1.0, |_| 0.0, |_| 0.0, &[0.0, 1.0], &spec).unwrap();
        assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for lam in [0.3, 7.0, 250.0] {
            let r = oscillatory_integral(|_| 1.0, |x| lam * x, |_| lam, &[0.0, 1.0], &spec).unwrap();
            let e = Complex64::from_polar(1.0, TAU * lam);
            let want = (e - 1.0) / Complex64::new(0.0, TAU * lam);
            assert!((r.value - want).norm() < 1e-12, "lam={lam}");
        }
    }

    #[test]
    fn quadratic_phase_against_simpson() {
        let spec = QuadratureSpec::default();
        let r = oscillatory_integral(|_| 1.0, |x| x * x / TAU, |x| x / PI, &[0.0, 50.0], &spec).unwrap();
        // fine fixed-step composite Simpson
        let n = 4_000_000usize;
        let h = 50.0 / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += Complex64::from_polar(w, x * x);
        }
        s *= h / 3.0;
        assert!((r.value - s).norm() < 1e-9, "{} vs {}", r.value, s);
    }

    #[test]
    fn linear_in_amplitude_and_conjugates() {
        let spec = QuadratureSpec::default();
        let ph = |x: f64| 3.0 * x.ln() + 0.2 * x;
        let dph = |x: f64| 3.0 / x + 0.2;
        let f1 = |x: f64| (-x / 10.0).exp();
        let f2 = |x: f64| x.sqrt();
        let b = [1.0, 20.0];
        let i1 = oscillatory_integral(f1, ph, dph, &b, &spec).unwrap().value;
        let i2 = oscillatory_integral(f2, ph, dph, &b, &spec).unwrap().value;
        let i12 = oscillatory_integral(|x| 2.0 * f1(x) - f2(x), ph, dph, &b, &spec).unwrap().value;
        assert!((i12 - (i1 * 2.0 - i2)).norm() < 1e-9);
        let neg = oscillatory_integral(f1, |x| -ph(x), |x| -dph(x), &b, &spec).unwrap().value;
        assert!((neg - i1.conj()).norm() < 1e-12);
    }

    #[test]
    fn budget_is_reported() {
        let spec = QuadratureSpec { abs_tol: 0.0, max_panels: 100, ..Default::default() };
        let err = oscillatory_integral(|_| 1.0, |x| x, |_| 1.0, &[0.0, 10.0], &spec).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }
}
