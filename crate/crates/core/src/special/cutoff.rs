//! The compactly supported cutoff g with g(x) + g(1/x) = 1, and its Mellin
//! kernel used by the smoothed approximate functional equation.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use super::quad::{composite, gauss_legendre};

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// K_ν(z) = ∫_0^∞ e^{−z cosh u} cosh(νu) du for small real z > 0.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    // the integrand is below e^{-700} once z cosh u > 700
    let top = (700.0 / z).acosh();
    composite(0.0, top, 64, 20, |u| (-z * u.cosh()).exp() * (nu * u).cosh())
}

/// α = e^{1/2} / (K_1(1/2) − K_0(1/2)) ≈ 2.25228.
pub fn bessel_k_half_constants() -> f64 {
    0.5f64.exp() / (bessel_k(1.0, 0.5) - bessel_k(0.0, 0.5))
}

/// ∫_{τ0}^{1} e^{−1/(1−τ²)} dτ.
fn tail_integral(tau0: f64) -> f64 {
    if tau0 >= 1.0 {
        return 0.0;
    }
    let a = tau0.max(-1.0);
    composite(a, 1.0, 24, 20, bump)
}

/// The cutoff g, optionally reparametrized as g̃(x) = g(x^λ); λ = 1 is the
/// standard cutoff. Both variants satisfy g̃(x) + g̃(1/x) = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffG {
    pub alpha: f64,
    pub lambda: f64,
}

impl Default for CutoffG {
    fn default() -> Self {
        CutoffG { alpha: bessel_k_half_constants(), lambda: 1.0 }
    }
}

impl CutoffG {
    pub fn scaled(lambda: f64) -> Self {
        CutoffG { lambda, ..Default::default() }
    }

    /// Support is contained in [0, 2^{1/λ}].
    pub fn support_end(&self) -> f64 {
        2f64.powf(1.0 / self.lambda)
    }

    pub fn eval(&self, x: f64) -> f64 {
        assert!(x > 0.0);
        let y = x.powf(self.lambda);
        if y < 0.5 {
            1.0
        } else if y > 2.0 {
            0.0
        } else {
            (self.alpha * tail_integral(y.log2())).clamp(0.0, 1.0)
        }
    }

    /// Mellin kernel G(u) with g(x) = (1/2πi) ∫ G(u) x^{−u} du/u, i.e.
    /// G(u) = α ∫_{−1}^{1} e^{−1/(1−τ²)} 2^{τu/λ} dτ.
    pub fn mellin(&self, u: Complex64) -> Complex64 {
        let u = u / self.lambda;
        let panels = 16 + (u.im.abs() * LN_2 / 2.0) as usize;
        let gl = gauss_legendre(20);
        let h = 2.0 / panels as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..panels {
            let a = -1.0 + i as f64 * h;
            s += gl.integrate_c(a, a + h, |t| (u * (t * LN_2)).exp() * bump(t));
        }
        s * self.alpha
    }
}

/// g(x) for the standard cutoff.
pub fn cutoff_g(x: f64) -> f64 {
    CutoffG::default().eval(x)
}
