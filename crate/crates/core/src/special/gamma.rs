//! Complex log-gamma by shifted Stirling series, and the real upper
//! incomplete gamma function.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2m} / (2m (2m-1)) for m = 1..12
const STIRLING: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
];

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// log Γ(z). On Re z ≥ 1/2 this is the principal branch, continuous in z.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        // reflection keeps the sign right without tracking log branches
        let s = (z * PI).sin();
        return Ok(Complex64::new(PI, 0.0) / (s * complex_gamma(Complex64::new(1.0, 0.0) - z)?));
    }
    Ok(ln_gamma(z)?.exp())
}

/// Γ for real arguments, signed.
pub fn gamma_real(a: f64) -> Result<f64> {
    Ok(complex_gamma(Complex64::new(a, 0.0))?.re)
}

/// Γ_C(k/2 − it) / Γ_C(k/2 + it), a unimodular number.
pub fn gamma_ratio_unit(k: u32, t: f64) -> Complex64 {
    let lg = ln_gamma(Complex64::new(k as f64 / 2.0, t)).expect("right half-plane");
    let phase = 2.0 * t * (2.0 * PI).ln() - 2.0 * lg.im;
    Complex64::from_polar(1.0, phase)
}

/// Γ_C(s) = 2 (2π)^{-s} Γ(s).
pub fn gamma_c(s: Complex64) -> Result<Complex64> {
    Ok((ln_gamma(s)? - s * (2.0 * PI).ln()).exp() * 2.0)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn lower_series(a: f64, x: f64) -> f64 {
    // γ(a,x) = x^a e^{-x} Σ x^n / (a (a+1) ... (a+n))
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = 1.0;
    while term.abs() > sum.abs() * 1e-17 {
        term *= x / (a + n);
        sum += term;
        n += 1.0;
        if n > 10_000.0 {
            break;
        }
    }
    sum * (a * x.ln() - x).exp()
}

fn upper_cf(a: f64, x: f64) -> f64 {
    // modified Lentz on the Legendre continued fraction
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x).exp() * h
}

fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    let mut n = 1.0;
    loop {
        term *= -x / n;
        let add = term / n;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        n += 1.0;
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Upper incomplete gamma Γ(a, x) for real a and x > 0.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Invalid(format!("incomplete gamma needs x > 0, got {x}")));
    }
    if x >= 1.0 && x >= a + 1.0 {
        return Ok(upper_cf(a, x));
    }
    if a > 0.0 {
        if x < a + 1.0 {
            return Ok(gamma_real(a)? - lower_series(a, x));
        }
        return Ok(upper_cf(a, x));
    }
    // a <= 0 and x < 1: recur downward from a0 in (0, 1], or from 0
    let steps = (-a).floor() as i64 + 1;
    let a0 = a + steps as f64;
    let (mut val, mut cur) = if (a0 - 1.0).abs() < 1e-15 && a == a.round() {
        (e1_series(x), 0.0)
    } else {
        (gamma_real(a0)? - lower_series(a0, x), a0)
    };
    while cur > a + 0.5 {
        let b = cur - 1.0;
        val = (val - (b * x.ln() - x).exp()) / b;
        cur = b;
    }
    Ok(val)
}
