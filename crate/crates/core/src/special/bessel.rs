//! Bessel J_ν(x) for integer order: power series near the origin, Miller's
//! backward recurrence in the transition zone, Hankel's expansion beyond.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

pub const MAX_ORDER: u32 = 160;
const SERIES_LIMIT: f64 = 12.0;

/// Power series Σ (−1)^m (x/2)^{2m+ν} / (m! (m+ν)!).
pub fn bessel_j_series(nu: u32, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = 1.0;
    for i in 1..=nu {
        term *= h / i as f64;
    }
    let mut sum = term;
    let h2 = h * h;
    for m in 1..500 {
        term *= -h2 / (m as f64 * (m + nu) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn hankel_terms(nu: u32, x: f64) -> Option<(f64, f64)> {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() > last {
            return None;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            return Some((p, q));
        }
    }
    None
}

/// Hankel asymptotic expansion; `None` when the series has not converged.
pub fn bessel_j_hankel(nu: u32, x: f64) -> Option<f64> {
    let (p, q) = hankel_terms(nu, x)?;
    // χ = x − θ with θ = (2ν+1)π/4, expanded to avoid reducing large x − θ
    let (sx, cx) = x.sin_cos();
    let (st, ct) = match (2 * nu + 1) % 8 {
        1 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        3 => (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        5 => (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        _ => (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    };
    let cos_chi = cx * ct + sx * st;
    let sin_chi = sx * ct - cx * st;
    Some((2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi))
}

fn miller_start(nmax: u32, x: f64) -> usize {
    let top = (nmax as f64).max(x);
    let m = top + 20.0 + (40.0 * top).sqrt();
    2 * ((m as usize) / 2 + 1)
}

/// J_0..=J_nmax at x by Miller's backward recurrence normalized with
/// J_0 + 2 Σ J_{2k} = 1.
pub fn bessel_j_miller_seq(nmax: u32, x: f64) -> Vec<f64> {
    let start = miller_start(nmax, x);
    let mut out = vec![0.0; nmax as usize + 1];
    let (mut jp, mut j) = (0.0f64, 1e-30f64);
    let mut sum = 0.0;
    for n in (1..=start).rev() {
        let jm = 2.0 * n as f64 / x * j - jp;
        jp = j;
        j = jm;
        // j now holds J_{n-1}
        let idx = n - 1;
        if idx <= nmax as usize {
            out[idx] = j;
        }
        if idx % 2 == 0 && idx > 0 {
            sum += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            sum *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    sum += j;
    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}

fn crossover_table() -> &'static Vec<f64> {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|nu| {
                let mut x = 25.0f64.max(nu as f64);
                while hankel_terms(nu, x).is_none() {
                    x *= 1.05;
                }
                x
            })
            .collect()
    })
}

/// Smallest argument at which the Hankel branch is used for order ν.
pub fn hankel_crossover(nu: u32) -> f64 {
    crossover_table()[nu as usize]
}

pub fn series_crossover(_nu: u32) -> f64 {
    SERIES_LIMIT
}

/// J_ν(x) for integer 0 ≤ ν ≤ MAX_ORDER and x ≥ 0.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    assert!(nu <= MAX_ORDER && x >= 0.0, "bessel_j({nu}, {x}) out of range");
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        return bessel_j_series(nu, x);
    }
    if x >= hankel_crossover(nu) {
        return bessel_j_hankel(nu, x).expect("crossover guarantees convergence");
    }
    bessel_j_miller_seq(nu, x)[nu as usize]
}

/// J_ν(x) for all ν in 0..=nmax.
pub fn bessel_j_seq(nmax: u32, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; nmax as usize + 1];
        v[0] = 1.0;
        return v;
    }
    if x > nmax as f64 + 1.0 && x >= hankel_crossover(1) {
        // upward recurrence is stable while ν < x
        let mut v = Vec::with_capacity(nmax as usize + 1);
        v.push(bessel_j(0, x));
        if nmax >= 1 {
            v.push(bessel_j(1, x));
        }
        for n in 1..nmax as usize {
            let next = 2.0 * n as f64 / x * v[n] - v[n - 1];
            v.push(next);
        }
        return v;
    }
    if x <= SERIES_LIMIT {
        return (0..=nmax).map(|n| bessel_j_series(n, x)).collect();
    }
    bessel_j_miller_seq(nmax, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        // 30-digit offline evaluations
        let cases = [
            (11, 20.0, 0.061_356_303_375_950_93),
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 30.0, -0.118_751_062_616_622_94),
            (11, 100.0, 0.052_290_326_018_936_48),
            (5, 7.5, 0.283_473_905_162_550_46),
            (3, 1e6, 0.000_725_967_032_635_900_3),
            (11, 12345.6, 0.007_163_976_998_714_356),
        ];
        for (nu, x, want) in cases {
            assert!((bessel_j(nu, x) - want).abs() < 1e-12, "J_{nu}({x})");
        }
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(7, 0.0), 0.0);
    }

    #[test]
    fn branches_agree_at_crossovers() {
        for nu in 0..=20u32 {
            let xs = series_crossover(nu);
            let s = bessel_j_series(nu, xs);
            let m = bessel_j_miller_seq(nu, xs)[nu as usize];
            assert!((s - m).abs() < 1e-9, "series/miller nu={nu}");
            let xh = hankel_crossover(nu);
            let h = bessel_j_hankel(nu, xh).unwrap();
            let m = bessel_j_miller_seq(nu, xh)[nu as usize];
            assert!((h - m).abs() < 1e-9, "miller/hankel nu={nu}: {h} {m}");
        }
    }

    #[test]
    fn sequence_matches_pointwise() {
        for &x in &[0.5, 11.0, 30.0, 77.7, 500.0, 1e5] {
            let seq = bessel_j_seq(30, x);
            for (n, v) in seq.iter().enumerate() {
                assert!((v - bessel_j(n as u32, x)).abs() < 1e-11, "n={n} x={x}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        // d/dx {x^ν J_ν(x)} = x^ν J_{ν−1}(x)
        #[test]
        fn derivative_identity(nu in 1u32..=12, x in 0.5f64..50.0) {
            let h = 1e-4;
            let f = |y: f64| y.powi(nu as i32) * bessel_j(nu, y);
            let fd = (f(x + h) - f(x - h)) / (2.0 * h);
            let want = x.powi(nu as i32) * bessel_j(nu - 1, x);
            prop_assert!((fd - want).abs() <= 1e-6 * want.abs().max(x.powi(nu as i32) * 1e-3).max(1.0));
        }
    }
}
