use super::*;
use crate::arithforms::lookup;
use crate::farey::{build_farey_system, FareyParams};
use proptest::prelude::*;

fn try_system(t: f64, r: u64) -> Result<FareySystem> {
    let m0 = t.powf(2.0 / 3.0).ceil() as u64;
    build_farey_system(FareyParams::dyadic(t, r * r * m0, m0)?)
}

fn system(t: f64, r: u64) -> FareySystem {
    try_system(t, r).unwrap()
}

fn mid_block(sys: &FareySystem) -> usize {
    sys.len().div_ceil(2)
}

fn data_at(t: f64, level: u64, weight: u32) -> BlockPhaseData {
    let sys = system(t, 1);
    BlockPhaseData::new(&sys, mid_block(&sys), 1, level, weight).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Median relative error of the stationary value against the direct integral
/// over core ℓ, for one sign or both.
fn ladder_median(t: f64, sign: Option<Sign>) -> f64 {
    let data = data_at(t, 1, 12);
    let quad = QuadratureSpec::default();
    let errs: Vec<f64> = core_sample(&data, 200_000, 8)
        .into_iter()
        .filter(|&(_, s)| sign.is_none_or(|x| x == s))
        .map(|(l, s)| check_stationary_phase(&data, l as f64, s, &quad).unwrap().rel_err)
        .collect();
    median(&errs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn stationary_point_solves_phase_equation(t in 1e4f64..1.6e5, ell in 0.5f64..400.0, plus in any::<bool>(), r in 1u64..4) {
        let sys = try_system(t, r);
        // small R can leave the interval without fractions
        prop_assume!(sys.is_ok());
        let sys = sys.unwrap();
        let j = 1 + (ell as usize) % sys.len();
        let data = BlockPhaseData::new(&sys, j, 1, 1, 12).unwrap();
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let x = stationary_point(&data, ell, sign);
        prop_assert!(x > 0.0);
        // φ' is a difference of terms of size u/v; measure against that
        let scale = data.u as f64 / data.v as f64 + data.t / (TAU * x);
        prop_assert!(phase_phi_prime(&data, ell, sign, x).abs() <= 1e-8 * scale);
        let q = data.q as f64;
        let quad = data.u as f64 / data.v as f64 * x - sign.s() * ell.sqrt() / q * x.sqrt() - data.t / TAU;
        prop_assert!(quad.abs() <= 1e-10 * data.t / TAU);
    }

    #[test]
    fn amplitude_normalisation_identity(t in 1e4f64..1.6e5, ell in 0.5f64..400.0, plus in any::<bool>()) {
        let data = data_at(t, 1, 12);
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let h = amplitude_h(&data, ell, sign).unwrap();
        prop_assert!((normalisation_lhs(&data, ell, sign) * h - 1.0).abs() < 1e-10);
    }

    #[test]
    fn g_is_phase_at_stationary_point_plus_eighth(t in 1e4f64..1.6e5, ell in 0.5f64..400.0, plus in any::<bool>()) {
        let data = data_at(t, 1, 12);
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let x = stationary_point(&data, ell, sign);
        let d = phase_g(&data, ell, sign) - phase_phi(&data, ell, sign, x);
        prop_assert!((d - 0.125).abs() < 1e-9 * data.t);
    }
}

#[test]
fn zero_frequency_gives_the_farey_point() {
    for t in [1e4, 1e5] {
        let data = data_at(t, 1, 12);
        let h_alpha = t * data.v as f64 / (TAU * data.u as f64);
        for s in Sign::BOTH {
            assert!(rel(stationary_point(&data, 0.0, s), h_alpha) < 1e-13);
        }
    }
}

#[test]
fn minus_point_lies_below_plus_point() {
    let data = data_at(4e4, 1, 12);
    for l in [1e-6, 0.3, 1.0, 17.0, 500.0, 1e5] {
        assert!(stationary_point(&data, l, Sign::Minus) < stationary_point(&data, l, Sign::Plus));
    }
}

#[test]
fn rationalised_minus_branch_survives_large_frequency() {
    let data = data_at(1e4, 1, 12);
    let ell = 1e14;
    let x = stationary_point(&data, ell, Sign::Minus);
    let scale = data.u as f64 / data.v as f64 + data.t / (TAU * x);
    assert!(x > 0.0);
    assert!(phase_phi_prime(&data, ell, Sign::Minus, x).abs() <= 1e-8 * scale);
}

#[test]
fn phase_difference_between_signs() {
    let data = data_at(1e5, 1, 12);
    for (l, x) in [(1.0, 2500.0), (37.0, 2700.0), (250.0, 3000.0)] {
        let d = phase_phi(&data, l, Sign::Plus, x) - phase_phi(&data, l, Sign::Minus, x);
        let want = -4.0 * (l * x / (data.q * data.q) as f64).sqrt() - 0.25;
        assert!((d - want).abs() < 1e-9);
    }
    let d0 = phase_phi(&data, 0.0, Sign::Minus, 2500.0);
    assert!((d0 - (-data.t / TAU * 2500f64.ln() + data.u as f64 / data.v as f64 * 2500.0 + 0.125)).abs() < 1e-9);
}

#[test]
fn amplitude_small_frequency_scaling() {
    let data = data_at(4e4, 1, 12);
    let x0 = stationary_point(&data, 0.0, Sign::Plus);
    let lead = (data.q as f64 * data.t / (PI * x0.powf(1.5))).powf(-0.5);
    for l in [1e-8, 1e-10] {
        for s in Sign::BOTH {
            let h = amplitude_h(&data, l, s).unwrap();
            assert!(rel(h, lead * l.powf(-0.25)) < 1e-3, "{l} {s:?}");
        }
    }
}

#[test]
fn amplitude_increases_with_frequency() {
    let data = data_at(1e5, 1, 12);
    for s in Sign::BOTH {
        let hs: Vec<f64> = (1..2000).map(|l| l as f64 * amplitude_h(&data, l as f64, s).unwrap()).collect();
        assert!(hs.windows(2).all(|w| w[1] > w[0]), "{s:?}");
    }
}

#[test]
fn main_term_is_normalised_stationary_integral() {
    for weight in [2, 12, 3] {
        let data = data_at(1e5, 1, weight);
        for (l, s) in core_sample(&data, 10_000, 5) {
            let l = l as f64;
            let i = stationary_main_integral(&data, l, s).unwrap();
            let m = main_term_single(&data, l, s).unwrap();
            let pm = if s == Sign::Plus && weight % 2 == 1 { -1.0 } else { 1.0 };
            let scaled = i / (2.0 * (l / data.r as f64).sqrt() * data.q as f64).sqrt() * pm;
            assert!((scaled - m).norm() < 1e-10 * m.norm(), "{weight} {l} {s:?} {scaled} {m}");
            assert!(m.norm() <= amplitude_h(&data, l, s).unwrap() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn main_term_vanishes_outside_the_weight() {
    let data = data_at(1e4, 1, 12);
    let l = (1..100_000u64).find(|&l| data.omega(stationary_point(&data, l as f64, Sign::Plus)) == 0.0).unwrap();
    assert_eq!(main_term_single(&data, l as f64, Sign::Plus).unwrap().norm(), 0.0);
}

#[test]
fn direct_integral_self_converges() {
    let data = data_at(1e4, 1, 12);
    let coarse = integral_direct(&data, 1.0, Sign::Plus, &QuadratureSpec::default()).unwrap();
    let fine =
        integral_direct(&data, 1.0, Sign::Plus, &QuadratureSpec { abs_tol: 1e-12, ..Default::default() }).unwrap();
    assert!((coarse - fine).norm() < 1e-8);
}

#[test]
fn direct_integral_conjugation_symmetry() {
    let data = data_at(1e4, 1, 12);
    let mirror = BlockPhaseData { t: -data.t, u: -data.u, ..data };
    let quad = QuadratureSpec::default();
    for l in [1.0, 20.0] {
        let a = integral_direct(&data, l, Sign::Plus, &quad).unwrap();
        let b = integral_direct(&mirror, l, Sign::Minus, &quad).unwrap();
        assert!((a - b.conj()).norm() < 1e-8);
    }
}

#[test]
fn empty_weight_integrates_to_zero() {
    let data = data_at(1e4, 1, 12);
    let flat = BlockPhaseData { n_hi: data.n_lo, ..data };
    let v = integral_direct(&flat, 3.0, Sign::Minus, &QuadratureSpec::default()).unwrap();
    assert!(v.norm() < 1e-12);
}

#[test]
fn block_data_rejects_shared_factor() {
    let sys = system(1e5, 3);
    let j = (1..=sys.len()).find(|&j| sys.v[j - 1] == 3).unwrap();
    assert!(matches!(BlockPhaseData::new(&sys, j, 6, 1, 12), Err(Error::NotCoprime(..))));
    assert!(BlockPhaseData::new(&sys, j, 2, 1, 12).is_ok());
}

#[test]
fn stationary_phase_error_ladder() {
    let m: Vec<f64> = [1e4, 4e4, 1.6e5].iter().map(|&t| ladder_median(t, None)).collect();
    println!("ladder medians {m:?}");
    assert!(m[0] > m[1] && m[1] > m[2]);
    for s in Sign::BOTH {
        let at = ladder_median(1e5, Some(s));
        println!("t = 1e5 {s:?} median {at:.3e}");
        assert!(at <= 0.05);
    }
}

#[test]
fn first_derivative_ratio_is_tracked() {
    let data = data_at(1e4, 1, 12);
    let quad = QuadratureSpec::default();
    let tp = TransformParams::new(&system(1e4, 1), data.v, DEFAULT_C_K);
    let l = tp.ell_max(&data) as f64 + 1.0;
    for s in Sign::BOTH {
        let c = first_derivative_ratio(&data, l, s, &quad).unwrap();
        println!("first-derivative constant at ℓ = {l}, {s:?}: {c:.3e}");
        assert!(c.is_finite());
    }
}

#[test]
fn transform_params_split() {
    let sys = system(1e5, 2);
    for j in 1..=sys.len() {
        let data = BlockPhaseData::new(&sys, j, 1, 1, 12).unwrap();
        let tp = TransformParams::new(&sys, data.v, DEFAULT_C_K);
        assert_eq!(tp.k1, (4.0 * sys.params.m as f64 / (sys.params.r * sys.params.r)).ceil() as u64);
        assert!(tp.split_holds(&data));
    }
}

#[test]
fn block_transform_single_fraction() {
    for (label, tol) in [("1.12.a", 0.1), ("11.2.a", 0.03)] {
        let spec = lookup(label).unwrap();
        let sys = system(1e5, 1);
        let j = mid_block(&sys);
        let r = block_transform_check(&spec, &sys, j, DEFAULT_C_K).unwrap();
        println!("{label}: |A − B|/|A| = {:.3e}, envelope {:.3e}", r.rel_diff, r.envelope);
        assert!(r.rel_diff < tol);
        let wide = block_transform_check(&spec, &sys, j, 2.0 * DEFAULT_C_K).unwrap();
        let moved = (wide.main_re - r.main_re).hypot(wide.main_im - r.main_im);
        assert!(moved <= r.tail_estimate + 1e-12);
    }
}

#[test]
fn block_transform_with_bad_part() {
    let spec = lookup("4.6.a").unwrap();
    let sys = system(1e5, 2);
    let j = (1..=sys.len()).find(|&j| sys.v[j - 1] == 2).unwrap();
    let r = block_transform_check(&spec, &sys, j, DEFAULT_C_K).unwrap();
    println!("4.6.a u/v = {}/{}: |A − B|/|A| = {:.3e}", r.u, r.v, r.rel_diff);
    assert!(r.rel_diff < 0.05);
}

#[test]
fn median_of_samples() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    assert!(median(&[f64::NAN]).is_nan());
}
