use super::*;
use crate::farey::{build_farey_system, FareyParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid_system(i: usize) -> FareySystem {
    let (t, m, m0) = GRID_SYSTEMS[i];
    build_farey_system(FareyParams::dyadic(t, m, m0).unwrap()).unwrap()
}

fn bands_with_members(sys: &FareySystem) -> Vec<(SieveBand, Vec<BlockPhaseData>)> {
    dyadic_bands(sys)
        .unwrap()
        .into_iter()
        .map(|b| (b, band_members(sys, &b, 1, 12).unwrap()))
        .filter(|(_, m)| m.len() > 1)
        .collect()
}

fn resonant(members: &[BlockPhaseData]) -> Vec<Resonant> {
    members.iter().map(Resonant::from).collect()
}

#[test]
fn mod_inverse_small_cases() {
    assert_eq!(mod_inverse(3, 7).unwrap(), 5);
    assert_eq!(mod_inverse(-3, 7).unwrap(), 2);
    assert_eq!(mod_inverse(10, 1).unwrap(), 0);
    assert!(matches!(mod_inverse(4, 6), Err(Error::NotCoprime(..))));
    assert!(mod_inverse(1, 0).is_err());
}

#[test]
fn mod_inverse_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..100_000 {
        let q = rng.gen_range(2..1_000_000i64);
        let a = rng.gen_range(-10_000_000..10_000_000i64);
        if gcd_i(a, q) != 1 {
            continue;
        }
        let inv = mod_inverse(a, q).unwrap();
        assert!((0..q).contains(&inv));
        assert_eq!((a as i128 * inv as i128).rem_euclid(q as i128), 1);
        checked += 1;
    }
    assert!(checked > 50_000);
}

#[test]
fn le_scaled_ties_are_exact() {
    assert!(le_scaled(2, 8, 0.25));
    assert!(!le_scaled(3, 8, 0.25));
    assert!(le_scaled(0, 5, 0.0));
    assert!(!le_scaled(1, 5, 0.0));
    assert!(!le_scaled(0, 1, f64::NAN));
    assert!(le_scaled(u128::MAX, 1, f64::INFINITY));
    // 0.1 is slightly above 1/10 in binary
    assert!(le_scaled(1, 10, 0.1));
    assert!(le_scaled(1u128 << 100, 1u128 << 90, 1024.0));
    assert!(!le_scaled((1u128 << 100) + 1, 1u128 << 90, 1024.0));
    assert!(le_scaled(1, 1u128 << 60, f64::MIN_POSITIVE.max(1.0 / (1u64 << 60) as f64)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn le_scaled_agrees_with_floats_off_ties(m in 0u64..1u64 << 40, q in 1u64..1u64 << 40, x in 0.0f64..4.0) {
        let (mf, rhs) = (m as f64, x * q as f64);
        prop_assume!((mf - rhs).abs() > 1e-6 * rhs.max(1.0));
        prop_assert_eq!(le_scaled(m as u128, q as u128, x), mf <= rhs);
    }

    #[test]
    fn resonance_predicates_are_symmetric(
        ia in 0i64..97, ib in 0i64..89, pa in 1i64..10_000, pb in 1i64..10_000, d1 in 0.0f64..0.5, d2 in 0.0f64..1.0,
    ) {
        let a = Resonant { inv: ia, q: 97, uv: pa };
        let b = Resonant { inv: ib, q: 89, uv: pb };
        prop_assert_eq!(near_in_frac(&a, &b, d1), near_in_frac(&b, &a, d1));
        prop_assert_eq!(near_in_product(&a, &b, 4096, d2), near_in_product(&b, &a, 4096, d2));
    }

    #[test]
    fn resonance_count_is_monotone(seed in 0u64..1000, d1 in 0.0f64..0.3, d2 in 0.0f64..0.3, s1 in 1.0f64..2.0, s2 in 1.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set: Vec<Resonant> = (0..120)
            .map(|_| {
                let q = rng.gen_range(2..60i64);
                Resonant { inv: rng.gen_range(0..q), q, uv: rng.gen_range(256..1024) }
            })
            .collect();
        let small = resonance_count_b(&set, 1024, d1, d2).unwrap();
        let large = resonance_count_b(&set, 1024, d1 * s1, d2 * s2).unwrap();
        prop_assert!(small <= large);
        prop_assert_eq!(small, resonance_count_b_oracle(&set, 1024, d1, d2).unwrap());
    }
}

#[test]
fn count_extremes() {
    let sys = grid_system(0);
    let (band, members) = bands_with_members(&sys).swap_remove(0);
    let set = resonant(&members);
    let n = set.len() as u64;
    assert!(resonance_count_b(&set, band.uv(), 0.0, 0.0).unwrap() >= n);
    // every product lies in (UV/4, UV], every fraction distance is ≤ 1/2
    assert_eq!(resonance_count_b(&set, band.uv(), 0.5, 1.0).unwrap(), n * n);
}

#[test]
fn count_rejects_oversized_sets() {
    let set = vec![Resonant { inv: 0, q: 1, uv: 1 }; PAIR_BUDGET + 1];
    assert!(matches!(resonance_count_b(&set, 1, 0.1, 0.1), Err(Error::Budget { .. })));
}

#[test]
fn gk_bound_values() {
    assert_eq!(gk_bound(0.0, 0.0, 3.0, 5.0), 15.0);
    // 1·1·4·1 + 1·4·1 + 2 + 4 + 1
    assert_eq!(gk_bound(1.0, 1.0, 2.0, 1.0), 15.0);
    let base = gk_bound(0.1, 0.2, 64.0, 16.0);
    assert!(gk_bound(0.2, 0.2, 64.0, 16.0) > base && gk_bound(0.1, 0.4, 64.0, 16.0) > base);
}

#[test]
fn resonance_grid_against_counting_bound() {
    let grid = resonance_grid(1, 12, 9).unwrap();
    assert!(grid.len() >= 50, "grid has {} points", grid.len());
    let k_emp = grid.iter().map(|p| p.ratio).fold(0.0, f64::max);
    for p in &grid {
        assert!(p.ratio <= k_emp);
    }
    eprintln!("resonance grid: {} points, K_emp = {k_emp:.4}", grid.len());
    // the counting bound holds with unit constants on these systems
    assert!(k_emp <= 1.0, "K_emp = {k_emp}");
}

#[test]
fn resonance_count_matches_oracle_on_real_bands() {
    for i in 0..GRID_SYSTEMS.len() {
        let sys = grid_system(i);
        for (band, members) in bands_with_members(&sys) {
            let set = resonant(&members);
            for x in [band.x0(), (band.x0() * band.l as f64).sqrt(), band.l as f64] {
                let (d1, d2) = deltas_at(&band, x);
                assert_eq!(
                    resonance_count_b(&set, band.uv(), d1, d2).unwrap(),
                    resonance_count_b_oracle(&set, band.uv(), d1, d2).unwrap()
                );
            }
        }
    }
}

#[test]
fn pair_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..GRID_SYSTEMS.len() {
        let sys = grid_system(i);
        for (band, m) in bands_with_members(&sys) {
            let (mut w1, mut w2) = (0.0f64, 0.0f64);
            for _ in 0..100 {
                let a = rng.gen_range(0..m.len());
                let b = (a + rng.gen_range(1..m.len())) % m.len();
                let ell = rng.gen_range(band.l1 as f64..=band.l2 as f64);
                let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
                let (e1, e2) = pair_derivative_fd_errors(&m[a], &m[b], ell, sign);
                w1 = w1.max(e1);
                w2 = w2.max(e2);
            }
            assert!(w1 <= 1e-6 && w2 <= 1e-4, "band {:?}: {w1:.2e}, {w2:.2e}", band.region);
        }
    }
}

#[test]
fn single_phase_first_derivative_matches_difference_quotient() {
    let sys = grid_system(0);
    let (band, m) = bands_with_members(&sys).swap_remove(0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let d = &m[rng.gen_range(0..m.len())];
        let ell = rng.gen_range(band.l1 as f64..=band.l2 as f64);
        for sign in Sign::BOTH {
            let h = ell / 64.0;
            let f = |l: f64| g_jr(d, l, sign);
            let fd = (f(ell - 2.0 * h) - 8.0 * f(ell - h) + 8.0 * f(ell + h) - f(ell + 2.0 * h)) / (12.0 * h);
            let (first, second) = g_jr_derivatives(d, ell, sign);
            assert!((fd - first).abs() <= 1e-6 * first.abs(), "{fd} vs {first}");
            assert_eq!(second.signum(), sign.s());
        }
    }
}

#[test]
fn pair_with_itself_has_zero_derivatives() {
    let sys = grid_system(0);
    let (_, m) = bands_with_members(&sys).swap_remove(0);
    for sign in Sign::BOTH {
        let p = pair_phase_derivatives(&m[0], &m[0], 20.0, sign);
        assert_eq!((p.first, p.second), (0.0, 0.0));
    }
}

/// Each partial sum evaluated from scratch.
fn sigma_naive(di: &BlockPhaseData, dj: &BlockPhaseData, l1: u64, l2: u64, sign: Sign) -> f64 {
    (l1..=l2)
        .map(|start| {
            (start..=l2)
                .map(|l| {
                    let d = g_jr(di, l as f64, sign) - g_jr(dj, l as f64, sign);
                    Complex64::from_polar(1.0, TAU * d)
                })
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn exp_sum_sigma_cases() {
    let sys = grid_system(0);
    let (band, m) = bands_with_members(&sys).swap_remove(0);
    let (l1, l2) = (band.l1, band.l2);
    for sign in Sign::BOTH {
        assert!((exp_sum_sigma(&m[0], &m[1], l1, l1, sign).unwrap() - 1.0).abs() < 1e-12);
        assert!((exp_sum_sigma(&m[3], &m[3], l1, l2, sign).unwrap() - (l2 - l1 + 1) as f64).abs() < 1e-9);
        for (a, b) in [(0, 1), (2, 7), (5, m.len() - 1)] {
            let fast = exp_sum_sigma(&m[a], &m[b], l1, l2, sign).unwrap();
            let slow = sigma_naive(&m[a], &m[b], l1, l2, sign);
            assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");
        }
    }
    assert!(exp_sum_sigma(&m[0], &m[1], 0, 4, Sign::Plus).is_err());
    assert!(exp_sum_sigma(&m[0], &m[1], 5, 4, Sign::Plus).is_err());
}

#[test]
fn region_membership_follows_congruence() {
    let region = RegionR { u1: 1, u2: 60, v1: 1, v2: 40, c: 1, d: 2 };
    let mut brute = 0;
    for u in 1..=60i64 {
        for v in 1..=40i64 {
            let ok = gcd_i(u, v) == 1 && (2 * u + v) % 4 == 0;
            assert_eq!(region.contains(u, v), ok, "({u}, {v})");
            brute += ok as u64;
        }
    }
    assert_eq!(region.count(), brute);
    // d = 1 imposes only coprimality
    let free = RegionR { d: 1, c: 0, ..region };
    assert_eq!(
        free.count(),
        (1..=60i64).flat_map(|u| (1..=40i64).map(move |v| (u, v))).filter(|&(u, v)| gcd_i(u, v) == 1).count() as u64
    );
}

#[test]
fn band_members_lie_in_region() {
    let sys = grid_system(0);
    for (band, m) in bands_with_members(&sys) {
        assert!(!m.is_empty());
        for d in &m {
            assert!(band.region.contains(d.u, d.v));
            assert_eq!((d.c, d.d), (0, 1));
            assert_eq!((d.a as i128 * band.r as i128 * d.inv_ar as i128).rem_euclid(d.q as i128), 1 % d.q as i128);
        }
    }
}

#[test]
fn band_rejects_bad_ranges() {
    assert!(SieveBand::new(1e6, 1, (0, 1), (5, 4), (1, 2), (1, 2)).is_err());
    assert!(SieveBand::new(1e6, 0, (0, 1), (1, 4), (1, 2), (1, 2)).is_err());
    assert!(SieveBand::new(-1.0, 1, (0, 1), (1, 4), (1, 2), (1, 2)).is_err());
    let b = SieveBand::new(1e6, 1, (0, 1), (17, 32), (64, 127), (16, 31)).unwrap();
    assert_eq!((b.l, b.u, b.v), (32, 128, 32));
    assert_eq!(b.gk_parameters(), (64.0, 16.0));
}

/// B(Δ(X)) is a step function of X; a fine midpoint sum is its oracle.
#[test]
fn b_integral_matches_fine_riemann_sum() {
    let sys = grid_system(0);
    let (band, m) = bands_with_members(&sys).swap_remove(0);
    let set = resonant(&m);
    let (a, b) = (band.x0(), band.l as f64);
    let exact = b_integral(&set, &band, a, b).unwrap();
    let n = 4000;
    let h = (b - a) / n as f64;
    let riemann: f64 = (0..n)
        .map(|k| {
            let (d1, d2) = deltas_at(&band, a + (k as f64 + 0.5) * h);
            resonance_count_b(&set, band.uv(), d1, d2).unwrap() as f64 * h
        })
        .sum();
    assert!((exact - riemann).abs() <= 1e-3 * riemann, "{exact} vs {riemann}");
    assert_eq!(b_integral(&set, &band, b, a).unwrap(), 0.0);
}

#[test]
fn large_sieve_zero_weights() {
    let sys = grid_system(0);
    let (band, m) = bands_with_members(&sys).swap_remove(0);
    let n_ell = (band.l2 - band.l1 + 1) as usize;
    let zero = vec![Complex64::new(0.0, 0.0); m.len()];
    let rep = large_sieve_check(&m, &band, &zero, &unimodular_weights(n_ell, 1), Sign::Plus).unwrap();
    assert_eq!((rep.lhs, rep.ratio), (0.0, 0.0));
    assert!(large_sieve_check(&m, &band, &zero[1..], &unimodular_weights(n_ell, 1), Sign::Plus).is_err());
}

#[test]
fn large_sieve_random_weights() {
    for i in [0, 2] {
        let sys = grid_system(i);
        for (band, m) in bands_with_members(&sys) {
            let n_ell = (band.l2 - band.l1 + 1) as usize;
            for sign in Sign::BOTH {
                let rep =
                    large_sieve_check(&m, &band, &unimodular_weights(m.len(), 3), &unimodular_weights(n_ell, 4), sign)
                        .unwrap();
                eprintln!(
                    "large sieve t={} U={:?} {sign:?}: lhs={:.3e} rhs={:.3e} ratio={:.3e}",
                    band.t,
                    (band.region.u1, band.region.u2),
                    rep.lhs,
                    rep.rhs,
                    rep.ratio
                );
                assert!(rep.lhs > 0.0 && rep.rhs.is_finite());
                assert!(rep.ratio <= 1.0);
            }
        }
    }
}

#[test]
fn large_sieve_single_block_single_frequency() {
    let sys = grid_system(0);
    let (band, m) = bands_with_members(&sys).swap_remove(0);
    let one = SieveBand::new(
        band.t,
        1,
        (0, 1),
        (band.l2, band.l2),
        (band.region.u1, band.region.u2),
        (band.region.v1, band.region.v2),
    )
    .unwrap();
    let d = &m[0];
    let ell = band.l2 as f64;
    let rep = large_sieve_check(
        std::slice::from_ref(d),
        &one,
        &[Complex64::new(1.0, 0.0)],
        &[Complex64::new(1.0, 0.0)],
        Sign::Plus,
    )
    .unwrap();
    let w = d.omega(stationary_point(d, ell, Sign::Plus)) * amplitude_h(d, ell, Sign::Plus).unwrap();
    assert!((rep.lhs - w * w).abs() <= 1e-12 * w * w);
}

#[test]
fn zest_ratio_is_bounded_on_bands() {
    let sys = grid_system(0);
    for (band, m) in bands_with_members(&sys) {
        let mut worst = 0.0f64;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (a, b) = (rng.gen_range(0..m.len()), rng.gen_range(0..m.len()));
            let ell = rng.gen_range(band.l1 as f64..=band.l2 as f64);
            if let Some(z) = zest_ratio(&m[a], &m[b], &band, ell, Sign::Minus) {
                worst = worst.max(z);
            }
        }
        eprintln!("zest ratio U={:?}: max {worst:.3}", (band.region.u1, band.region.u2));
        assert!(worst.is_finite() && worst > 0.0);
    }
    let (band, m) = bands_with_members(&sys).swap_remove(0);
    assert!(zest_ratio(&m[0], &m[0], &band, 20.0, Sign::Plus).is_none());
}

#[test]
fn unimodular_weights_are_seeded() {
    let a = unimodular_weights(50, 8);
    assert_eq!(a, unimodular_weights(50, 8));
    assert_ne!(a, unimodular_weights(50, 9));
    assert!(a.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
}

#[test]
fn wide_arithmetic() {
    assert_eq!(mul_wide(1u128 << 127, 4), (2, 0));
    assert_eq!(mul_wide(u128::MAX, u128::MAX), (u128::MAX - 1, 1));
    assert_eq!(mul_wide(12345, 678), (0, 12345 * 678));
    assert_eq!(shl256((0, 1), 200), Some((1u128 << 72, 0)));
    assert_eq!(shl256((1, 0), 128), None);
    assert_eq!(shl256((0, 0), 1000), Some((0, 0)));
}
