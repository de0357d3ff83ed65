use super::*;
use crate::arithforms::coeff_table;
use crate::arithforms::factor::gcd_i;
use crate::arithforms::registry::DELTA;
use proptest::prelude::*;

fn brute(q: i64, x1: f64, x2: f64) -> Vec<Rational> {
    let mut v = Vec::new();
    for d in 1..=q {
        let lo = (x1 * d as f64).ceil() as i64;
        let hi = (x2 * d as f64).floor() as i64;
        for n in lo..=hi {
            if gcd_i(n, d) == 1 {
                v.push(Rational::new(n, d));
            }
        }
    }
    v.sort();
    v
}

#[test]
fn farey_three() {
    let f = farey_in_interval(3.0, 0.0, 1.0).unwrap();
    let want: Vec<Rational> =
        [(0, 1), (1, 3), (1, 2), (2, 3), (1, 1)].iter().map(|&(a, b)| Rational::new(a, b)).collect();
    assert_eq!(f, want);
}

#[test]
fn farey_five_window() {
    let f = farey_in_interval(5.0, 0.3, 0.7).unwrap();
    assert_eq!(f, brute(5, 0.3, 0.7));
    let want: Vec<Rational> =
        [(1, 3), (2, 5), (1, 2), (3, 5), (2, 3)].iter().map(|&(a, b)| Rational::new(a, b)).collect();
    assert_eq!(f, want);
}

#[test]
fn neighbour_determinant() {
    let f = farey_in_interval(7.0, 0.0, 1.0).unwrap();
    for w in f.windows(2) {
        assert_eq!(w[1].num() * w[0].den() - w[0].num() * w[1].den(), 1);
    }
}

proptest! {
    #[test]
    fn farey_matches_double_loop(q in 1i64..40, x1 in -20.0f64..20.0, len in 0.001f64..3.0) {
        let x2 = x1 + len;
        prop_assert_eq!(farey_in_interval(q as f64 + 0.5, x1, x2).unwrap(), brute(q, x1, x2));
    }

    #[test]
    fn farey_count_bound(q in 1i64..60, x1 in -5.0f64..5.0, len in 0.0001f64..0.5) {
        let n = farey_in_interval(q as f64, x1, x1 + len).unwrap().len() as f64;
        prop_assert!(n <= len * (q * q) as f64 + 1.0);
    }

    #[test]
    fn good_bad_roundtrip(u in 1i64..100_000, v in 1i64..5000, level in 1u64..200) {
        prop_assume!(gcd_i(u, v) == 1);
        let g = good_bad_decompose(u, v, level).unwrap();
        prop_assert_eq!(g.recombine(), Rational::new(-u, v));
        prop_assert_eq!(g.q * g.d, v);
        prop_assert!(g.c >= 0 && g.c < g.d.max(1));
        prop_assert_eq!(gcd_i(g.q, g.d), 1);
        prop_assert_eq!(gcd_i(g.a, g.q), 1);
        prop_assert_eq!(gcd_i(g.c, g.d), 1);
        prop_assert_eq!((g.d as i128 * u as i128 + g.c as i128 * v as i128).rem_euclid((g.d * g.d) as i128), 0);
        let fq = factorize(g.q as u64);
        let fnn = factorize(level);
        for (p, e) in fq.0 {
            prop_assert!(e >= fnn.ord(p));
        }
        // β lies in B(N♭)
        let flat: u64 = fnn.0.iter().map(|&(p, e)| p.pow(e - 1)).product();
        prop_assert_eq!(flat % g.d as u64, 0);
    }
}

#[test]
fn good_bad_examples() {
    let g = good_bad_decompose(1, 6, 9).unwrap();
    assert_eq!((g.d, g.q, g.c, g.a), (3, 2, 1, 1));
    for v in 1..60 {
        let g = good_bad_decompose(1, v, 11).unwrap();
        assert_eq!((g.d, g.c, g.a, g.q), (1, 0, 1, v));
    }
}

#[test]
fn omega_shape() {
    let h = 10.0;
    assert_eq!(omega(0.0, h, 6), 0.5);
    assert_eq!(omega(h, h, 6), 1.0);
    assert_eq!(omega(-h, h, 6), 0.0);
    assert!((omega(h - 1e-12, h, 6) - 1.0).abs() < 1e-12);
    for i in -100..=100 {
        let x = i as f64 * 0.1;
        assert!((omega(x, h, 6) + omega(-x, h, 6) - 1.0).abs() < 1e-15);
    }
}

fn systems() -> Vec<FareySystem> {
    let mut out = Vec::new();
    for &(t, m, m0) in &[(1e3, 100u64, 100u64), (1e4, 464, 100), (1e4, 2000, 200), (1e5, 2154, 2154), (1e5, 8000, 500)]
    {
        out.push(build_farey_system(FareyParams::dyadic(t, m, m0).unwrap()).unwrap());
    }
    out
}

#[test]
fn mediant_distances() {
    for sys in systems() {
        for j in 0..sys.len().saturating_sub(1) {
            let (n, d) = sys.rho[j];
            let rho = Rational::new(-n, d);
            let diff = rho - sys.alpha(j + 1);
            assert_eq!(diff.num().abs(), 1);
            assert_eq!(diff.den(), sys.v[j] * (sys.v[j] + sys.v[j + 1]));
        }
    }
    assert_eq!((1 + 1, 3 + 2), (2, 5));
}

#[test]
fn system_invariants() {
    for sys in systems() {
        let p = sys.params;
        assert!(p.m1 < sys.breaks[0] as u64);
        assert!((*sys.breaks.last().unwrap() as u64) < p.m2);
        assert!(sys.breaks.windows(2).all(|w| w[0] < w[1]));
        let (x1, x2) = p.interval();
        for j in 1..=sys.len() {
            let a = sys.alpha(j).to_f64();
            assert!(a >= x1 && a <= x2);
            assert!(sys.v[j - 1] as f64 <= p.r);
        }
        let (c1, c2) = spacing_band(&sys);
        assert!(c1 >= 1.0 / 64.0 && c2 <= 64.0, "{c1} {c2}");
    }
}

#[test]
fn small_system_at_r_one() {
    let sys = build_farey_system(FareyParams::dyadic(1e5, 2154, 2154).unwrap()).unwrap();
    assert!(sys.v.iter().all(|&v| v == 1));
    assert_eq!(sys.len(), 4);
}

#[test]
fn partition_of_unity() {
    for sys in systems() {
        let p = sys.params;
        for n in 0..=(p.m2 + 10) {
            let s = omega_total(&sys, n as f64);
            if n < p.m1 + 1 || n >= p.m2 {
                assert_eq!(s, 0.0, "n={n}");
            } else if n >= p.m1 + 2 * p.h && n <= p.m2 - 2 * p.h {
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        for j in 1..=sys.len() {
            let (a, b) = sys.support(j);
            for i in 0..2000 {
                let x = a as f64 - 5.0 + (b - a + 10) as f64 * i as f64 / 2000.0;
                let w = omega_j(&sys, j, x);
                assert!((-1e-15..=1.0 + 1e-15).contains(&w));
                if x < a as f64 || x > b as f64 {
                    assert_eq!(w, 0.0);
                }
            }
        }
    }
}

#[test]
fn block_weight_modulus() {
    let sys = &systems()[2];
    for j in 1..=sys.len() {
        let (a, b) = sys.support(j);
        for x in [a as f64 + 0.3, (a + b) as f64 / 2.0, b as f64 - 0.7, b as f64 + 3.0] {
            assert!((block_weight_f(sys, j, x).norm() - omega_j(sys, j, x)).abs() < 1e-14);
        }
    }
}

#[test]
fn decomposition_identity() {
    let table = coeff_table(&DELTA, 40_000).unwrap();
    let sys = build_farey_system(FareyParams::new(1e4, 400, 100, 400, 760, 6).unwrap()).unwrap();
    let r = block_decomposition_check(&table, &sys).unwrap();
    assert!(r.residual < 1e-9, "{r:?}");
    for sys in systems() {
        let r = block_decomposition_check(&table, &sys).unwrap();
        assert!(r.residual < 1e-9);
    }
}

#[test]
fn degenerate_intervals() {
    let p = FareyParams::new(1e5, 100, 100, 100, 150, 6).unwrap();
    assert!(matches!(build_farey_system(p), Err(Error::DegenerateInterval(_))));
    assert!(FareyParams::new(1e4, 100, 100, 100, 200, 7).is_err());
}

#[test]
fn derivative_ratios_bounded() {
    let sys = &systems()[2];
    let mut firsts = Vec::new();
    for j in 1..=sys.len() {
        let r = derivative_decay_diagnostic(sys, j, 12, 2).unwrap();
        assert!(r[0] <= 1.0 + 1e-12);
        firsts.push(r[1]);
        assert!(r[2].is_finite());
    }
    let m = firsts.iter().cloned().fold(0.0, f64::max);
    assert!(m < 10.0, "{firsts:?}");
}
