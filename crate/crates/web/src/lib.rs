//! wasm-bindgen surface for the demo page. Each export takes plain numbers
//! and returns a JSON string, or throws a string on bad input.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use jutila::arithforms::lookup;
use jutila::farey::{build_farey_system, FareyParams};
use jutila::lfunction::{determine_root_number, lvalue_critical};
use jutila::sieve::{band_members, gk_bound, resonance_count_b, Resonant, SieveBand};
use jutila::voronoi::{voronoi_check, Bump, VoronoiParams};

fn to_js<T: Serialize>(r: jutila::Result<T>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("serialisable")).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[derive(Serialize)]
struct LValue {
    form: String,
    t: f64,
    re: f64,
    im: f64,
    abs: f64,
    root_number: f64,
    terms: usize,
}

/// L(1/2 + it) for a built-in form.
#[wasm_bindgen]
pub fn l_value(form: &str, t: f64) -> Result<String, JsValue> {
    to_js(lvalue_impl(form, t))
}

fn lvalue_impl(form: &str, t: f64) -> jutila::Result<LValue> {
    let spec = lookup(form)?;
    let r = lvalue_critical(&spec, t)?;
    Ok(LValue {
        form: spec.label.to_string(),
        t,
        re: r.re,
        im: r.im,
        abs: r.value().norm(),
        root_number: determine_root_number(&spec)?,
        terms: r.truncation,
    })
}

#[derive(Serialize)]
struct VoronoiSides {
    lhs_re: f64,
    lhs_im: f64,
    rhs_re: f64,
    rhs_im: f64,
    rel_err: f64,
    dual_terms: usize,
}

/// Both sides of the Voronoi formula for a bump on [lo, hi] twisted by e(an/q).
#[wasm_bindgen]
pub fn voronoi(form: &str, a: i32, q: u32, lo: f64, hi: f64) -> Result<String, JsValue> {
    to_js(voronoi_impl(form, a as i64, q as u64, lo, hi))
}

fn voronoi_impl(form: &str, a: i64, q: u64, lo: f64, hi: f64) -> jutila::Result<VoronoiSides> {
    if hi > 20_000.0 {
        return Err(jutila::Error::Invalid(format!("support end {hi} too large for the page (≤ 20000)")));
    }
    let f = Bump::with_edges(lo, hi, 0.25)?;
    let c = voronoi_check(&lookup(form)?, a, q, &f, &VoronoiParams::default())?;
    Ok(VoronoiSides {
        lhs_re: c.lhs_re,
        lhs_im: c.lhs_im,
        rhs_re: c.rhs.re,
        rhs_im: c.rhs.im,
        rel_err: c.rel_err,
        dual_terms: c.rhs.l_trunc,
    })
}

#[derive(Serialize)]
struct Resonance {
    fractions: usize,
    members: usize,
    count_b: u64,
    gk_bound: f64,
    ratio: f64,
}

/// Resonance count on the dyadic band L, U, V of the Farey system (t, M, M0).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn resonance(t: f64, m: u32, m0: u32, l: u32, u: u32, v: u32, delta1: f64, delta2: f64) -> Result<String, JsValue> {
    to_js(resonance_impl(t, m as u64, m0 as u64, [l, u, v].map(|x| x as u64), delta1, delta2))
}

fn resonance_impl(t: f64, m: u64, m0: u64, [l, u, v]: [u64; 3], delta1: f64, delta2: f64) -> jutila::Result<Resonance> {
    if [l, u, v].iter().any(|&x| x < 2 || !x.is_power_of_two()) {
        return Err(jutila::Error::Invalid("L, U, V must be powers of two ≥ 2".into()));
    }
    let sys = build_farey_system(FareyParams::dyadic(t, m, m0)?)?;
    let band =
        SieveBand::new(t, 1, (0, 1), (l / 2 + 1, l), ((u / 2) as i64, u as i64 - 1), ((v / 2) as i64, v as i64 - 1))?;
    let members = band_members(&sys, &band, 1, 12)?;
    let set: Vec<Resonant> = members.iter().map(Resonant::from).collect();
    let count_b = resonance_count_b(&set, band.uv(), delta1, delta2)?;
    let (a, c) = band.gk_parameters();
    let gk = gk_bound(delta1, delta2, a, c);
    Ok(Resonance { fractions: sys.len(), members: members.len(), count_b, gk_bound: gk, ratio: count_b as f64 / gk })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_value_at_zero_is_real() {
        let v = lvalue_impl("1.12.a", 0.0).unwrap();
        assert!(v.im.abs() < 1e-10 && v.re > 0.0);
        assert_eq!(v.root_number, 1.0);
        assert!(lvalue_impl("3.3.x", 0.0).is_err());
    }

    #[test]
    fn voronoi_sides_agree() {
        let v = voronoi_impl("1.12.a", 1, 3, 500.0, 900.0).unwrap();
        assert!(v.rel_err < 1e-5);
        assert!(voronoi_impl("1.12.a", 1, 3, 500.0, 50_000.0).is_err());
    }

    #[test]
    fn resonance_defaults() {
        let r = resonance_impl(1e6, 20_000, 20, [32, 128, 32], 0.1, 0.05).unwrap();
        assert!(r.members > 0 && r.count_b >= r.members as u64);
        assert!(r.ratio < 1.0);
        assert!(resonance_impl(1e6, 20_000, 20, [30, 128, 32], 0.1, 0.05).is_err());
    }
}
