//! Additive twists Σ λ(n) e(an/q) n^{−s} rewritten as finite combinations
//! of m^{−s} L(s, f^χ), one prime power of q at a time.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::arithforms::factor::{euler_phi, factorize, gcd, gcd_i, lcm, mod_inverse};
use crate::arithforms::{char_group, coeff_table, gauss_sum, DirichletCharacter, NewformSpec};
use crate::error::{Error, Result};
use crate::lfunction::divisor_tail;

/// Largest modulus accepted for a decomposition.
pub const MAX_TWIST_MODULUS: u64 = 100;

/// The registry form f^χ: f itself for principal χ, and for a CM form also
/// when χ induces its CM character.
pub fn twisted_form_resolve(spec: &NewformSpec, chi: &DirichletCharacter) -> Result<NewformSpec> {
    if chi.conductor() == 1 {
        return Ok(spec.clone());
    }
    if let Some(d) = spec.cm_discriminant {
        if chi.conductor() == d.unsigned_abs() && chi.matches_kronecker(d) {
            return Ok(spec.clone());
        }
    }
    Err(Error::UnsupportedTwist { form: spec.label.to_string(), modulus: chi.modulus(), index: chi.index() })
}

#[derive(Debug, Clone)]
pub struct TwistTerm {
    pub m: u64,
    /// Accumulated twisting character, lifted to modulus q.
    pub chi: DirichletCharacter,
    pub coeff: Complex64,
    pub form: NewformSpec,
}

#[derive(Debug, Clone)]
pub struct TwistDecomposition {
    pub form: NewformSpec,
    pub a: i64,
    pub q: u64,
    /// ∏_{p|q} p^{1+ord_p q}.
    pub q_star: u64,
    pub terms: Vec<TwistTerm>,
}

pub fn q_star(q: u64) -> u64 {
    factorize(q).0.iter().map(|&(p, e)| p.pow(e + 1)).product()
}

/// Coefficients of E_{g,p}(X) = 1 − λ_g(p)X + [p ∤ level]X².
fn euler_poly(g: &NewformSpec, p: u64) -> Result<[f64; 3]> {
    let t = coeff_table(g, p as usize)?;
    Ok([1.0, -t.lambda(p as usize), if g.level.is_multiple_of(p) { 0.0 } else { 1.0 }])
}

fn lambda_at(g: &NewformSpec, n: u64) -> Result<f64> {
    Ok(coeff_table(g, n as usize)?.lambda(n as usize))
}

pub fn additive_twist_decompose(spec: &NewformSpec, a: i64, q: u64) -> Result<TwistDecomposition> {
    if q == 0 || q > MAX_TWIST_MODULUS {
        return Err(Error::Invalid(format!("twist modulus {q} outside [1, {MAX_TWIST_MODULUS}]")));
    }
    if gcd_i(a, q as i64) != 1 {
        return Err(Error::NotCoprime(a, q as i64));
    }
    let a = a.rem_euclid(q as i64);
    let chars_q = char_group(q)?;
    let mut terms =
        vec![TwistTerm { m: 1, chi: chars_q[0].clone(), coeff: Complex64::new(1.0, 0.0), form: spec.clone() }];
    for &(p, e) in &factorize(q).0 {
        let pe = p.pow(e);
        let rest = q / pe;
        // partial-fraction numerator for the p-part
        let ap =
            (a as i128 * mod_inverse((rest % pe) as i64, pe as i64).unwrap_or(0) as i128).rem_euclid(pe as i128) as i64;
        let mut next: Vec<TwistTerm> = Vec::new();
        for t in &terms {
            let g = &t.form;
            let r = t.m;
            for k in 0..e {
                let lk = lambda_at(g, p.pow(k))?;
                if lk == 0.0 {
                    continue;
                }
                let modulus = p.pow(e - k);
                let phi = euler_phi(modulus) as f64;
                for chi in char_group(modulus)? {
                    let tau = gauss_sum(&chi.conj());
                    if tau.norm() < 1e-9 {
                        continue;
                    }
                    let h = twisted_form_resolve(g, &chi)?;
                    let val = chi.value((ap as i128 * r as i128).rem_euclid(modulus as i128) as i64);
                    let base = t.coeff * tau * val * (lk / phi);
                    let chi_q = t.chi.mul(&chi.lift(q)?)?;
                    for (i, &c) in euler_poly(&h, p)?.iter().enumerate() {
                        if c != 0.0 {
                            next.push(TwistTerm {
                                m: r * p.pow(k + i as u32),
                                chi: chi_q.clone(),
                                coeff: base * c,
                                form: h.clone(),
                            });
                        }
                    }
                }
            }
            // (r^{−s} − E_{g,p}(p^{−s}) Σ_k λ_g(p^k)(r p^k)^{−s}) L(s, g)
            next.push(TwistTerm { m: r, ..t.clone() });
            let eg = euler_poly(g, p)?;
            for k in 0..e {
                let lk = lambda_at(g, p.pow(k))?;
                for (i, &c) in eg.iter().enumerate() {
                    if c != 0.0 && lk != 0.0 {
                        next.push(TwistTerm { m: r * p.pow(k + i as u32), coeff: -t.coeff * c * lk, ..t.clone() });
                    }
                }
            }
        }
        terms = merge(next);
    }
    Ok(TwistDecomposition { form: spec.clone(), a, q, q_star: q_star(q), terms })
}

fn merge(terms: Vec<TwistTerm>) -> Vec<TwistTerm> {
    let mut map: BTreeMap<(u64, usize), TwistTerm> = BTreeMap::new();
    for t in terms {
        map.entry((t.m, t.chi.index())).and_modify(|u| u.coeff += t.coeff).or_insert(t);
    }
    map.into_values().filter(|t| t.coeff.norm() > 1e-13).collect()
}

impl TwistDecomposition {
    /// Whether every m divides gcd(lcm(Nq, q²)/cond(f^χ), q*).
    pub fn divisibility_holds(&self) -> bool {
        let n = self.form.level;
        let l = lcm(n * self.q, self.q * self.q);
        self.terms.iter().all(|t| {
            let c = t.form.level;
            l.is_multiple_of(c) && gcd(l / c, self.q_star).is_multiple_of(t.m)
        })
    }

    /// Σ_terms C·λ_{f^χ}(n/m)[m | n]; should equal λ_f(n) e(an/q).
    pub fn coefficient(&self, n: u64) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if n.is_multiple_of(t.m) {
                s += t.coeff * lambda_at(&t.form, n / t.m)?;
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistCheck {
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub residual: f64,
    /// Σ_{n>X} d(n) n^{−Re s}.
    pub tail_bound: f64,
}

/// Compares both sides truncated at n ≤ X, with the L-sums on the right cut
/// at X/m so that the same n appear on each side.
pub fn verify_twist_identity(d: &TwistDecomposition, s: Complex64, x: usize) -> Result<TwistCheck> {
    let table = coeff_table(&d.form, x)?;
    let q = d.q as i64;
    let mut lhs = Complex64::new(0.0, 0.0);
    for n in 1..=x {
        let l = table.lambda(n);
        if l != 0.0 {
            let th = (d.a as i128 * n as i128).rem_euclid(q as i128) as f64 / q as f64;
            let ph = std::f64::consts::TAU * th - s.im * (n as f64).ln();
            lhs += Complex64::from_polar(l * (n as f64).powf(-s.re), ph);
        }
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    for t in &d.terms {
        let tab = coeff_table(&t.form, x)?;
        let lim = x / t.m as usize;
        let mut part = Complex64::new(0.0, 0.0);
        for n in 1..=lim {
            let l = tab.lambda(n);
            if l != 0.0 {
                part += (-s * (n as f64).ln()).exp() * l;
            }
        }
        rhs += t.coeff * (-s * (t.m as f64).ln()).exp() * part;
    }
    Ok(TwistCheck {
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        residual: (lhs - rhs).norm(),
        tail_bound: divisor_tail(x as f64, s.re),
    })
}
