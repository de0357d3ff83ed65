//! Fourier coefficients of eta quotients and their Hecke extension.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::characters::DirichletCharacter;
use super::factor::spf_sieve;
use super::ntt::ModSeries;
use super::registry::NewformSpec;
use crate::error::{Error, Result};

pub const MAX_LIMIT: usize = 100_000_000;

/// Raw integer coefficients a(n) and normalized λ(n) = a(n)/n^{(k-1)/2}
/// for 1 ≤ n ≤ limit. Index 0 is unused and holds zero.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub label: &'static str,
    pub level: u64,
    pub weight: u32,
    pub limit: usize,
    pub raw: Vec<i128>,
    pub lambda: Vec<f64>,
}

impl CoeffTable {
    fn from_raw(spec_label: &'static str, level: u64, weight: u32, raw: Vec<i128>) -> Self {
        let half = (weight as f64 - 1.0) / 2.0;
        let lambda =
            raw.iter().enumerate().map(|(n, &a)| if n == 0 { 0.0 } else { a as f64 / (n as f64).powf(half) }).collect();
        CoeffTable { label: spec_label, level, weight, limit: raw.len() - 1, raw, lambda }
    }

    pub fn a(&self, n: usize) -> i128 {
        self.raw[n]
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    pub fn require(&self, need: usize) -> Result<()> {
        if need > self.limit {
            Err(Error::TableTooShort { need, have: self.limit })
        } else {
            Ok(())
        }
    }
}

// Σ_m (-1)^m (2m+1) q^{m(m+1)/2} = ∏(1-q^n)^3, dilated by d
fn jacobi_sparse(len: usize, d: usize) -> Vec<(usize, i128)> {
    let mut out = Vec::new();
    let mut m = 0usize;
    loop {
        let k = m * (m + 1) / 2 * d;
        if k >= len {
            break;
        }
        let c = (2 * m + 1) as i128;
        out.push((k, if m.is_multiple_of(2) { c } else { -c }));
        m += 1;
    }
    out
}

// Euler's pentagonal series ∏(1-q^n), dilated by d
fn pentagonal_sparse(len: usize, d: usize) -> Vec<(usize, i128)> {
    let mut out = vec![(0usize, 1i128)];
    let mut m = 1usize;
    loop {
        let k1 = m * (3 * m - 1) / 2 * d;
        if k1 >= len {
            break;
        }
        let s = if m.is_multiple_of(2) { 1 } else { -1 };
        out.push((k1, s));
        let k2 = m * (3 * m + 1) / 2 * d;
        if k2 < len {
            out.push((k2, s));
        }
        m += 1;
    }
    out.sort_unstable();
    out
}

fn mul_sparse(series: &mut [i128], sparse: &[(usize, i128)]) -> Result<()> {
    debug_assert_eq!(sparse[0], (0, 1));
    for n in (0..series.len()).rev() {
        let mut acc = series[n];
        for &(k, c) in &sparse[1..] {
            if k > n {
                break;
            }
            let term = c.checked_mul(series[n - k]).ok_or(Error::Overflow("eta expansion"))?;
            acc = acc.checked_add(term).ok_or(Error::Overflow("eta expansion"))?;
        }
        series[n] = acc;
    }
    Ok(())
}

fn div_sparse(series: &mut [i128], sparse: &[(usize, i128)]) -> Result<()> {
    for n in 0..series.len() {
        let mut acc = series[n];
        for &(k, c) in &sparse[1..] {
            if k > n {
                break;
            }
            let term = c.checked_mul(series[n - k]).ok_or(Error::Overflow("eta expansion"))?;
            acc = acc.checked_sub(term).ok_or(Error::Overflow("eta expansion"))?;
        }
        series[n] = acc;
    }
    Ok(())
}

/// Expand the eta quotient of `spec` to `x` coefficients by exact sparse
/// multiplication with the pentagonal and Jacobi series.
pub fn eta_coeffs(spec: &NewformSpec, x: usize) -> Result<CoeffTable> {
    if x == 0 || x > MAX_LIMIT {
        return Err(Error::Invalid(format!("coefficient limit {x} outside [1, {MAX_LIMIT}]")));
    }
    let total: i64 = spec.eta.iter().map(|&(_, e)| e as i64).sum();
    if total != 2 * spec.weight as i64 {
        return Err(Error::Invalid(format!("eta exponents sum to {total}, expected 2k = {}", 2 * spec.weight)));
    }
    let shift = spec.q_shift();
    if shift < 1 {
        return Err(Error::Invalid("eta quotient is not a cusp form".into()));
    }
    let shift = shift as usize;
    let len = x.saturating_sub(shift) + 1;
    if len > SPARSE_LIMIT && spec.eta.iter().all(|&(_, e)| e > 0) {
        return eta_coeffs_ntt(spec, x);
    }
    let mut series = vec![0i128; len];
    series[0] = 1;
    for &(d, e) in spec.eta {
        let d = d as usize;
        let (cubes, ones) = (e.unsigned_abs() / 3, e.unsigned_abs() % 3);
        if e > 0 {
            let j = jacobi_sparse(len, d);
            let p = pentagonal_sparse(len, d);
            for _ in 0..cubes {
                mul_sparse(&mut series, &j)?;
            }
            for _ in 0..ones {
                mul_sparse(&mut series, &p)?;
            }
        } else {
            let p = pentagonal_sparse(len, d);
            for _ in 0..e.unsigned_abs() {
                div_sparse(&mut series, &p)?;
            }
        }
    }
    let mut raw = vec![0i128; x + 1];
    for n in shift..=x {
        raw[n] = series[n - shift];
    }
    Ok(CoeffTable::from_raw(spec.label, spec.level, spec.weight, raw))
}

// Above this length the transform path is faster than sparse multiplication.
const SPARSE_LIMIT: usize = 1 << 15;

/// Same expansion computed with multi-modular transforms; used for long tables.
pub fn eta_coeffs_ntt(spec: &NewformSpec, x: usize) -> Result<CoeffTable> {
    let shift = spec.q_shift() as usize;
    let len = x.saturating_sub(shift) + 1;
    let mut acc: Option<ModSeries> = None;
    let mut times = |f: ModSeries| {
        acc = Some(match acc.take() {
            None => f,
            Some(a) => a.mul(&f),
        })
    };
    for &(d, e) in spec.eta {
        if e <= 0 {
            return Err(Error::Invalid("transform path needs positive eta exponents".into()));
        }
        let d = d as usize;
        let (cubes, ones) = (e as u32 / 3, e as u32 % 3);
        if cubes > 0 {
            times(ModSeries::from_sparse(len, &jacobi_sparse(len, d)).pow(cubes));
        }
        if ones > 0 {
            times(ModSeries::from_sparse(len, &pentagonal_sparse(len, d)).pow(ones));
        }
    }
    let series = acc.unwrap_or_else(|| ModSeries::one(len)).to_i128()?;
    let mut raw = vec![0i128; x + 1];
    raw[shift..=x].copy_from_slice(&series[..len]);
    Ok(CoeffTable::from_raw(spec.label, spec.level, spec.weight, raw))
}

/// Extend prime coefficients multiplicatively via
/// a(p^{r+1}) = a(p)a(p^r) − ξ(p)p^{k−1}a(p^{r−1}).
pub fn hecke_extend(
    prime_coeffs: &BTreeMap<u64, i128>,
    xi: &DirichletCharacter,
    weight: u32,
    x: usize,
) -> Result<CoeffTable> {
    let spf = spf_sieve(x);
    let mut raw = vec![0i128; x + 1];
    if x >= 1 {
        raw[1] = 1;
    }
    let ovf = || Error::Overflow("hecke extension");
    for n in 2..=x {
        let p = spf[n] as usize;
        let mut m = n;
        let mut r = 0u32;
        while m % p == 0 {
            m /= p;
            r += 1;
        }
        if m > 1 {
            raw[n] = raw[n / m].checked_mul(raw[m]).ok_or_else(ovf)?;
            continue;
        }
        let ap = *prime_coeffs.get(&(p as u64)).ok_or_else(|| Error::Invalid(format!("missing a({p})")))?;
        if r == 1 {
            raw[n] = ap;
            continue;
        }
        let xv = xi.value(p as i64);
        if xv.im.abs() > 1e-12 {
            return Err(Error::Invalid("hecke_extend needs a real nebentypus".into()));
        }
        let xp = xv.re.round() as i128;
        let pk = (p as i128).checked_pow(weight - 1).ok_or_else(ovf)?;
        let prev = raw[n / p];
        let prev2 = raw[n / p / p];
        let t1 = ap.checked_mul(prev).ok_or_else(ovf)?;
        let t2 = xp.checked_mul(pk).and_then(|v| v.checked_mul(prev2)).ok_or_else(ovf)?;
        raw[n] = t1.checked_sub(t2).ok_or_else(ovf)?;
    }
    Ok(CoeffTable::from_raw("hecke", xi.modulus(), weight, raw))
}

type Cache = Mutex<HashMap<&'static str, Arc<CoeffTable>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared table with at least `x` coefficients; grows the cached table when needed.
pub fn coeff_table(spec: &NewformSpec, x: usize) -> Result<Arc<CoeffTable>> {
    let mut guard = cache().lock().expect("coefficient cache poisoned");
    if let Some(t) = guard.get(spec.label) {
        if t.limit >= x {
            return Ok(t.clone());
        }
    }
    let want = x.max(guard.get(spec.label).map_or(0, |t| t.limit * 2)).max(1024);
    let t = Arc::new(eta_coeffs(spec, want)?);
    guard.insert(spec.label, t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::registry::{BUILTINS, DELTA, ETA2_12, ETA3_8};
    use super::*;
    use crate::arithforms::factor::{gcd, primes_up_to};

    // brute-force product of (1 - q^{dn})^e with dense multiplication
    fn brute(spec: &NewformSpec, x: usize) -> Vec<i128> {
        let shift = spec.q_shift() as usize;
        let len = x - shift + 1;
        let mut s = vec![0i128; len];
        s[0] = 1;
        for &(d, e) in spec.eta {
            for _ in 0..e {
                let mut n = d as usize;
                while n < len {
                    for i in (n..len).rev() {
                        s[i] -= s[i - n];
                    }
                    n += d as usize;
                }
            }
        }
        let mut raw = vec![0; x + 1];
        raw[shift..=x].copy_from_slice(&s[..(x - shift + 1)]);
        raw
    }

    #[test]
    fn delta_values() {
        let t = eta_coeffs(&DELTA, 10).unwrap();
        assert_eq!(&t.raw[1..=6], &[1, -24, 252, -1472, 4830, -6048]);
        assert!((t.lambda(2) + 0.530330).abs() < 1e-6);
    }

    #[test]
    fn matches_brute_force() {
        for f in BUILTINS.iter() {
            assert_eq!(eta_coeffs(f, 400).unwrap().raw, brute(f, 400), "{}", f.label);
        }
    }

    #[test]
    fn eta2_12_odd_support() {
        let t = eta_coeffs(&ETA2_12, 20_000).unwrap();
        assert!((2..=20_000).step_by(2).all(|n| t.a(n) == 0));
        assert_eq!(t.a(3), -12);
    }

    #[test]
    fn weight_check() {
        let bad = NewformSpec { weight: 10, ..DELTA };
        assert!(eta_coeffs(&bad, 10).is_err());
    }

    #[test]
    fn hecke_agrees_with_expansion() {
        let x = 100_000;
        for f in BUILTINS.iter() {
            let t = eta_coeffs(f, x).unwrap();
            let primes: BTreeMap<u64, i128> = primes_up_to(x).into_iter().map(|p| (p, t.a(p as usize))).collect();
            let h = hecke_extend(&primes, &f.nebentypus(), f.weight, x).unwrap();
            assert_eq!(h.raw, t.raw, "{}", f.label);
        }
        let t = eta_coeffs(&DELTA, 10).unwrap();
        assert_eq!(t.a(4), (-24i128).pow(2) - 2048);
        assert_eq!(t.a(6), t.a(2) * t.a(3));
    }

    #[test]
    fn deligne_bound() {
        for f in BUILTINS.iter() {
            let t = eta_coeffs(f, 10_000).unwrap();
            for p in primes_up_to(10_000) {
                if f.level % p != 0 {
                    assert!(t.lambda(p as usize).abs() <= 2.0 + 1e-12, "{} p={p}", f.label);
                }
            }
        }
    }

    #[test]
    fn cm_vanishing() {
        let t = eta_coeffs(&ETA3_8, 10_000).unwrap();
        for n in 1..=10_000usize {
            if gcd(n as u64, 3) == 1 && crate::arithforms::characters::kronecker(-3, n as i64) == -1 {
                assert_eq!(t.a(n), 0);
            }
        }
    }

    #[test]
    fn transform_path_matches_sparse() {
        for spec in BUILTINS.iter() {
            let a = eta_coeffs(spec, 20_000).unwrap();
            let b = eta_coeffs_ntt(spec, 20_000).unwrap();
            assert_eq!(a.raw, b.raw, "{}", spec.label);
        }
    }

    #[test]
    fn missing_prime() {
        let m = BTreeMap::from([(2u64, -24i128)]);
        assert!(hecke_extend(&m, &DELTA.nebentypus(), 12, 10).is_err());
    }
}
