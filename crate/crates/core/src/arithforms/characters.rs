//! Dirichlet characters built from prime-power components.
//!
//! Values are kept as exact angles `θ ∈ Q/Z` so that χ(n) = e(θ(n)).
//! Complex values are rendered on demand.

use std::sync::Arc;

use num_complex::Complex64;

use super::factor::{factorize, gcd, Factorization};
use super::rational::Rational;
use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1_000_000;

#[derive(Debug)]
struct Generator {
    residue: u64,
    order: u64,
}

/// One prime-power factor of (Z/q)^* together with discrete-log tables.
#[derive(Debug)]
struct Component {
    p: u64,
    e: u32,
    m: u64,
    gens: Vec<Generator>,
    // dlog[n mod m] = exponents on `gens`, empty entry for non-units
    dlog: Vec<Option<Vec<u64>>>,
}

#[derive(Debug)]
struct Group {
    q: u64,
    comps: Vec<Component>,
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = factorize(p - 1);
    (2..p).find(|&g| phi.primes().all(|r| pow_mod(g, (p - 1) / r, p) != 1)).expect("primitive root exists")
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut r, mut b) = (1 % m, b % m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl Component {
    fn new(p: u64, e: u32) -> Component {
        let m = p.pow(e);
        let gens = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![Generator { residue: 3, order: 2 }],
                _ => vec![Generator { residue: m - 1, order: 2 }, Generator { residue: 5, order: m / 4 }],
            }
        } else {
            let mut g = primitive_root(p);
            if e > 1 && pow_mod(g, p - 1, p * p) == 1 {
                g += p;
            }
            vec![Generator { residue: g, order: m / p * (p - 1) }]
        };
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; m as usize];
        // enumerate the product of cyclic factors
        let mut idx = vec![0u64; gens.len()];
        loop {
            let mut val = 1 % m;
            for (g, &k) in gens.iter().zip(&idx) {
                val = val * pow_mod(g.residue, k, m) % m;
            }
            dlog[val as usize] = Some(idx.clone());
            let mut i = 0;
            loop {
                if i == gens.len() {
                    break;
                }
                idx[i] += 1;
                if idx[i] < gens[i].order {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == gens.len() {
                break;
            }
        }
        Component { p, e, m, gens, dlog }
    }
}

/// A Dirichlet character modulo `q`, stored as exponents on the generators
/// of each prime-power component.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<Group>,
    exps: Vec<Vec<u64>>,
    index: usize,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.group.q == o.group.q && self.exps == o.exps
    }
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    /// Position inside `char_group(q)`; 0 is the principal character.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().flatten().all(|&x| x == 0)
    }

    /// Exact angle θ(n) in [0,1) with χ(n) = e(θ), or `None` if gcd(n, q) > 1.
    pub fn angle(&self, n: i64) -> Option<Rational> {
        let mut th = Rational::zero();
        for (c, ex) in self.group.comps.iter().zip(&self.exps) {
            let r = n.rem_euclid(c.m as i64) as usize;
            let logs = c.dlog[r].as_ref()?;
            for ((g, &x), &l) in c.gens.iter().zip(ex).zip(logs) {
                th = (th + Rational::new(((x * l) % g.order) as i64, g.order as i64)).frac();
            }
        }
        Some(th)
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.angle(n) {
            None => Complex64::new(0.0, 0.0),
            Some(th) => unit(th),
        }
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        let mut o = 1u64;
        for (c, ex) in self.group.comps.iter().zip(&self.exps) {
            for (g, &x) in c.gens.iter().zip(ex) {
                let k = g.order / gcd(x, g.order);
                o = o / gcd(o, k) * k;
            }
        }
        o
    }

    pub fn conductor(&self) -> u64 {
        let mut f = 1u64;
        for (c, ex) in self.group.comps.iter().zip(&self.exps) {
            f *= component_conductor(c, ex);
        }
        f
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    pub fn conj(&self) -> DirichletCharacter {
        let exps: Vec<Vec<u64>> = self
            .group
            .comps
            .iter()
            .zip(&self.exps)
            .map(|(c, ex)| c.gens.iter().zip(ex).map(|(g, &x)| (g.order - x) % g.order).collect())
            .collect();
        let index = flat_index(&self.group, &exps);
        DirichletCharacter { group: self.group.clone(), exps, index }
    }

    /// Pointwise product of two characters with the same modulus.
    pub fn mul(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if self.modulus() != other.modulus() {
            return Err(Error::Invalid(format!(
                "character product needs equal moduli ({} vs {})",
                self.modulus(),
                other.modulus()
            )));
        }
        let exps: Vec<Vec<u64>> = self
            .group
            .comps
            .iter()
            .zip(self.exps.iter().zip(&other.exps))
            .map(|(c, (a, b))| c.gens.iter().zip(a.iter().zip(b)).map(|(g, (x, y))| (x + y) % g.order).collect())
            .collect();
        let index = flat_index(&self.group, &exps);
        Ok(DirichletCharacter { group: self.group.clone(), exps, index })
    }

    /// The character modulo a multiple `q` of the modulus induced by this one.
    pub fn lift(&self, q: u64) -> Result<DirichletCharacter> {
        if !q.is_multiple_of(self.modulus()) {
            return Err(Error::Invalid(format!("{q} is not a multiple of {}", self.modulus())));
        }
        char_group(q)?
            .into_iter()
            .find(|c| (1..=q as i64).all(|n| c.angle(n).is_none_or(|a| Some(a) == self.angle(n))))
            .ok_or_else(|| Error::Invalid("no induced character".into()))
    }

    /// Whether this character agrees with `other` on all integers coprime to both moduli.
    pub fn induces_same(&self, other: &DirichletCharacter) -> bool {
        let l = self.modulus() / gcd(self.modulus(), other.modulus()) * other.modulus();
        (1..=l as i64).all(|n| match (self.angle(n), other.angle(n)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
    }

    /// Whether χ is the Kronecker symbol (D/·) on integers coprime to q.
    pub fn matches_kronecker(&self, d: i64) -> bool {
        (1..=(self.modulus() as i64 * d.unsigned_abs() as i64)).all(|n| match self.angle(n) {
            None => true,
            Some(th) => {
                let k = kronecker(d, n);
                k == 0 || (k == 1) == th.is_zero()
            }
        })
    }
}

fn component_conductor(c: &Component, ex: &[u64]) -> u64 {
    if ex.iter().all(|&x| x == 0) {
        return 1;
    }
    if c.p == 2 {
        // generators are (-1, 5) for e >= 3 and (-1) for e = 2
        if c.e == 2 {
            return 4;
        }
        let (a, b) = (ex[0], ex[1]);
        if b == 0 {
            return if a == 0 { 1 } else { 4 };
        }
        let ord5 = c.gens[1].order / gcd(b, c.gens[1].order);
        return 4 * ord5;
    }
    let g = &c.gens[0];
    let o = g.order / gcd(ex[0], g.order);
    let mut f = c.p;
    let mut oo = o;
    while oo.is_multiple_of(c.p) {
        oo /= c.p;
        f *= c.p;
    }
    f
}

fn flat_index(g: &Group, exps: &[Vec<u64>]) -> usize {
    let mut idx = 0usize;
    let mut stride = 1usize;
    for (c, ex) in g.comps.iter().zip(exps) {
        for (gen, &x) in c.gens.iter().zip(ex) {
            idx += x as usize * stride;
            stride *= gen.order as usize;
        }
    }
    idx
}

fn unit(th: Rational) -> Complex64 {
    let (n, d) = (th.num().rem_euclid(th.den()), th.den());
    // exact values at quarter turns keep real characters exactly real
    if n == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * n == d {
        Complex64::new(-1.0, 0.0)
    } else if 4 * n == d {
        Complex64::new(0.0, 1.0)
    } else if 4 * n == 3 * d {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, std::f64::consts::TAU * th.to_f64())
    }
}

/// e(θ) for an exact rational angle.
pub fn e_rational(th: Rational) -> Complex64 {
    unit(th.frac())
}

/// Kronecker symbol (d/n) for n >= 1.
pub fn kronecker(d: i64, n: i64) -> i32 {
    assert!(n >= 1);
    let mut n = n;
    let mut res = 1i32;
    while n % 2 == 0 {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        if matches!(d.rem_euclid(8), 3 | 5) {
            res = -res;
        }
    }
    // Jacobi symbol (d/n) for odd n
    let mut a = d.rem_euclid(n);
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                res = -res;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            res = -res;
        }
        a %= m;
    }
    if m == 1 {
        res
    } else {
        0
    }
}

/// All φ(q) characters modulo q, principal first.
pub fn char_group(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 || q > MAX_MODULUS {
        return Err(Error::Invalid(format!("character modulus {q} outside [1, {MAX_MODULUS}]")));
    }
    let fac: Factorization = factorize(q);
    let comps: Vec<Component> = fac.0.iter().map(|&(p, e)| Component::new(p, e)).collect();
    let group = Arc::new(Group { q, comps });
    let orders: Vec<u64> = group.comps.iter().flat_map(|c| c.gens.iter().map(|g| g.order)).collect();
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    for flat in 0..total {
        let mut rem = flat;
        let mut exps = Vec::new();
        for c in &group.comps {
            let mut ex = Vec::new();
            for g in &c.gens {
                ex.push(rem % g.order);
                rem /= g.order;
            }
            exps.push(ex);
        }
        out.push(DirichletCharacter { group: group.clone(), exps, index: flat as usize });
    }
    Ok(out)
}

/// Principal character modulo q.
pub fn principal(q: u64) -> Result<DirichletCharacter> {
    Ok(char_group(q)?.swap_remove(0))
}

/// Gauss sum τ(χ) = Σ_{n mod q} χ(n) e(n/q) by direct summation.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus() as i64;
    let mut s = Complex64::new(0.0, 0.0);
    for n in 0..q {
        if let Some(th) = chi.angle(n) {
            s += e_rational(th + Rational::new(n, q));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_modulus() {
        let g = char_group(1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].value(7), Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(gauss_sum(&g[0]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mod_three_and_five() {
        let g3 = char_group(3).unwrap();
        assert_eq!(g3.len(), 2);
        assert!(g3[0].is_principal());
        assert_eq!(g3[1].value(2), Complex64::new(-1.0, 0.0));
        let tau = gauss_sum(&g3[1]);
        assert_abs_diff_eq!(tau.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tau.im, 3f64.sqrt(), epsilon = 1e-12);

        let g5 = char_group(5).unwrap();
        let mut at2: Vec<(i64, i64)> =
            g5.iter().map(|c| (c.value(2).re.round() as i64, c.value(2).im.round() as i64)).collect();
        at2.sort();
        assert_eq!(at2, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
        let quad = g5.iter().find(|c| c.order() == 2).unwrap();
        let tau = gauss_sum(quad);
        assert_abs_diff_eq!(tau.re, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(tau.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn primitive_gauss_sums_have_modulus_sqrt_q() {
        for q in 1..=200u64 {
            for chi in char_group(q).unwrap() {
                if chi.is_primitive() {
                    assert_abs_diff_eq!(gauss_sum(&chi).norm_sqr(), q as f64, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn group_structure() {
        for q in [1u64, 2, 4, 8, 9, 12, 16, 24, 45, 60, 64, 100] {
            let g = char_group(q).unwrap();
            assert_eq!(g.len() as u64, super::super::factor::euler_phi(q));
            for (i, c) in g.iter().enumerate() {
                assert_eq!(c.index(), i);
                assert_eq!(c.conj().conj(), *c);
                assert_eq!(q % c.conductor(), 0);
                for n in 0..q as i64 {
                    let unitary = gcd(n as u64, q) == 1;
                    assert_eq!(c.angle(n).is_some(), unitary);
                }
            }
            // closure under products and distinctness
            let units: Vec<i64> = (1..=q as i64).filter(|&n| gcd(n as u64, q) == 1).collect();
            let sig = |f: &dyn Fn(i64) -> Rational| units.iter().map(|&n| f(n)).collect::<Vec<_>>();
            let sigs: Vec<Vec<Rational>> = g.iter().map(|c| sig(&|n| c.angle(n).unwrap())).collect();
            for a in &g {
                for b in &g {
                    let prod = sig(&|n| (a.angle(n).unwrap() + b.angle(n).unwrap()).frac());
                    assert!(sigs.contains(&prod));
                }
            }
            let mut uniq = sigs.clone();
            uniq.sort_by_key(|v| format!("{v:?}"));
            uniq.dedup();
            assert_eq!(uniq.len(), sigs.len());
        }
    }

    #[test]
    fn multiplicative() {
        for q in [7u64, 16, 20, 27] {
            for c in char_group(q).unwrap() {
                for m in 1..40i64 {
                    for n in 1..40i64 {
                        let lhs = c.value(m * n);
                        let rhs = c.value(m) * c.value(n);
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn conductors_known() {
        let g8 = char_group(8).unwrap();
        let mut conds: Vec<u64> = g8.iter().map(|c| c.conductor()).collect();
        conds.sort();
        assert_eq!(conds, vec![1, 4, 8, 8]);
        let g9 = char_group(9).unwrap();
        let mut conds: Vec<u64> = g9.iter().map(|c| c.conductor()).collect();
        conds.sort();
        assert_eq!(conds, vec![1, 3, 9, 9, 9, 9]);
        let q3 = &char_group(3).unwrap()[1];
        assert!(q3.matches_kronecker(-3));
        let q6 = char_group(6).unwrap();
        assert!(q6[1].induces_same(q3));
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, 3), 0);
    }
}
