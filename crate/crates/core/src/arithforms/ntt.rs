//! Exact power-series products through number-theoretic transforms over five
//! primes, recombined by Garner's algorithm into i128.

use crate::arithforms::factor::factorize;
use crate::error::{Error, Result};

const PRIMES: [u64; 5] = [998_244_353, 167_772_161, 469_762_049, 754_974_721, 2_113_929_217];

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn primitive_root(p: u64) -> u64 {
    let f = factorize(p - 1);
    (2..p).find(|&g| f.primes().all(|q| pow_mod(g, (p - 1) / q, p) != 1)).expect("prime modulus")
}

// const P lets the compiler strength-reduce every `% P`
fn ntt<const P: u64>(a: &mut [u64], invert: bool) {
    let p = P;
    let g = primitive_root(P);
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(g, (p - 1) / len as u64, p);
        if invert {
            w = pow_mod(w, p - 2, p);
        }
        let half = len / 2;
        let mut ws = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            ws.push(cur);
            cur = cur * w % P;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * ws[k] % P;
                lo[k] = if u + v >= p { u + v - p } else { u + v };
                hi[k] = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv % P;
        }
    }
}

fn mul_mod<const P: u64>(a: &[u64], b: &[u64], size: usize, len: usize, square: bool) -> Vec<u64> {
    let mut fa = a.to_vec();
    fa.resize(size, 0);
    ntt::<P>(&mut fa, false);
    if square {
        for x in fa.iter_mut() {
            *x = *x * *x % P;
        }
    } else {
        let mut fb = b.to_vec();
        fb.resize(size, 0);
        ntt::<P>(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = *x * y % P;
        }
    }
    ntt::<P>(&mut fa, true);
    fa.truncate(len);
    fa
}

/// A series held as residues modulo each transform prime, truncated to `len` terms.
#[derive(Clone)]
pub struct ModSeries {
    res: Vec<Vec<u64>>,
    len: usize,
}

impl ModSeries {
    pub fn from_sparse(len: usize, terms: &[(usize, i128)]) -> Self {
        let res = PRIMES
            .iter()
            .map(|&p| {
                let mut v = vec![0u64; len];
                for &(k, c) in terms {
                    if k < len {
                        v[k] = c.rem_euclid(p as i128) as u64;
                    }
                }
                v
            })
            .collect();
        ModSeries { res, len }
    }

    pub fn one(len: usize) -> Self {
        Self::from_sparse(len, &[(0, 1)])
    }

    pub fn mul(&self, other: &ModSeries) -> ModSeries {
        let len = self.len;
        let size = (2 * len - 1).next_power_of_two();
        let square = std::ptr::eq(self, other);
        let res = (0..PRIMES.len())
            .map(|i| match i {
                0 => mul_mod::<{ PRIMES[0] }>(&self.res[0], &other.res[0], size, len, square),
                1 => mul_mod::<{ PRIMES[1] }>(&self.res[1], &other.res[1], size, len, square),
                2 => mul_mod::<{ PRIMES[2] }>(&self.res[2], &other.res[2], size, len, square),
                3 => mul_mod::<{ PRIMES[3] }>(&self.res[3], &other.res[3], size, len, square),
                _ => mul_mod::<{ PRIMES[4] }>(&self.res[4], &other.res[4], size, len, square),
            })
            .collect();
        ModSeries { res, len }
    }

    pub fn pow(&self, mut e: u32) -> ModSeries {
        if e == 0 {
            return ModSeries::one(self.len);
        }
        let mut acc: Option<ModSeries> = None;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.expect("e > 0")
    }

    /// Exact coefficients, valid when every |c| < 2^126.
    pub fn to_i128(&self) -> Result<Vec<i128>> {
        const OFFSET: u128 = 1 << 126;
        let k = PRIMES.len();
        // inverses of p_0…p_{i−1} modulo p_i
        let mut inv = vec![0u64; k];
        for i in 1..k {
            let mut prod = 1u64;
            for &pj in &PRIMES[..i] {
                prod = prod * (pj % PRIMES[i]) % PRIMES[i];
            }
            inv[i] = pow_mod(prod, PRIMES[i] - 2, PRIMES[i]);
        }
        let mut out = Vec::with_capacity(self.len);
        let mut digits = vec![0u64; k];
        for n in 0..self.len {
            for i in 0..k {
                let p = PRIMES[i];
                // residue of y = c + 2^126
                let mut v = (self.res[i][n] + (OFFSET % p as u128) as u64) % p;
                let mut prod = 1u64;
                for j in 0..i {
                    let sub = digits[j] % p * prod % p;
                    v = (v + p - sub) % p;
                    prod = prod * (PRIMES[j] % p) % p;
                }
                digits[i] = v * inv[i] % p;
                if i == 0 {
                    digits[0] = v;
                }
            }
            let mut y: u128 = 0;
            let mut radix: u128 = 1;
            for i in 0..k {
                let term = (digits[i] as u128).checked_mul(radix);
                y = term.and_then(|t| y.checked_add(t)).ok_or(Error::Overflow("modular reconstruction"))?;
                if i + 1 < k {
                    radix = match radix.checked_mul(PRIMES[i] as u128) {
                        Some(r) => r,
                        None => {
                            if digits[i + 1..].iter().any(|&d| d != 0) {
                                return Err(Error::Overflow("modular reconstruction"));
                            }
                            break;
                        }
                    };
                }
            }
            if y >= 2 * OFFSET {
                return Err(Error::Overflow("modular reconstruction"));
            }
            out.push(y as i128 - OFFSET as i128);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products_are_exact() {
        let a = ModSeries::from_sparse(8, &[(0, 3), (1, -2), (3, 7)]);
        let b = ModSeries::from_sparse(8, &[(0, -1), (2, 5)]);
        let c = a.mul(&b).to_i128().unwrap();
        assert_eq!(c, vec![-3, 2, 15, -17, 0, 35, 0, 0]);
    }

    #[test]
    fn large_values_survive_reconstruction() {
        let big: i128 = (1 << 100) + 12345;
        let a = ModSeries::from_sparse(2, &[(0, big), (1, -big)]);
        assert_eq!(a.to_i128().unwrap(), vec![big, -big]);
        let sq = ModSeries::from_sparse(1, &[(0, -(1i128 << 62))]);
        assert_eq!(sq.pow(2).to_i128().unwrap()[0], 1i128 << 124);
    }
}
