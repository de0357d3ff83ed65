//! Integer factorization and small number-theoretic helpers.

/// Prime factorization as (prime, exponent) pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization(pub Vec<(u64, u32)>);

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn product(&self) -> u64 {
        self.0.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Exponent of `p`, zero when absent.
    pub fn ord(&self, p: u64) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn euler_phi(&self) -> u64 {
        self.0.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant of Pollard rho; n is odd composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = gcd(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn collect(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    collect(d, out);
    collect(n / d, out);
}

/// Exact factorization of `n >= 1`; `n = 1` gives the empty list.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut n = n;
    let mut raw = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            raw.push(p);
            n /= p;
        }
    }
    let mut p = 53u64;
    while p * p <= n && p < 10_000 {
        while n.is_multiple_of(p) {
            raw.push(p);
            n /= p;
        }
        p += 2;
    }
    collect(n, &mut raw);
    raw.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in raw {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Factorization(out)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Inverse of `a` modulo `q` in `[0, q)`, or `None` when not coprime.
pub fn mod_inverse(a: i64, q: i64) -> Option<i64> {
    assert!(q >= 1);
    if q == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a.rem_euclid(q), q);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(q))
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).euler_phi()
}

/// Largest divisor of `q` composed only of primes dividing `n`, i.e. (n^∞, q).
pub fn gcd_power(n: u64, q: u64) -> u64 {
    let mut out = 1;
    for (p, e) in factorize(q).0 {
        if n.is_multiple_of(p) {
            out *= p.pow(e);
        }
    }
    out
}

/// Number of divisors.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).0.iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n).0 {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Smallest-prime-factor table for `0..=n`.
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    let spf = spf_sieve(n);
    (2..=n).filter(|&i| spf[i] as usize == i).map(|i| i as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn small_cases() {
        assert!(factorize(1).0.is_empty());
        assert_eq!(factorize(12).0, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(9699690).0, vec![(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1)]);
    }

    #[test]
    fn agrees_with_trial_division() {
        for n in 1..5000u64 {
            assert_eq!(factorize(n).0, trial(n), "n={n}");
        }
    }

    #[test]
    fn large_semiprime() {
        let p = 4_294_967_291u64;
        let q = 2_147_483_647u64;
        assert_eq!(factorize(p * q).0, vec![(q, 1), (p, 1)]);
        assert_eq!(factorize(i64::MAX as u64).product(), i64::MAX as u64);
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(1, 9), Some(1));
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(gcd_power(4, 6), 2);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
