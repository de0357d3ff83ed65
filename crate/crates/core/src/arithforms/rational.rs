use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::factor::gcd_i;

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd_i(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Rational { num: s * num / g, den: s * den / g }
    }

    pub fn from_int(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn frac(&self) -> Self {
        Rational { num: self.num.rem_euclid(self.den), den: self.den }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    fn combine(a: i128, b: i128) -> Self {
        let g = {
            let (mut x, mut y) = (a.unsigned_abs(), b.unsigned_abs());
            while y != 0 {
                (x, y) = (y, x % y);
            }
            x.max(1) as i128
        };
        let (n, d) = (a / g, b / g);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        Rational {
            num: i64::try_from(n).expect("rational numerator overflow"),
            den: i64::try_from(d).expect("rational denominator overflow"),
        }
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        Rational::combine(
            self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128,
            self.den as i128 * o.den as i128,
        )
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        self + (-o)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        Rational::combine(self.num as i128 * o.num as i128, self.den as i128 * o.den as i128)
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
