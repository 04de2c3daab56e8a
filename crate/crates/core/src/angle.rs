//! Rational angles: exact roots of unity written as fractions of a full turn.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// The root of unity `e^{2πi·num/den}`, stored as a reduced fraction in `[0, 1)`.
///
/// `den == 1` forces `num == 0` (the value 1).  The group law is addition of
/// angles, i.e. multiplication of the corresponding roots of unity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct RationalAngle {
    num: i64,
    den: i64,
}

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle { num: 0, den: 1 };

    /// Reduce `num/den` modulo 1 to canonical form.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "angle denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        num = num.rem_euclid(den);
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        if num == 0 {
            den = 1;
        }
        RationalAngle { num, den }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Multiplicative order of the root of unity.
    pub fn order(&self) -> i64 {
        self.den
    }

    pub fn add(&self, other: &RationalAngle) -> RationalAngle {
        let den = self.den.checked_mul(other.den / self.den.gcd(&other.den)).expect("angle lcm overflow");
        RationalAngle::new(
            self.num * (den / self.den) + other.num * (den / other.den),
            den,
        )
    }

    pub fn neg(&self) -> RationalAngle {
        RationalAngle::new(-self.num, self.den)
    }

    pub fn sub(&self, other: &RationalAngle) -> RationalAngle {
        self.add(&other.neg())
    }

    /// Integer multiple, i.e. the k-th power of the root of unity.
    pub fn mul_int(&self, k: i64) -> RationalAngle {
        let km = ((k % self.den) + self.den) % self.den;
        RationalAngle::new(self.num.checked_mul(km).expect("angle scale overflow"), self.den)
    }

    /// Halve the angle: a square root of the root of unity (the principal one).
    pub fn half(&self) -> RationalAngle {
        RationalAngle::new(self.num, 2 * self.den)
    }

    pub fn embed(&self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI * (self.num as f64) / (self.den as f64);
        (t.cos(), t.sin())
    }
}

impl fmt::Debug for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e(2πi·{}/{})", self.num, self.den)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "1")
        } else if self.den == 2 {
            write!(f, "-1")
        } else {
            write!(f, "ζ_{}^{}", self.den, self.num)
        }
    }
}

impl From<(i64, i64)> for RationalAngle {
    fn from(v: (i64, i64)) -> Self {
        RationalAngle::new(v.0, v.1)
    }
}

impl From<RationalAngle> for (i64, i64) {
    fn from(a: RationalAngle) -> Self {
        (a.num, a.den)
    }
}
