//! Exact arithmetic with sums of roots of unity, and formal scalars carrying
//! half-integer powers of p and powers of the symbol a_p.
//!
//! A `CyclotomicNumber` of order n is a rational vector indexed by ζ_n^k.
//! Vectors are kept in the group ring Q[Z/n] (multiplication is cyclic
//! convolution, exponents wrap mod n) and reduced modulo the n-th cyclotomic
//! polynomial only on demand, for equality tests and canonical output.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::angle::RationalAngle;

pub type Rat = Ratio<i128>;

fn lcm_usize(a: usize, b: usize) -> usize {
    a / a.gcd(&b) * b
}

static PHI_CACHE: Mutex<Option<HashMap<usize, Vec<i128>>>> = Mutex::new(None);

/// Coefficients of the n-th cyclotomic polynomial, low degree first.
///
/// Computed by dividing x^n − 1 by the product of Φ_d over proper divisors d,
/// and cached process-wide.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i128> {
    assert!(n >= 1);
    {
        let guard = PHI_CACHE.lock().unwrap();
        if let Some(map) = guard.as_ref() {
            if let Some(v) = map.get(&n) {
                return v.clone();
            }
        }
    }
    let result = if n == 1 {
        vec![-1, 1]
    } else {
        // x^n - 1
        let mut num = vec![0i128; n + 1];
        num[0] = -1;
        num[n] = 1;
        for d in 1..n {
            if n % d == 0 {
                let phi_d = cyclotomic_polynomial(d);
                num = int_poly_div_exact(&num, &phi_d);
            }
        }
        num
    };
    let mut guard = PHI_CACHE.lock().unwrap();
    guard
        .get_or_insert_with(HashMap::new)
        .insert(n, result.clone());
    result
}

/// Exact division of integer polynomials (panics on nonzero remainder).
fn int_poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(*den.last().unwrap() == 1, "divisor must be monic");
    let mut rem = num.to_vec();
    let mut quot = vec![0i128; dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd];
        if c != 0 {
            quot[k] = c;
            for (i, &d) in den.iter().enumerate() {
                rem[k + i] -= c * d;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division not exact");
    quot
}

/// An exact element of Q(ζ_n).
#[derive(Clone)]
pub struct CyclotomicNumber {
    order: usize,
    coeffs: Vec<Rat>,
}

impl CyclotomicNumber {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1);
        CyclotomicNumber {
            order,
            coeffs: vec![Rat::zero(); order],
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut c = CyclotomicNumber::zero(1);
        c.coeffs[0] = r;
        c
    }

    pub fn from_int(k: i128) -> Self {
        Self::from_rat(Rat::from_integer(k))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The monomial coeff·ζ_order^k.
    pub fn monomial(order: usize, k: i64, coeff: Rat) -> Self {
        let mut c = CyclotomicNumber::zero(order);
        let k = (k.rem_euclid(order as i64)) as usize;
        c.coeffs[k] = coeff;
        c
    }

    /// The root of unity named by a rational angle.
    pub fn from_angle(a: &RationalAngle) -> Self {
        Self::monomial(a.denominator() as usize, a.numerator(), Rat::one())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Re-express at a multiple of the current order.
    pub fn to_order(&self, m: usize) -> Self {
        assert!(m % self.order == 0, "target order must be a multiple");
        if m == self.order {
            return self.clone();
        }
        let step = m / self.order;
        let mut out = CyclotomicNumber::zero(m);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[k * step] = *c;
            }
        }
        out
    }

    fn merged(a: &Self, b: &Self) -> (Self, Self) {
        let n = lcm_usize(a.order, b.order);
        (a.to_order(n), b.to_order(n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = Self::merged(self, other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += *y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        let mut a = self.clone();
        for c in a.coeffs.iter_mut() {
            *c = -*c;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn add_assign(&mut self, other: &Self) {
        if other.order == self.order {
            for (x, y) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
                *x += *y;
            }
        } else {
            *self = self.add(other);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::merged(self, other);
        let n = a.order;
        // convolve through the operand with fewer nonzero terms
        let (small, big) = {
            let na = a.coeffs.iter().filter(|c| !c.is_zero()).count();
            let nb = b.coeffs.iter().filter(|c| !c.is_zero()).count();
            if na <= nb {
                (&a, &b)
            } else {
                (&b, &a)
            }
        };
        let mut out = CyclotomicNumber::zero(n);
        for (i, ci) in small.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in big.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                out.coeffs[k] += *ci * *cj;
            }
        }
        out
    }

    pub fn mul_rat(&self, r: Rat) -> Self {
        let mut a = self.clone();
        for c in a.coeffs.iter_mut() {
            *c *= r;
        }
        a
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = CyclotomicNumber::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Complex conjugate (ζ ↦ ζ^{-1}).
    pub fn conjugate(&self) -> Self {
        let n = self.order;
        let mut out = CyclotomicNumber::zero(n);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[(n - k) % n] = *c;
            }
        }
        out
    }

    /// x·conj(x), exact.
    pub fn abs_square(&self) -> Self {
        self.mul(&self.conjugate())
    }

    /// Reduce modulo Φ_n.  The result has nonzero coefficients only below
    /// φ(n), padded back to length n.
    pub fn canonical(&self) -> Self {
        let n = self.order;
        if n == 1 {
            return self.clone();
        }
        let phi = cyclotomic_polynomial(n);
        let deg_phi = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for k in (deg_phi..n).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            rem[k] = Rat::zero();
            // subtract c·x^{k-deg_phi}·Φ_n (leading term cancels)
            let base = k - deg_phi;
            for (i, &p) in phi.iter().enumerate().take(deg_phi) {
                if p != 0 {
                    rem[base + i] -= c * Rat::from_integer(p);
                }
            }
        }
        CyclotomicNumber {
            order: n,
            coeffs: rem,
        }
    }

    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return true;
        }
        self.canonical().coeffs.iter().all(|c| c.is_zero())
    }

    /// The value as a rational number, when it is one.
    pub fn try_rational(&self) -> Option<Rat> {
        let c = self.canonical();
        if c.coeffs.iter().skip(1).all(|x| x.is_zero()) {
            Some(c.coeffs[0])
        } else {
            None
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x]
    /// modulo Φ_n.
    pub fn invert(&self) -> Option<Self> {
        let n = self.order;
        if n == 1 {
            if self.coeffs[0].is_zero() {
                return None;
            }
            return Some(Self::from_rat(self.coeffs[0].recip()));
        }
        let me = self.canonical();
        if me.coeffs.iter().all(|c| c.is_zero()) {
            return None;
        }
        let phi: Vec<Rat> = cyclotomic_polynomial(n)
            .iter()
            .map(|&c| Rat::from_integer(c))
            .collect();
        // extended gcd of (me as poly, Φ_n)
        let trim = |v: &[Rat]| -> Vec<Rat> {
            let mut v = v.to_vec();
            while v.len() > 1 && v.last().unwrap().is_zero() {
                v.pop();
            }
            v
        };
        let mut r0 = phi;
        let mut r1 = trim(&me.coeffs);
        // Bezout coefficients for `me` only
        let mut s0: Vec<Rat> = vec![Rat::zero()];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = rat_poly_divmod(&r0, &r1);
            let qs1 = rat_poly_mul(&q, &s1);
            let s2 = rat_poly_sub(&s0, &qs1);
            r0 = r1;
            r1 = trim(&r);
            s0 = s1;
            s1 = s2;
        }
        // r0 = gcd, must be a nonzero constant since Φ_n is squarefree
        // and me ≠ 0 mod Φ_n
        if r0.len() != 1 || r0[0].is_zero() {
            return None;
        }
        let g = r0[0];
        let mut coeffs = vec![Rat::zero(); n];
        for (k, c) in s0.iter().enumerate() {
            if k < n {
                coeffs[k] = *c / g;
            }
        }
        let inv = CyclotomicNumber { order: n, coeffs }.canonical();
        Some(inv)
    }

    /// Numeric value under ζ_n = e^{2πi/n}.
    pub fn embed_complex(&self) -> (f64, f64) {
        let n = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = (*c.numer() as f64) / (*c.denom() as f64);
            let t = 2.0 * std::f64::consts::PI * (k as f64) / n;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }

    /// Substitute ζ_n ↦ ζ_n^k for k coprime to n (a Galois automorphism).
    pub fn galois(&self, k: i64) -> Self {
        let n = self.order;
        let km = k.rem_euclid(n as i64) as usize;
        assert!(km.gcd(&n) == 1, "exponent must be coprime to the order");
        let mut out = CyclotomicNumber::zero(n);
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[(j * km) % n] += *c;
            }
        }
        out
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        let mut first = true;
        for (k, r) in c.coeffs.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let neg = r.is_negative();
            let abs = if neg { -*r } else { *r };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if k == 0 {
                write!(f, "{}", abs)?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}·", abs)?;
                }
                if k == 1 {
                    write!(f, "ζ_{}", c.order)?;
                } else {
                    write!(f, "ζ_{}^{}", c.order, k)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn rat_poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = den.len() - 1;
    let lead = *den.last().unwrap();
    assert!(!lead.is_zero());
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![Rat::zero()], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd] / lead;
        if !c.is_zero() {
            quot[k] = c;
            for (i, d) in den.iter().enumerate() {
                let t = c * *d;
                rem[k + i] -= t;
            }
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    out
}

fn rat_poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += *x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= *y;
    }
    out
}

/// A cyclotomic coefficient times p^{half_p_exp/2} times a_p^{ap_exp}.
///
/// `p == 0` marks a scalar with no prime attached (pure constants); it can be
/// combined freely with scalars over any prime.
#[derive(Clone)]
pub struct FormalScalar {
    pub coeff: CyclotomicNumber,
    pub half_p_exp: i64,
    pub ap_exp: i64,
    pub p: u64,
}

impl FormalScalar {
    pub fn new(coeff: CyclotomicNumber, p: u64, half_p_exp: i64, ap_exp: i64) -> Self {
        FormalScalar {
            coeff,
            half_p_exp,
            ap_exp,
            p,
        }
        .normalized()
    }

    pub fn one() -> Self {
        FormalScalar {
            coeff: CyclotomicNumber::one(),
            half_p_exp: 0,
            ap_exp: 0,
            p: 0,
        }
    }

    pub fn from_cyclotomic(c: CyclotomicNumber) -> Self {
        FormalScalar {
            coeff: c,
            half_p_exp: 0,
            ap_exp: 0,
            p: 0,
        }
        .normalized()
    }

    pub fn from_angle(a: &RationalAngle) -> Self {
        Self::from_cyclotomic(CyclotomicNumber::from_angle(a))
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_cyclotomic(CyclotomicNumber::from_rat(r))
    }

    fn normalized(mut self) -> Self {
        if self.half_p_exp == 0 && self.ap_exp == 0 {
            self.p = 0;
        }
        if self.coeff.is_zero() {
            self.half_p_exp = 0;
            self.ap_exp = 0;
            self.p = 0;
            self.coeff = CyclotomicNumber::zero(1);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    fn join_prime(a: u64, b: u64) -> u64 {
        match (a, b) {
            (0, q) => q,
            (q, 0) => q,
            (q, r) => {
                assert!(q == r, "formal scalars over different primes");
                q
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        FormalScalar {
            coeff: self.coeff.mul(&other.coeff),
            half_p_exp: self.half_p_exp + other.half_p_exp,
            ap_exp: self.ap_exp + other.ap_exp,
            p: Self::join_prime(self.p, other.p),
        }
        .normalized()
    }

    pub fn invert(&self) -> Option<Self> {
        Some(
            FormalScalar {
                coeff: self.coeff.invert()?,
                half_p_exp: -self.half_p_exp,
                ap_exp: -self.ap_exp,
                p: self.p,
            }
            .normalized(),
        )
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.invert()?))
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 {
            self.invert().expect("inverting zero formal scalar")
        } else {
            self.clone()
        };
        let e = k.unsigned_abs() as u32;
        FormalScalar {
            coeff: base.coeff.pow(e),
            half_p_exp: base.half_p_exp * e as i64,
            ap_exp: base.ap_exp * e as i64,
            p: base.p,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        FormalScalar {
            coeff: self.coeff.neg(),
            ..self.clone()
        }
    }

    /// Attach a prime so p-powers render against it (no-op if already set).
    pub fn with_prime(mut self, p: u64) -> Self {
        if self.p == 0 && (self.half_p_exp != 0 || self.ap_exp != 0) {
            self.p = p;
        }
        self
    }

    /// Numeric value; only defined when no a_p symbol is present.
    pub fn embed_complex(&self) -> Option<(f64, f64)> {
        if self.ap_exp != 0 {
            return None;
        }
        let (re, im) = self.coeff.embed_complex();
        let scale = if self.half_p_exp == 0 {
            1.0
        } else {
            (self.p as f64).powf(self.half_p_exp as f64 / 2.0)
        };
        Some((re * scale, im * scale))
    }
}

impl PartialEq for FormalScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.coeff.is_zero() || other.coeff.is_zero() {
            return self.coeff.is_zero() && other.coeff.is_zero();
        }
        self.half_p_exp == other.half_p_exp
            && self.ap_exp == other.ap_exp
            && (self.p == other.p || self.p == 0 || other.p == 0)
            && self.coeff == other.coeff
    }
}

impl Eq for FormalScalar {}

impl fmt::Display for FormalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return write!(f, "0");
        }
        let c = self.coeff.canonical();
        let nonzero: Vec<usize> = c
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(k, _)| k)
            .collect();
        let mut negative = false;
        let mut parts: Vec<String> = Vec::new();
        // cyclotomic part, with a rational factor pulled out of monomials
        let zeta_part = if nonzero.len() == 1 {
            let k = nonzero[0];
            let r = c.coeffs[k];
            negative = r.is_negative();
            let abs = if negative { -r } else { r };
            if !abs.is_one() {
                parts.push(format!("{}", abs));
            }
            if k == 0 {
                None
            } else if k == 1 {
                Some(format!("(ζ_{})", c.order))
            } else {
                Some(format!("(ζ_{}^{})", c.order, k))
            }
        } else {
            Some(format!("({})", c))
        };
        if self.half_p_exp != 0 {
            if self.half_p_exp == 2 {
                parts.push("p".to_string());
            } else if self.half_p_exp % 2 == 0 {
                parts.push(format!("p^{{{}}}", self.half_p_exp / 2));
            } else {
                parts.push(format!("p^{{{}/2}}", self.half_p_exp));
            }
        }
        if self.ap_exp != 0 {
            if self.ap_exp == 1 {
                parts.push("a_p".to_string());
            } else {
                parts.push(format!("a_p^{}", self.ap_exp));
            }
        }
        if let Some(z) = zeta_part {
            parts.push(z);
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}{}", if negative { "-" } else { "" }, parts.join("·"))
    }
}

impl fmt::Debug for FormalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(n: usize, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::monomial(n, k, Rat::one())
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let i = zeta(4, 1);
        assert_eq!(i.mul(&i), CyclotomicNumber::from_int(-1));
    }

    #[test]
    fn sqrt2_squared_is_two() {
        // ζ_8 + ζ_8^7 = √2
        let s = zeta(8, 1).add(&zeta(8, 7));
        assert_eq!(s.mul(&s), CyclotomicNumber::from_int(2));
    }

    #[test]
    fn abs_square_of_zeta3_sum() {
        // ζ_3 + ζ_3² = −1
        let x = zeta(3, 1).add(&zeta(3, 2));
        assert_eq!(x.abs_square(), CyclotomicNumber::from_int(1));
    }

    #[test]
    fn quadratic_gauss_sum_f5() {
        // Σ_x (x|5) ζ_5^x has |·|² = 5
        let mut g = CyclotomicNumber::zero(5);
        for x in 1..5i64 {
            let legendre = if [1, 4].contains(&(x % 5)) { 1 } else { -1 };
            g = g.add(&CyclotomicNumber::monomial(5, x, Rat::from_integer(legendre)));
        }
        assert_eq!(g.abs_square(), CyclotomicNumber::from_int(5));
        let (re, im) = g.embed_complex();
        assert!((re - 5f64.sqrt()).abs() < 1e-9 && im.abs() < 1e-9);
    }

    #[test]
    fn inverse_roundtrip() {
        let x = zeta(12, 5).add(&CyclotomicNumber::from_int(3));
        let inv = x.invert().unwrap();
        assert_eq!(x.mul(&inv), CyclotomicNumber::one());
        assert!(CyclotomicNumber::zero(6).invert().is_none());
    }

    #[test]
    fn phi_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn formal_scalar_product() {
        // (−1)·p^{1/2}·a_p³ × p^{1/2} = −p·a_p³
        let a = FormalScalar::new(CyclotomicNumber::from_int(-1), 5, 1, 3);
        let b = FormalScalar::new(CyclotomicNumber::one(), 5, 1, 0);
        let c = a.mul(&b);
        assert_eq!(c.half_p_exp, 2);
        assert_eq!(c.ap_exp, 3);
        assert_eq!(c.coeff, CyclotomicNumber::from_int(-1));
    }

    #[test]
    fn formal_scalar_display() {
        let s = FormalScalar::new(zeta(4, 1).neg(), 5, 1, 3);
        assert_eq!(format!("{}", s), "-p^{1/2}·a_p^3·(ζ_4)");
        assert_eq!(format!("{}", FormalScalar::one()), "1");
        let t = FormalScalar::new(CyclotomicNumber::from_int(2), 3, -4, 0);
        assert_eq!(format!("{}", t), "2·p^{-2}");
    }

    #[test]
    fn galois_substitution() {
        let x = zeta(5, 1).add(&zeta(5, 4));
        let y = x.galois(2);
        assert_eq!(y, zeta(5, 2).add(&zeta(5, 3)));
    }
}
