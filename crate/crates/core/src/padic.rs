//! Truncated p-adic integers, Teichmüller lifts, Morita's p-adic gamma
//! function, and the totally ramified ring Z_p[π]/(π^{p−1}+p) used as the
//! Gross–Koblitz verification oracle.

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Result, Sym3Error};
use crate::fields::mod_inverse;
use num_traits::Zero;

/// An element of Z/p^precision standing for a p-adic integer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PAdicInt {
    pub p: u64,
    pub precision: u32,
    pub residue: u64,
}

impl PAdicInt {
    pub fn new(p: u64, precision: u32, value: i128) -> Self {
        let m = modulus(p, precision);
        PAdicInt {
            p,
            precision,
            residue: value.rem_euclid(m as i128) as u64,
        }
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.p, self.precision)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.precision, self.residue as i128 + other.residue as i128)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.precision, self.residue as i128 - other.residue as i128)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.p, self.precision, self.residue as i128 * other.residue as i128)
    }

    fn check(&self, other: &Self) {
        assert!(self.p == other.p && self.precision == other.precision);
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::new(self.p, self.precision, 1);
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Valuation, reported only when it is below the precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.residue == 0 {
            return None;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r % self.p == 0 {
            r /= self.p;
            v += 1;
        }
        Some(v)
    }

    pub fn is_unit(&self) -> bool {
        self.residue % self.p != 0
    }

    pub fn inverse(&self) -> Option<Self> {
        let m = self.modulus() as i64;
        let inv = mod_inverse(self.residue as i64, m)?;
        Some(Self::new(self.p, self.precision, inv as i128))
    }

    /// The image of the rational num/den (den coprime to p).
    pub fn from_rational(p: u64, precision: u32, num: i64, den: i64) -> Self {
        let m = modulus(p, precision) as i64;
        let d = mod_inverse(den.rem_euclid(m), m).expect("denominator divisible by p");
        Self::new(p, precision, num as i128 * d as i128)
    }
}

fn modulus(p: u64, precision: u32) -> u64 {
    p.checked_pow(precision).expect("p^precision overflows u64")
}

/// The Teichmüller lift: the unique (p−1)-th root of unity ≡ x mod p,
/// computed by iterating x ↦ x^p to its fixed point.
pub fn teichmuller(p: u64, x: u64, precision: u32) -> PAdicInt {
    assert!(x % p != 0, "Teichmüller lift needs a unit");
    let mut t = PAdicInt::new(p, precision, x as i128);
    for _ in 0..precision {
        t = t.pow(p);
    }
    debug_assert_eq!(t.pow(p).residue, t.residue);
    t
}

/// Morita's p-adic gamma function, extended to Z_p by continuity:
/// Γ_p(n) = (−1)^n · Π_{0<j<n, p∤j} j for integers n ≥ 1.
pub fn gamma_p(x: &PAdicInt) -> PAdicInt {
    let m = x.modulus();
    let n = x.residue; // the integer in [0, p^prec) congruent to x
    let mut acc: u128 = 1;
    for j in 1..n {
        if j % x.p != 0 {
            acc = acc * j as u128 % m as u128;
        }
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    PAdicInt::new(x.p, x.precision, sign * acc as i128)
}

/// Γ_p at the rational a/k (k coprime to p).
pub fn gamma_p_rational(p: u64, precision: u32, num: i64, den: i64) -> PAdicInt {
    gamma_p(&PAdicInt::from_rational(p, precision, num, den))
}

/// Z_p[π]/(π^{p−1} + p) with coordinates mod p^zp_prec.
#[derive(Clone, Debug)]
pub struct RamifiedRing {
    pub p: u64,
    pub zp_prec: u32,
}

/// Σ c_j π^j with 0 ≤ j < p−1; `coeffs[j]` is c_j mod p^zp_prec.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RamifiedPAdicElement {
    pub coeffs: Vec<u64>,
}

impl RamifiedRing {
    pub fn new(p: u64, zp_prec: u32) -> Self {
        assert!(p % 2 == 1 && p >= 3);
        let _ = modulus(p, zp_prec);
        RamifiedRing { p, zp_prec }
    }

    pub fn deg(&self) -> usize {
        (self.p - 1) as usize
    }

    /// π-adic precision of the model.
    pub fn pi_precision(&self) -> u32 {
        (self.p as u32 - 1) * self.zp_prec
    }

    fn m(&self) -> u64 {
        modulus(self.p, self.zp_prec)
    }

    pub fn zero(&self) -> RamifiedPAdicElement {
        RamifiedPAdicElement {
            coeffs: vec![0; self.deg()],
        }
    }

    pub fn from_int(&self, v: i128) -> RamifiedPAdicElement {
        let mut x = self.zero();
        x.coeffs[0] = v.rem_euclid(self.m() as i128) as u64;
        x
    }

    pub fn one(&self) -> RamifiedPAdicElement {
        self.from_int(1)
    }

    pub fn from_padic(&self, v: &PAdicInt) -> RamifiedPAdicElement {
        assert!(v.p == self.p && v.precision >= self.zp_prec);
        self.from_int(v.residue as i128)
    }

    pub fn pi(&self) -> RamifiedPAdicElement {
        let mut x = self.zero();
        x.coeffs[1] = 1;
        x
    }

    pub fn add(&self, a: &RamifiedPAdicElement, b: &RamifiedPAdicElement) -> RamifiedPAdicElement {
        let m = self.m();
        RamifiedPAdicElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(b.coeffs.iter())
                .map(|(&x, &y)| ((x as u128 + y as u128) % m as u128) as u64)
                .collect(),
        }
    }

    pub fn sub(&self, a: &RamifiedPAdicElement, b: &RamifiedPAdicElement) -> RamifiedPAdicElement {
        let m = self.m();
        RamifiedPAdicElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(b.coeffs.iter())
                .map(|(&x, &y)| ((x as i128 - y as i128).rem_euclid(m as i128)) as u64)
                .collect(),
        }
    }

    pub fn neg(&self, a: &RamifiedPAdicElement) -> RamifiedPAdicElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &RamifiedPAdicElement, b: &RamifiedPAdicElement) -> RamifiedPAdicElement {
        let d = self.deg();
        let m = self.m() as i128;
        let mut conv = vec![0i128; 2 * d - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                conv[i + j] = (conv[i + j] + x as i128 * y as i128) % m;
            }
        }
        // fold π^{p−1} = −p
        let p = self.p as i128;
        let mut out = vec![0i128; d];
        for (k, &c) in conv.iter().enumerate() {
            if k < d {
                out[k] = (out[k] + c) % m;
            } else {
                out[k - d] = (out[k - d] - p * c) % m;
            }
        }
        RamifiedPAdicElement {
            coeffs: out.into_iter().map(|c| c.rem_euclid(m) as u64).collect(),
        }
    }

    pub fn pow(&self, a: &RamifiedPAdicElement, mut e: u64) -> RamifiedPAdicElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// π-adic valuation: min over j of (p−1)·val_p(c_j) + j.
    pub fn pi_valuation(&self, a: &RamifiedPAdicElement) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (j, &c) in a.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut v = 0u32;
            let mut r = c;
            while r % self.p == 0 {
                r /= self.p;
                v += 1;
            }
            let val = (self.p as u32 - 1) * v + j as u32;
            best = Some(best.map_or(val, |b| b.min(val)));
        }
        best.filter(|&v| v < self.pi_precision())
    }

    /// Exact division by π^s (valuation must be at least s).
    pub fn shift_down(&self, a: &RamifiedPAdicElement, s: u32) -> RamifiedPAdicElement {
        let mut x = a.clone();
        let m = self.m() as i128;
        let p = self.p as i128;
        for _ in 0..s {
            // x/π: (c_0, ..., c_{d−1}) ↦ (c_1, ..., c_{d−1}, −c_0/p)
            let d = self.deg();
            let c0 = x.coeffs[0] as i128;
            assert!(c0 % p == 0, "shift_down below the valuation");
            let mut next = vec![0u64; d];
            next[..(d - 1)].copy_from_slice(&x.coeffs[1..]);
            next[d - 1] = (-(c0 / p)).rem_euclid(m) as u64;
            x = RamifiedPAdicElement { coeffs: next };
        }
        x
    }

    /// Inverse of a unit (constant coefficient a unit) by Newton iteration.
    pub fn unit_inverse(&self, a: &RamifiedPAdicElement) -> RamifiedPAdicElement {
        let c0 = a.coeffs[0];
        assert!(c0 % self.p != 0, "not a unit");
        let seed = mod_inverse(c0 as i64 % self.p as i64, self.p as i64).unwrap();
        let mut x = self.from_int(seed as i128);
        let two = self.from_int(2);
        let steps = 64 - u64::from(self.pi_precision()).leading_zeros() + 2;
        for _ in 0..steps {
            let t = self.sub(&two, &self.mul(a, &x));
            x = self.mul(&x, &t);
        }
        debug_assert_eq!(
            self.pi_valuation(&self.sub(&self.mul(a, &x), &self.one())),
            None
        );
        x
    }

    /// The p-th root of unity ζ_p ≡ 1 + π (mod π²), by Newton refinement of
    /// z^p = 1 starting from 1 + π.
    pub fn zeta_p(&self) -> Result<RamifiedPAdicElement> {
        let p = self.p;
        let mut z = self.add(&self.one(), &self.pi());
        let target = self.pi_precision().saturating_sub(p as u32);
        let mut last_val = 0;
        for _ in 0..64 {
            let f = self.sub(&self.pow(&z, p), &self.one());
            let val = match self.pi_valuation(&f) {
                None => return Ok(z),
                Some(v) => v,
            };
            if val >= target {
                return Ok(z);
            }
            if val <= last_val {
                return Err(Sym3Error::InsufficientPrecision(format!(
                    "zeta_p stalled at valuation {}",
                    val
                )));
            }
            last_val = val;
            // δ = −f/f' = −f·z^{1−p}/p = shift_down(f·z^{1−p}, p−1)
            let zinv = self.unit_inverse(&z);
            let u = self.mul(&f, &self.pow(&zinv, p - 1));
            let delta = self.shift_down(&u, p as u32 - 1);
            z = self.add(&z, &delta);
        }
        Err(Sym3Error::InsufficientPrecision(
            "zeta_p did not converge".into(),
        ))
    }

    /// Embed an exact cyclotomic number of order n | p(p−1) by sending
    /// ζ_p to `zeta` and ζ_{p−1} to `teich` (a primitive (p−1)-th root of
    /// unity of this ring).
    pub fn embed_cyclotomic(
        &self,
        x: &CyclotomicNumber,
        zeta: &RamifiedPAdicElement,
        teich: &RamifiedPAdicElement,
    ) -> Result<RamifiedPAdicElement> {
        let n = x.order() as u64;
        let p = self.p;
        let n_p = if n % p == 0 { p } else { 1 };
        let n_t = n / n_p;
        if n_p > 1 && n % p != 0 || (p - 1) % n_t != 0 {
            return Err(Sym3Error::OutOfRange(format!(
                "cyclotomic order {} does not embed in Q_p(π), p = {}",
                n, p
            )));
        }
        // primitive n-th root: ζ_{n_p}^α·ζ_{n_t}^β with α·n_t ≡ 1 (mod n_p)
        // and β·n_p ≡ 1 (mod n_t)
        let alpha = if n_p == 1 {
            0
        } else {
            mod_inverse((n_t % n_p) as i64, n_p as i64).unwrap() as u64
        };
        let beta = if n_t == 1 {
            0
        } else {
            mod_inverse((n_p % n_t) as i64, n_t as i64).unwrap() as u64
        };
        let zeta_nt = self.pow(teich, (p - 1) / n_t);
        let mut acc = self.zero();
        let m = self.m() as i128;
        for (k, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = k as u64;
            let part_p = if n_p == 1 {
                self.one()
            } else {
                self.pow(zeta, k * alpha % n_p)
            };
            let root = self.mul(&part_p, &self.pow(&zeta_nt, k * beta % n_t));
            let den = (*c.denom()).rem_euclid(m);
            let den_inv = mod_inverse(den as i64, m as i64).ok_or_else(|| {
                Sym3Error::InsufficientPrecision("denominator not invertible mod p".into())
            })?;
            let scalar = ((*c.numer()).rem_euclid(m) * den_inv as i128).rem_euclid(m);
            acc = self.add(&acc, &self.mul(&root, &self.from_int(scalar)));
        }
        Ok(acc)
    }
}

/// Outcome of the Gross–Koblitz defect computation.
#[derive(Clone, Copy, Debug)]
pub struct GrossKoblitzReport {
    pub p: u64,
    pub a: u64,
    /// sign s minimizing the defect of G − s·π^a·Γ_p(a/(p−1))
    pub sign: i32,
    /// π-adic valuation of the minimal defect (capped at `capacity`)
    pub defect_valuation: u32,
    /// π-adic precision of the model
    pub capacity: u32,
}

/// Compare the Gauss sum Σ_{x∈F_p^×} ω(x)^{−a} ζ_p^x against
/// ±π^a·Γ_p(a/(p−1)), reporting the sign and the defect valuation.
pub fn gross_koblitz_defect(p: u64, a: u64, pi_digits: u32) -> Result<GrossKoblitzReport> {
    if p < 3 || a == 0 || a >= p - 1 {
        return Err(Sym3Error::OutOfRange(format!(
            "need 1 ≤ a ≤ p−2 (got a = {}, p = {})",
            a, p
        )));
    }
    if pi_digits < 2 * (p as u32 - 1) {
        return Err(Sym3Error::InsufficientPrecision(format!(
            "need at least {} π-digits",
            2 * (p - 1)
        )));
    }
    let zp_prec = pi_digits.div_ceil(p as u32 - 1) + 2;
    let ring = RamifiedRing::new(p, zp_prec);
    let zeta = ring.zeta_p()?;
    let mut g = ring.zero();
    for x in 1..p {
        let w = teichmuller(p, x, zp_prec);
        let w_pow = ring.from_padic(&w.pow(p - 1 - a)); // ω(x)^{−a}
        g = ring.add(&g, &ring.mul(&w_pow, &ring.pow(&zeta, x)));
    }
    let gamma = gamma_p_rational(p, zp_prec, a as i64, p as i64 - 1);
    let pia_gamma = ring.mul(&ring.pow(&ring.pi(), a), &ring.from_padic(&gamma));
    let capacity = ring.pi_precision();
    let mut best: Option<(i32, u32)> = None;
    for sign in [1i32, -1] {
        let cand = if sign == 1 {
            pia_gamma.clone()
        } else {
            ring.neg(&pia_gamma)
        };
        let defect = ring.sub(&g, &cand);
        let val = ring.pi_valuation(&defect).unwrap_or(capacity);
        if best.map_or(true, |(_, b)| val > b) {
            best = Some((sign, val));
        }
    }
    let (sign, defect_valuation) = best.unwrap();
    Ok(GrossKoblitzReport {
        p,
        a,
        sign,
        defect_valuation,
        capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_basics() {
        // 1 lifts to 1; p−1 lifts to −1
        assert_eq!(teichmuller(7, 1, 4).residue, 1);
        let m1 = teichmuller(7, 6, 4);
        assert_eq!(m1.residue, 7u64.pow(4) - 1);
        // 2 in Z_5 at precision 2 → 7 mod 25
        assert_eq!(teichmuller(5, 2, 2).residue, 7);
        // ω(x)^{p−1} = 1 exactly at precision
        for x in 1..5 {
            assert_eq!(teichmuller(5, x, 6).pow(4).residue, 1);
        }
    }

    #[test]
    fn gamma_p_small_values() {
        // Γ_p(1) = −1
        let g1 = gamma_p(&PAdicInt::new(5, 3, 1));
        assert_eq!(g1.residue, 124);
        // Γ_p(2) = (−1)²·1 = 1
        assert_eq!(gamma_p(&PAdicInt::new(5, 3, 2)).residue, 1);
    }

    #[test]
    fn gamma_ratio_property() {
        // Γ_p(1+x)/Γ_p(x) = −x for unit x, all x mod p², p ∈ {3,5,7}
        for p in [3u64, 5, 7] {
            let prec = 2;
            for x in 0..p.pow(prec) {
                if x % p == 0 {
                    continue;
                }
                let xi = PAdicInt::new(p, prec, x as i128);
                let num = gamma_p(&xi.add(&PAdicInt::new(p, prec, 1)));
                let den = gamma_p(&xi);
                let ratio = num.mul(&den.inverse().unwrap());
                assert_eq!(ratio, PAdicInt::new(p, prec, -(x as i128)), "p={} x={}", p, x);
            }
        }
    }

    #[test]
    fn gamma_reflection_is_sign() {
        // Γ_p(x)·Γ_p(1−x) = ±1 for all x mod p², p ∈ {5,7}
        for p in [5u64, 7] {
            let prec = 2;
            let m = p.pow(prec);
            for x in 0..m {
                let xi = PAdicInt::new(p, prec, x as i128);
                let yi = PAdicInt::new(p, prec, 1 - x as i128);
                let prod = gamma_p(&xi).mul(&gamma_p(&yi)).residue;
                assert!(prod == 1 || prod == m - 1, "p={} x={} got {}", p, x, prod);
            }
        }
    }

    #[test]
    fn gamma_continuity() {
        // Γ_p(x) ≡ Γ_p(x + p^j) mod p^j
        for p in [3u64, 5, 7] {
            let m = 4;
            for x in [1u64, 2, p + 1, p * p + 2] {
                for j in 1..m {
                    let big = gamma_p(&PAdicInt::new(p, m, (x + p.pow(j)) as i128));
                    let small = gamma_p(&PAdicInt::new(p, m, x as i128));
                    assert_eq!(
                        big.residue % p.pow(j),
                        small.residue % p.pow(j),
                        "p={} x={} j={}",
                        p,
                        x,
                        j
                    );
                }
            }
        }
    }

    #[test]
    fn ramified_ring_law() {
        // π^{p−1} = −p by direct multiplication
        for p in [3u64, 5, 7] {
            let ring = RamifiedRing::new(p, 4);
            let pi_pow = ring.pow(&ring.pi(), p - 1);
            assert_eq!(pi_pow, ring.from_int(-(p as i128)));
        }
    }

    #[test]
    fn zeta_p_is_root_of_unity() {
        for p in [3u64, 5, 7] {
            let ring = RamifiedRing::new(p, 6);
            let z = ring.zeta_p().unwrap();
            // ζ ≡ 1 + π mod π²
            let dev = ring.sub(&z, &ring.add(&ring.one(), &ring.pi()));
            assert!(ring.pi_valuation(&dev).map_or(true, |v| v >= 2));
            let f = ring.sub(&ring.pow(&z, p), &ring.one());
            let val = ring.pi_valuation(&f);
            assert!(
                val.map_or(true, |v| v >= ring.pi_precision() - p as u32),
                "p={} val={:?}",
                p,
                val
            );
        }
    }

    #[test]
    fn gross_koblitz_oracle() {
        // classical normalization: g(ω^{−a}) = −π^a·Γ_p(a/(p−1))
        let r = gross_koblitz_defect(5, 1, 16).unwrap();
        assert_eq!(r.sign, -1);
        assert!(r.defect_valuation >= 12, "got {}", r.defect_valuation);
        let r = gross_koblitz_defect(7, 3, 20).unwrap();
        assert_eq!(r.sign, -1);
        assert!(r.defect_valuation >= 14, "got {}", r.defect_valuation);
        // a ≡ 0 rejected
        assert!(gross_koblitz_defect(5, 4, 16).is_err());
        assert!(gross_koblitz_defect(5, 0, 16).is_err());
    }

    #[test]
    fn gross_koblitz_defect_grows_with_precision() {
        let lo = gross_koblitz_defect(5, 2, 16).unwrap();
        let hi = gross_koblitz_defect(5, 2, 32).unwrap();
        assert!(hi.defect_valuation >= lo.defect_valuation);
        assert_eq!(lo.sign, hi.sign);
    }

    #[test]
    fn embed_cyclotomic_gauss_sum() {
        // the exact quadratic Gauss sum over F_5 embeds to g(ω^{-2}) and
        // matches −π²·Γ_p(1/2)
        use crate::cyclotomic::Rat;
        let p = 5u64;
        let ring = RamifiedRing::new(p, 8);
        let zeta = ring.zeta_p().unwrap();
        // ζ_4 ↦ ω(g)^{-1} with g = 2 a generator of F_5^×
        let teich = ring.from_padic(&teichmuller(p, 2, 8));
        let teich_inv = ring.unit_inverse(&teich);
        let mut g_exact = CyclotomicNumber::zero(20);
        for x in 1..5i64 {
            let leg = if x == 1 || x == 4 { 1 } else { -1 };
            g_exact = g_exact.add(&CyclotomicNumber::monomial(20, 5 * 0 + x * 4, Rat::from_integer(leg)));
        }
        let embedded = ring.embed_cyclotomic(&g_exact, &zeta, &teich_inv).unwrap();
        let gamma = gamma_p_rational(p, 8, 1, 2);
        let expected = ring.neg(&ring.mul(&ring.pow(&ring.pi(), 2), &ring.from_padic(&gamma)));
        let defect = ring.sub(&embedded, &expected);
        let val = ring.pi_valuation(&defect).unwrap_or(ring.pi_precision());
        assert!(val >= 24, "val = {}", val);
    }
}
