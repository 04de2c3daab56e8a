//! Classical Gauss sums over F_p and F_{p²} with exact cyclotomic values,
//! plus Davenport–Hasse and Stickelberger verification.

use num_integer::Integer;

use crate::angle::RationalAngle;
use crate::cyclotomic::{CyclotomicNumber, Rat};
use crate::error::{Result, Sym3Error};
use crate::fields::smallest_nonresidue;

/// F_{p^r} (r ≤ 2) with a fixed generator of the unit group.
///
/// F_{p²} is F_p[s]/(s² − u) with u the smallest nonresidue for odd p, and
/// F_2[s]/(s² + s + 1) for p = 2.
#[derive(Clone, Debug)]
pub struct FiniteField {
    pub p: u64,
    pub r: u32,
    sq: (u64, u64), // s² = sq.0 + sq.1·s
    /// powers of the fixed generator, g^0 .. g^{q−2}
    powers: Vec<(u64, u64)>,
    /// dlog, indexed by a + b·p (u64::MAX marks zero)
    dlog: Vec<u64>,
}

impl FiniteField {
    pub fn new(p: u64, r: u32) -> Self {
        assert!(r == 1 || r == 2);
        assert!(p >= 2);
        let q = p.pow(r);
        let sq = if r == 1 {
            (0, 0)
        } else if p == 2 {
            (1, 1) // s² = 1 + s
        } else {
            (smallest_nonresidue(p), 0)
        };
        let mul = |x: (u64, u64), y: (u64, u64)| -> (u64, u64) {
            if r == 1 {
                (x.0 * y.0 % p, 0)
            } else {
                let bb = x.1 * y.1 % p;
                (
                    (x.0 * y.0 + bb * sq.0) % p,
                    (x.0 * y.1 + x.1 * y.0 + bb * sq.1) % p,
                )
            }
        };
        // find a generator by brute force
        let mut gen = None;
        'search: for a in 0..p {
            for b in 0..if r == 2 { p } else { 1 } {
                if a == 0 && b == 0 {
                    continue;
                }
                let cand = (a, b);
                let mut x = cand;
                let mut ord = 1;
                while x != (1, 0) {
                    x = mul(x, cand);
                    ord += 1;
                    assert!(ord <= q, "order overflow; not a field");
                }
                if ord == q - 1 {
                    gen = Some(cand);
                    break 'search;
                }
            }
        }
        let g = gen.expect("finite field has a generator");
        let table_size = if r == 1 { q } else { p * p };
        let mut powers = Vec::with_capacity((q - 1) as usize);
        let mut dlog = vec![u64::MAX; table_size as usize];
        let mut x = (1u64, 0u64);
        for k in 0..q - 1 {
            powers.push(x);
            dlog[(x.0 + x.1 * p) as usize] = k;
            x = mul(x, g);
        }
        FiniteField {
            p,
            r,
            sq,
            powers,
            dlog,
        }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }

    pub fn generator(&self) -> (u64, u64) {
        self.powers[1]
    }

    pub fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        if self.r == 1 {
            (x.0 * y.0 % p, 0)
        } else {
            let bb = x.1 * y.1 % p;
            (
                (x.0 * y.0 + bb * self.sq.0) % p,
                (x.0 * y.1 + x.1 * y.0 + bb * self.sq.1) % p,
            )
        }
    }

    /// Trace to F_p.
    pub fn trace(&self, x: (u64, u64)) -> u64 {
        if self.r == 1 {
            x.0 % self.p
        } else {
            (2 * x.0 + self.sq.1 * x.1) % self.p
        }
    }

    /// Norm to F_p.
    pub fn norm(&self, x: (u64, u64)) -> u64 {
        if self.r == 1 {
            x.0 % self.p
        } else {
            let (a, b) = (x.0 as i128, x.1 as i128);
            let c0 = self.sq.0 as i128;
            let c1 = self.sq.1 as i128;
            (a * a + c1 * a * b - c0 * b * b).rem_euclid(self.p as i128) as u64
        }
    }

    pub fn dlog(&self, x: (u64, u64)) -> Option<u64> {
        let idx = (x.0 + x.1 * self.p) as usize;
        let d = self.dlog[idx];
        (d != u64::MAX).then_some(d)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.powers.iter().copied()
    }
}

/// A multiplicative character (exponent on the fixed generator) paired with
/// an additive character ψ_c(x) = e^{2πi·Tr(c·x)/p}.
#[derive(Clone, Debug)]
pub struct FiniteFieldCharacterPair {
    pub field: std::sync::Arc<FiniteField>,
    /// χ(g) as a rational angle; its order must divide q−1
    pub chi_at_gen: RationalAngle,
    /// the ψ-twist c (the canonical ψ has c = 1)
    pub psi_scale: (u64, u64),
}

impl FiniteFieldCharacterPair {
    /// χ = (generator ↦ e^{2πi·k/(q−1)}) with the canonical ψ.
    pub fn new(field: std::sync::Arc<FiniteField>, k: i64) -> Self {
        let q1 = field.q() as i64 - 1;
        FiniteFieldCharacterPair {
            field,
            chi_at_gen: RationalAngle::new(k, q1),
            psi_scale: (1, 0),
        }
    }

    pub fn chi_order(&self) -> u64 {
        self.chi_at_gen.order() as u64
    }

    pub fn chi_value(&self, x: (u64, u64)) -> Option<RationalAngle> {
        let d = self.field.dlog(x)?;
        Some(self.chi_at_gen.mul_int(d as i64))
    }
}

/// G(χ, ψ) = Σ_{x ∈ F_q^×} χ(x)·ψ(x), exact in Q(ζ_{lcm(q−1, p)}).
pub fn gauss_sum(pair: &FiniteFieldCharacterPair) -> CyclotomicNumber {
    let f = &pair.field;
    let p = f.p;
    let q1 = f.q() - 1;
    let order = (q1 as usize).lcm(&(p as usize));
    let mut acc = CyclotomicNumber::zero(order);
    for (k, x) in f.nonzero_elements().enumerate() {
        let chi = pair.chi_at_gen.mul_int(k as i64);
        let tr = f.trace(f.mul(x, pair.psi_scale));
        let psi = RationalAngle::new(tr as i64, p as i64);
        let term = chi.add(&psi);
        let exp = (term.numerator() as usize) * (order / term.denominator() as usize);
        acc.add_assign(&CyclotomicNumber::monomial(
            order,
            exp as i64,
            Rat::from_integer(1),
        ));
    }
    acc
}

/// Lift (χ, ψ) over F_p to (χ∘N, ψ∘Tr) over F_{p²}.
pub fn lift_pair(pair: &FiniteFieldCharacterPair) -> FiniteFieldCharacterPair {
    assert!(pair.field.r == 1);
    let p = pair.field.p;
    let big = std::sync::Arc::new(FiniteField::new(p, 2));
    let n_gen = big.norm(big.generator());
    let base_dlog = pair.field.dlog((n_gen, 0)).expect("norm of a unit");
    let chi_at_big_gen = pair.chi_at_gen.mul_int(base_dlog as i64);
    FiniteFieldCharacterPair {
        field: big,
        chi_at_gen: chi_at_big_gen,
        psi_scale: (pair.psi_scale.0, 0),
    }
}

/// G(χ', ψ') − (−1)^{r−1}·G(χ, ψ)^r for the norm/trace lift to F_{p²}
/// (the standard Davenport–Hasse form; zero iff the relation holds).
pub fn davenport_hasse_defect(pair: &FiniteFieldCharacterPair) -> CyclotomicNumber {
    assert!(pair.field.r == 1);
    assert!(!pair.chi_at_gen.is_zero(), "nontrivial character required");
    let lifted = lift_pair(pair);
    let g2 = gauss_sum(&lifted);
    let g1 = gauss_sum(pair);
    // r = 2: G(χ',ψ') − (−1)·G(χ,ψ)² = G' + G²
    g2.add(&g1.mul(&g1))
}

/// Stickelberger prediction for χ over F_{p²} of order m | p+1, following the
/// case analysis used downstream: +p for odd m with p ≡ 1 (mod 4), −p for
/// even m with (p+1)/m odd.  `None` marks the uncovered cases.
pub fn stickelberger_value(p: u64, m: u64) -> Option<i64> {
    if m <= 1 || (p + 1) % m != 0 {
        return None;
    }
    if m % 2 == 1 && p % 4 == 1 {
        Some(p as i64)
    } else if m % 2 == 0 && ((p + 1) / m) % 2 == 1 {
        Some(-(p as i64))
    } else {
        None
    }
}

/// Direct sum against the Stickelberger prediction for one character of
/// order m over F_{p²}.
pub fn stickelberger_check(p: u64, m: u64) -> Result<(Option<i64>, CyclotomicNumber)> {
    let f = std::sync::Arc::new(FiniteField::new(p, 2));
    let q1 = f.q() - 1;
    if m == 0 || q1 % m != 0 {
        return Err(Sym3Error::OutOfRange(format!(
            "no character of order {} over F_{}",
            m,
            f.q()
        )));
    }
    let pair = FiniteFieldCharacterPair::new(f, (q1 / m) as i64);
    let g = gauss_sum(&pair);
    Ok((stickelberger_value(p, m), g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn field(p: u64, r: u32) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(p, r))
    }

    #[test]
    fn trivial_chi_sums_to_minus_one() {
        let pair = FiniteFieldCharacterPair::new(field(7, 1), 0);
        assert_eq!(gauss_sum(&pair), CyclotomicNumber::from_int(-1));
        let pair2 = FiniteFieldCharacterPair::new(field(3, 2), 0);
        assert_eq!(gauss_sum(&pair2), CyclotomicNumber::from_int(-1));
    }

    #[test]
    fn quadratic_gauss_sum_values() {
        // p ≡ 1 (mod 4): G = √p;  p ≡ 3 (mod 4): G = i√p
        let g5 = gauss_sum(&FiniteFieldCharacterPair::new(field(5, 1), 2));
        assert_eq!(g5.abs_square(), CyclotomicNumber::from_int(5));
        let (re, im) = g5.embed_complex();
        assert!((re - 5f64.sqrt()).abs() < 1e-9 && im.abs() < 1e-9);
        let g3 = gauss_sum(&FiniteFieldCharacterPair::new(field(3, 1), 1));
        assert_eq!(g3.abs_square(), CyclotomicNumber::from_int(3));
        let (re, im) = g3.embed_complex();
        assert!(re.abs() < 1e-9 && (im - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn gauss_sum_modulus() {
        for p in [2u64, 3, 5, 7] {
            for r in [1u32, 2] {
                let f = field(p, r);
                let q1 = f.q() - 1;
                for k in 1..q1 {
                    let pair = FiniteFieldCharacterPair::new(Arc::clone(&f), k as i64);
                    let g = gauss_sum(&pair);
                    assert_eq!(
                        g.abs_square(),
                        CyclotomicNumber::from_int(f.q() as i128),
                        "p={} r={} k={}",
                        p,
                        r,
                        k
                    );
                }
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        // G(χ̄, ψ) = χ(−1)·conj(G(χ, ψ))
        let f = field(7, 1);
        for k in 1..6i64 {
            let pair = FiniteFieldCharacterPair::new(Arc::clone(&f), k);
            let conj_pair = FiniteFieldCharacterPair::new(Arc::clone(&f), -k);
            let minus_one = pair.chi_value((6, 0)).unwrap();
            let lhs = gauss_sum(&conj_pair);
            let rhs = gauss_sum(&pair)
                .conjugate()
                .mul(&CyclotomicNumber::from_angle(&minus_one));
            assert_eq!(lhs, rhs, "k={}", k);
        }
    }

    #[test]
    fn lift_examples() {
        // trivial lifts to trivial
        let triv = FiniteFieldCharacterPair::new(field(3, 1), 0);
        assert!(lift_pair(&triv).chi_at_gen.is_zero());
        // quadratic over F_3 lifts to the quadratic character of F_9^×
        let quad = FiniteFieldCharacterPair::new(field(3, 1), 1);
        let lifted = lift_pair(&quad);
        assert_eq!(lifted.chi_order(), 2);
        // order-4 over F_5 lifts to an order-4 character of F_25^×
        let quart = FiniteFieldCharacterPair::new(field(5, 1), 1);
        assert_eq!(lift_pair(&quart).chi_order(), 4);
    }

    #[test]
    fn davenport_hasse_small() {
        // p = 3, quadratic χ: G' = −G² = −(i√3)² = 3
        let quad = FiniteFieldCharacterPair::new(field(3, 1), 1);
        let lifted = gauss_sum(&lift_pair(&quad));
        assert_eq!(lifted, CyclotomicNumber::from_int(3));
        assert!(davenport_hasse_defect(&quad).is_zero());
        // p = 5, order-4 χ
        let quart = FiniteFieldCharacterPair::new(field(5, 1), 1);
        assert!(davenport_hasse_defect(&quart).is_zero());
    }

    #[test]
    fn stickelberger_cases() {
        // p=5, m=3 (odd, p ≡ 1 mod 4) → +5
        let (pred, g) = stickelberger_check(5, 3).unwrap();
        assert_eq!(pred, Some(5));
        assert_eq!(g, CyclotomicNumber::from_int(5));
        // p=5, m=6, (p+1)/m = 1 odd → −5
        let (pred, g) = stickelberger_check(5, 6).unwrap();
        assert_eq!(pred, Some(-5));
        assert_eq!(g, CyclotomicNumber::from_int(-5));
        // p=7, m=3: p ≡ 3 (mod 4), odd m → inapplicable
        let (pred, _) = stickelberger_check(7, 3).unwrap();
        assert_eq!(pred, None);
    }
}
