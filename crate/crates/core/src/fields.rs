//! Local fields at finite level: Q_p and its quadratic extensions, with
//! truncated residue-ring arithmetic.
//!
//! A quadratic extension is presented on the Z_p-basis (1, g) where g is the
//! chosen uniformizer (ramified) or a unit generator of the inertia lift
//! (unramified), with g² = c0 + c1·g.  At level L the ring models O_K/𝔭_K^L
//! with the 1-coordinate mod p^⌈L/e⌉ and the g-coordinate mod p^⌊L/e⌋.

use serde::{Deserialize, Serialize};

use crate::angle::RationalAngle;
use crate::error::{Result, Sym3Error};

/// Which quadratic extension of Q_p (or the base field itself).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Base,
    UnramifiedQuadratic,
    /// K = Q_p(√t).  For odd p, t is −p or −p·g with g the smallest
    /// quadratic nonresidue; for p = 2, t ∈ {−1, 3, 2, −2, 6, −6}.
    RamifiedQuadratic { t: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalFieldSpec {
    pub p: u64,
    pub kind: FieldKind,
}

/// Smallest quadratic nonresidue mod the odd prime p.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&g| mod_pow(g, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a nonresidue")
}

pub fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mm = m as u128;
    let mut acc: u128 = 1;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % mm;
        }
        base = base * base % mm;
        e >>= 1;
    }
    acc as u64
}

impl LocalFieldSpec {
    pub fn base(p: u64) -> Self {
        LocalFieldSpec {
            p,
            kind: FieldKind::Base,
        }
    }

    pub fn unramified(p: u64) -> Self {
        LocalFieldSpec {
            p,
            kind: FieldKind::UnramifiedQuadratic,
        }
    }

    /// Ramified quadratic with (p, K/Q_p) = +1, i.e. Q_p(√−p); odd p only.
    pub fn ramified_plus(p: u64) -> Self {
        assert!(p % 2 == 1);
        LocalFieldSpec {
            p,
            kind: FieldKind::RamifiedQuadratic { t: -(p as i64) },
        }
    }

    /// Ramified quadratic with (p, K/Q_p) = −1, i.e. Q_p(√−pg); odd p only.
    pub fn ramified_minus(p: u64) -> Self {
        assert!(p % 2 == 1);
        let g = smallest_nonresidue(p) as i64;
        LocalFieldSpec {
            p,
            kind: FieldKind::RamifiedQuadratic { t: -(p as i64) * g },
        }
    }

    /// One of the six ramified quadratic extensions of Q_2.
    pub fn ramified2(t: i64) -> Self {
        assert!(matches!(t, -1 | 3 | 2 | -2 | 6 | -6));
        LocalFieldSpec {
            p: 2,
            kind: FieldKind::RamifiedQuadratic { t },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Sym3Error::BadField(format!("{} is not prime", self.p)));
        }
        match self.kind {
            FieldKind::Base | FieldKind::UnramifiedQuadratic => Ok(()),
            FieldKind::RamifiedQuadratic { t } => {
                if self.p == 2 {
                    if matches!(t, -1 | 3 | 2 | -2 | 6 | -6) {
                        Ok(())
                    } else {
                        Err(Sym3Error::BadField(format!(
                            "t={} is not a ramified class over Q_2",
                            t
                        )))
                    }
                } else {
                    let p = self.p as i64;
                    let g = smallest_nonresidue(self.p) as i64;
                    if t == -p || t == -p * g {
                        Ok(())
                    } else {
                        Err(Sym3Error::BadField(format!(
                            "t={} must be -p or -p·{} over Q_{}",
                            t, g, p
                        )))
                    }
                }
            }
        }
    }

    pub fn is_quadratic(&self) -> bool {
        !matches!(self.kind, FieldKind::Base)
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        match self.kind {
            FieldKind::RamifiedQuadratic { .. } => 2,
            _ => 1,
        }
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        match self.kind {
            FieldKind::UnramifiedQuadratic => 2,
            _ => 1,
        }
    }

    /// Residue field size.
    pub fn residue_q(&self) -> u64 {
        self.p.pow(self.f())
    }

    /// Valuation of the discriminant over Q_p (0 for the base field).
    pub fn disc_val(&self) -> u32 {
        match self.kind {
            FieldKind::Base | FieldKind::UnramifiedQuadratic => 0,
            FieldKind::RamifiedQuadratic { t } => {
                if self.p == 2 {
                    if t == -1 || t == 3 {
                        2
                    } else {
                        3
                    }
                } else {
                    1
                }
            }
        }
    }

    /// The norm residue symbol (p, K/Q_p) for ramified quadratic K, odd p.
    pub fn norm_symbol_p(&self) -> i32 {
        match self.kind {
            FieldKind::RamifiedQuadratic { t } if self.p % 2 == 1 => {
                if t == -(self.p as i64) {
                    1
                } else {
                    -1
                }
            }
            _ => panic!("norm symbol defined for odd ramified quadratic only"),
        }
    }

    /// (c0, c1) with gen² = c0 + c1·gen, plus whether gen is the uniformizer.
    fn structure(&self) -> (i64, i64) {
        match self.kind {
            FieldKind::Base => (0, 0),
            FieldKind::UnramifiedQuadratic => {
                if self.p == 2 {
                    // gen = ω, ω² + ω + 1 = 0
                    (-1, -1)
                } else {
                    // gen = √u, u the smallest nonresidue
                    (smallest_nonresidue(self.p) as i64, 0)
                }
            }
            FieldKind::RamifiedQuadratic { t } => {
                if self.p == 2 && (t == -1 || t == 3) {
                    // gen = π = 1 + √t: π² = (t−1) + 2π
                    (t - 1, 2)
                } else {
                    // gen = π = √t
                    (t, 0)
                }
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// JSON form of a field spec: {"p":3,"kind":"unramified"} etc.
#[derive(Serialize, Deserialize)]
struct FieldSpecJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<i64>,
}

impl LocalFieldSpec {
    pub fn to_json(&self, include_p: bool) -> serde_json::Value {
        let (kind, t) = match self.kind {
            FieldKind::Base => ("base", None),
            FieldKind::UnramifiedQuadratic => ("unramified", None),
            FieldKind::RamifiedQuadratic { t } => ("ramified", Some(t)),
        };
        serde_json::to_value(FieldSpecJson {
            p: if include_p { Some(self.p) } else { None },
            kind: kind.to_string(),
            t,
        })
        .unwrap()
    }

    /// Parse from JSON, taking the prime from the value or from `default_p`.
    pub fn from_json(v: &serde_json::Value, default_p: Option<u64>) -> Result<Self> {
        let j: FieldSpecJson = serde_json::from_value(v.clone())?;
        let p = j.p.or(default_p).ok_or_else(|| Sym3Error::Schema {
            path: "field.p".into(),
            message: "missing prime".into(),
        })?;
        let kind = match j.kind.as_str() {
            "base" => FieldKind::Base,
            "unramified" => FieldKind::UnramifiedQuadratic,
            "ramified" => {
                let t = j.t.ok_or_else(|| Sym3Error::Schema {
                    path: "field.t".into(),
                    message: "ramified kind needs t".into(),
                })?;
                FieldKind::RamifiedQuadratic { t }
            }
            other => {
                return Err(Sym3Error::Schema {
                    path: "field.kind".into(),
                    message: format!("unknown kind `{}`", other),
                })
            }
        };
        let spec = LocalFieldSpec { p, kind };
        spec.validate()?;
        Ok(spec)
    }
}

/// O_K / 𝔭_K^level with explicit coordinates.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub field: LocalFieldSpec,
    pub level: u32,
    pub a_mod: u64,
    pub b_mod: u64,
    c0: i64,
    c1: i64,
}

/// Element a + b·gen of a residue ring (b = 0 in the base field).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RingElt {
    pub a: u64,
    pub b: u64,
}

impl ResidueRing {
    pub fn new(field: LocalFieldSpec, level: u32) -> Self {
        assert!(level >= 1);
        let p = field.p;
        let (c0, c1) = field.structure();
        let (a_mod, b_mod) = match field.kind {
            FieldKind::Base => (p.pow(level), 1),
            FieldKind::UnramifiedQuadratic => (p.pow(level), p.pow(level)),
            FieldKind::RamifiedQuadratic { .. } => (p.pow(level.div_ceil(2)), p.pow(level / 2)),
        };
        ResidueRing {
            field,
            level,
            a_mod,
            b_mod,
            c0,
            c1,
        }
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn zero(&self) -> RingElt {
        RingElt { a: 0, b: 0 }
    }

    pub fn one(&self) -> RingElt {
        RingElt { a: 1 % self.a_mod, b: 0 }
    }

    pub fn from_int(&self, x: i64) -> RingElt {
        RingElt {
            a: x.rem_euclid(self.a_mod as i64) as u64,
            b: 0,
        }
    }

    pub fn from_coords(&self, a: i64, b: i64) -> RingElt {
        RingElt {
            a: a.rem_euclid(self.a_mod as i64) as u64,
            b: if self.b_mod == 1 {
                0
            } else {
                b.rem_euclid(self.b_mod as i64) as u64
            },
        }
    }

    /// The uniformizer as a ring element: p for e = 1, gen for e = 2.
    pub fn uniformizer(&self) -> RingElt {
        match self.field.kind {
            FieldKind::Base | FieldKind::UnramifiedQuadratic => self.from_int(self.p() as i64),
            FieldKind::RamifiedQuadratic { .. } => RingElt { a: 0, b: 1 % self.b_mod },
        }
    }

    pub fn add(&self, x: RingElt, y: RingElt) -> RingElt {
        RingElt {
            a: (x.a + y.a) % self.a_mod,
            b: if self.b_mod == 1 { 0 } else { (x.b + y.b) % self.b_mod },
        }
    }

    pub fn sub(&self, x: RingElt, y: RingElt) -> RingElt {
        RingElt {
            a: (x.a + self.a_mod - y.a % self.a_mod) % self.a_mod,
            b: if self.b_mod == 1 {
                0
            } else {
                (x.b + self.b_mod - y.b % self.b_mod) % self.b_mod
            },
        }
    }

    pub fn mul(&self, x: RingElt, y: RingElt) -> RingElt {
        if self.b_mod == 1 {
            return RingElt {
                a: ((x.a as u128 * y.a as u128) % self.a_mod as u128) as u64,
                b: 0,
            };
        }
        // (a + b·g)(a' + b'·g) = aa' + bb'c0 + (ab' + a'b + bb'c1)·g
        let am = self.a_mod as i128;
        let bm = self.b_mod as i128;
        let (a, b, a2, b2) = (x.a as i128, x.b as i128, y.a as i128, y.b as i128);
        let bb = b * b2;
        let new_a = (a * a2 + bb % am * self.c0 as i128).rem_euclid(am);
        let new_b = (a * b2 + a2 * b + bb % bm * self.c1 as i128).rem_euclid(bm);
        RingElt {
            a: new_a as u64,
            b: new_b as u64,
        }
    }

    pub fn pow(&self, x: RingElt, mut e: u64) -> RingElt {
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Number of units of the quotient ring.
    pub fn unit_count(&self) -> u64 {
        let p = self.p();
        let l = self.level;
        match self.field.kind {
            FieldKind::Base => (p - 1) * p.pow(l - 1),
            FieldKind::UnramifiedQuadratic => (p * p - 1) * p.pow(2 * (l - 1)),
            FieldKind::RamifiedQuadratic { .. } => (p - 1) * p.pow(l - 1),
        }
    }

    /// 𝔭-adic valuation, `None` when indistinguishable from zero at this level.
    pub fn valuation(&self, x: RingElt) -> Option<u32> {
        let p = self.p();
        let va = if x.a == 0 {
            None
        } else {
            Some(int_val(x.a, p))
        };
        match self.field.kind {
            FieldKind::Base => va.filter(|&v| v < self.level),
            FieldKind::UnramifiedQuadratic => {
                let vb = if x.b == 0 { None } else { Some(int_val(x.b, p)) };
                let v = match (va, vb) {
                    (None, None) => return None,
                    (Some(v), None) | (None, Some(v)) => v,
                    (Some(v), Some(w)) => v.min(w),
                };
                (v < self.level).then_some(v)
            }
            FieldKind::RamifiedQuadratic { .. } => {
                let vb = if x.b == 0 { None } else { Some(int_val(x.b, p)) };
                let v = match (va, vb) {
                    (None, None) => return None,
                    (Some(v), None) => 2 * v,
                    (None, Some(w)) => 2 * w + 1,
                    (Some(v), Some(w)) => (2 * v).min(2 * w + 1),
                };
                (v < self.level).then_some(v)
            }
        }
    }

    pub fn is_unit(&self, x: RingElt) -> bool {
        self.valuation(x) == Some(0)
    }

    /// Inverse of a unit (via the unit group order).
    pub fn unit_inverse(&self, x: RingElt) -> RingElt {
        debug_assert!(self.is_unit(x));
        let inv = self.pow(x, self.unit_count() - 1);
        debug_assert!(self.mul(inv, x) == self.one());
        inv
    }

    /// The nontrivial automorphism σ (identity on the base field).
    pub fn sigma(&self, x: RingElt) -> RingElt {
        if matches!(self.field.kind, FieldKind::Base) {
            return x;
        }
        // σ(a + b·g) = (a + b·c1) − b·g
        let a = (x.a as i128 + x.b as i128 * self.c1 as i128).rem_euclid(self.a_mod as i128);
        RingElt {
            a: a as u64,
            b: (self.b_mod - x.b % self.b_mod) % self.b_mod,
        }
    }

    /// Trace to Q_p as an integer mod a_mod.
    pub fn trace(&self, x: RingElt) -> u64 {
        if matches!(self.field.kind, FieldKind::Base) {
            return x.a;
        }
        ((2 * x.a as i128 + self.c1 as i128 * x.b as i128).rem_euclid(self.a_mod as i128)) as u64
    }

    /// Norm to Q_p: a² + c1·ab − c0·b², as an integer mod `norm_modulus()`.
    pub fn norm(&self, x: RingElt) -> u64 {
        if matches!(self.field.kind, FieldKind::Base) {
            return x.a;
        }
        let m = self.norm_modulus() as i128;
        let (a, b) = (x.a as i128, x.b as i128);
        ((a * a + self.c1 as i128 * a * b - self.c0 as i128 * b * b).rem_euclid(m)) as u64
    }

    /// The modulus to which `norm` is determined: p^level (unramified) or
    /// p^⌈level/2⌉ (ramified).
    pub fn norm_modulus(&self) -> u64 {
        self.a_mod
    }

    /// Exact integer norm of the uniformizer: p (base), p² (unramified),
    /// −c0 (ramified, where π² = c0 + c1·π).
    pub fn uniformizer_norm_exact(&self) -> i64 {
        match self.field.kind {
            FieldKind::Base => self.p() as i64,
            FieldKind::UnramifiedQuadratic => (self.p() * self.p()) as i64,
            FieldKind::RamifiedQuadratic { .. } => -self.c0,
        }
    }

    /// σ(π)/π as a unit of the ring (trivial for e = 1).
    pub fn sigma_uniformizer_unit(&self) -> RingElt {
        match self.field.kind {
            FieldKind::Base | FieldKind::UnramifiedQuadratic => self.one(),
            FieldKind::RamifiedQuadratic { .. } => {
                // σ(π)/π = σ(π)²/N(π) = ((c1²+c0) − c1·π)/(−c0), entrywise
                // exact integer division
                let c0 = self.c0;
                let c1 = self.c1;
                let num_a = c1 * c1 + c0;
                assert!(num_a % c0 == 0 && c1 % c0 == 0 || c1 == 0);
                let a = if c1 == 0 { -1 } else { -(num_a / c0) };
                let b = if c1 == 0 { 0 } else { c1 / c0 };
                self.from_coords(a, b)
            }
        }
    }

    /// Embed an integer representative of a base-field element.
    pub fn embed_base(&self, a: u64) -> RingElt {
        RingElt {
            a: a % self.a_mod,
            b: 0,
        }
    }

    /// Representatives of the residue field (all classes, zero included),
    /// in lexicographic (a, b) order.
    pub fn residue_reps(&self) -> Vec<RingElt> {
        let p = self.p();
        match self.field.kind {
            FieldKind::UnramifiedQuadratic => {
                let mut v = Vec::with_capacity((p * p) as usize);
                for a in 0..p {
                    for b in 0..p {
                        v.push(RingElt { a, b });
                    }
                }
                v
            }
            _ => (0..p).map(|a| RingElt { a, b: 0 }).collect(),
        }
    }

    /// Canonical coset representatives of U^{j-1}/U^j (j ≥ 2): the elements
    /// 1 + c·π^{j-1} with c running over the residue representatives; for
    /// j = 1, lifts of the nonzero residue classes.
    pub fn unit_coset_reps(&self, j: u32) -> Vec<RingElt> {
        assert!(j >= 1 && j <= self.level);
        if j == 1 {
            return self
                .residue_reps()
                .into_iter()
                .filter(|&x| self.is_unit(x))
                .collect();
        }
        let pi_pow = self.pow(self.uniformizer(), (j - 1) as u64);
        self.residue_reps()
            .into_iter()
            .map(|c| self.add(self.one(), self.mul(c, pi_pow)))
            .collect()
    }

    /// Generators of the graded piece U^j/U^{j+1}: 1 + π^j·c over an
    /// F_p-basis c of the residue field.
    pub fn filtration_generators(&self, j: u32) -> Vec<RingElt> {
        assert!(j >= 1 && j <= self.level);
        let pi_pow = self.pow(self.uniformizer(), j as u64);
        let basis: Vec<RingElt> = match self.field.kind {
            FieldKind::UnramifiedQuadratic => {
                vec![RingElt { a: 1, b: 0 }, RingElt { a: 0, b: 1 }]
            }
            _ => vec![RingElt { a: 1, b: 0 }],
        };
        basis
            .into_iter()
            .map(|c| self.add(self.one(), self.mul(c, pi_pow)))
            .collect()
    }

    /// Deterministic enumeration of all units.
    pub fn units(&self) -> impl Iterator<Item = RingElt> + '_ {
        let bm = self.b_mod;
        (0..self.a_mod).flat_map(move |a| {
            (0..bm).filter_map(move |b| {
                let x = RingElt { a, b };
                self.is_unit(x).then_some(x)
            })
        })
    }

    pub fn encode(&self, x: RingElt) -> u64 {
        x.a + x.b * self.a_mod
    }

    pub fn decode(&self, code: u64) -> RingElt {
        RingElt {
            a: code % self.a_mod,
            b: code / self.a_mod,
        }
    }
}

fn int_val(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Value of the additive character x ↦ e^{2πi·{u·p^v·Tr(x·π^{−j})}_p} on the
/// canonical lift of `x` (Tr is the identity on the base field).
///
/// The canonical lift makes the value deterministic; mathematical
/// well-definedness on unit cosets is the caller's concern (it holds inside
/// epsilon-factor sums by the choice of c).
pub fn additive_value(
    ring: &ResidueRing,
    scale_u: i64,
    scale_v: i64,
    x: RingElt,
    j: u32,
) -> Result<RationalAngle> {
    let p = ring.p() as i64;
    let m = j as i64 - scale_v;
    if m <= 0 {
        return Ok(RationalAngle::ZERO);
    }
    let m = m as u32;
    let p_m = (p as u64)
        .checked_pow(m)
        .ok_or_else(|| Sym3Error::InsufficientPrecision("p^m overflow".into()))?
        as i64;
    let t_over_pj: i64 = match ring.field.kind {
        FieldKind::Base => (x.a as i128).rem_euclid(p_m as i128) as i64,
        FieldKind::UnramifiedQuadratic => {
            // exact integer trace of the canonical lift
            (2 * x.a as i128 + ring.c1 as i128 * x.b as i128).rem_euclid(p_m as i128) as i64
        }
        FieldKind::RamifiedQuadratic { .. } => {
            // x/π^j = x·σ(π)^j/N(π)^j with N(π) = −c0 = p·w0, so the value is
            // {u·T·w0^{−j}/p^m} with T = Tr(x·σ(π)^j) an ordinary integer.
            let work = ResidueRing::new(ring.field, 2 * m + 2 + 2 * j);
            let xw = work.from_coords(x.a as i64, x.b as i64);
            let sig_pi = work.sigma(work.uniformizer());
            let w = work.mul(xw, work.pow(sig_pi, j as u64));
            let tr = work.trace(w);
            let w0 = -work.c0 / p;
            debug_assert!((-work.c0) % p == 0);
            let w0_inv = mod_inverse(w0.rem_euclid(p_m), p_m)
                .ok_or_else(|| Sym3Error::InsufficientPrecision("w0 not invertible".into()))?;
            let mut acc = (tr as i128).rem_euclid(p_m as i128);
            for _ in 0..j {
                acc = acc * w0_inv as i128 % p_m as i128;
            }
            acc as i64
        }
    };
    Ok(RationalAngle::new(
        (scale_u.rem_euclid(p_m) as i128 * t_over_pj as i128).rem_euclid(p_m as i128) as i64,
        p_m,
    ))
}

pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_ring_arithmetic() {
        let r = ResidueRing::new(LocalFieldSpec::base(5), 3);
        assert_eq!(r.unit_count(), 100);
        let x = r.from_int(7);
        let y = r.from_int(18);
        assert_eq!(r.mul(x, y).a, 7 * 18 % 125);
        assert_eq!(r.valuation(r.from_int(50)), Some(2));
        assert_eq!(r.valuation(r.from_int(0)), None);
        assert_eq!(r.mul(r.unit_inverse(x), x), r.one());
    }

    #[test]
    fn unramified_ring_f9() {
        // Z_3[s]/(s²−2) at level 1 = F_9
        let r = ResidueRing::new(LocalFieldSpec::unramified(3), 1);
        assert_eq!(r.unit_count(), 8);
        let s = RingElt { a: 0, b: 1 };
        assert_eq!(r.mul(s, s), r.from_int(2));
        // 1 + s generates F_9^×
        let g = r.add(r.one(), s);
        assert_eq!(r.pow(g, 8), r.one());
        assert_ne!(r.pow(g, 4), r.one());
        // Frobenius is σ
        assert_eq!(r.sigma(s), r.pow(s, 3));
        assert_eq!(r.sigma(g), r.pow(g, 3));
    }

    #[test]
    fn ramified_ring_pi_square() {
        for spec in [
            LocalFieldSpec::ramified_plus(3),
            LocalFieldSpec::ramified_minus(3),
            LocalFieldSpec::ramified2(-1),
            LocalFieldSpec::ramified2(3),
            LocalFieldSpec::ramified2(2),
        ] {
            let r = ResidueRing::new(spec, 6);
            let pi = r.uniformizer();
            assert_eq!(r.valuation(pi), Some(1), "{:?}", spec);
            assert_eq!(r.valuation(r.mul(pi, pi)), Some(2), "{:?}", spec);
            // σ(π)/π is a unit u with u·π = σ(π)
            let u = r.sigma_uniformizer_unit();
            assert!(r.is_unit(u), "{:?}", spec);
            assert_eq!(r.mul(u, pi), r.sigma(pi), "{:?}", spec);
            // σ is an involution
            let x = r.add(r.from_int(1), pi);
            assert_eq!(r.sigma(r.sigma(x)), x);
            // norm is multiplicative on a couple of units
            let y = r.add(r.from_int(2), pi);
            let nm = |z| r.norm(z);
            assert_eq!(
                nm(r.mul(x, y)),
                (nm(x) as u128 * nm(y) as u128 % r.norm_modulus() as u128) as u64,
                "{:?}",
                spec
            );
        }
    }

    #[test]
    fn q2_sqrt_minus_one_uniformizer() {
        // Q_2(i): π = 1+i, π² = 2i, norm(π) = 2
        let r = ResidueRing::new(LocalFieldSpec::ramified2(-1), 8);
        let pi = r.uniformizer();
        assert_eq!(r.norm(pi) % 16, 2);
        assert_eq!(r.valuation(r.from_int(2)), Some(2));
    }

    #[test]
    fn additive_values() {
        // φ scale 1, x ∈ Z_p → angle 0
        let r = ResidueRing::new(LocalFieldSpec::base(5), 3);
        let v = additive_value(&r, 1, 0, r.from_int(7), 0).unwrap();
        assert!(v.is_zero());
        // φ scale 1/4 over Q_2: x=1 → 1/4, x=3 → 3/4
        let r2 = ResidueRing::new(LocalFieldSpec::base(2), 4);
        let v1 = additive_value(&r2, 1, 0, r2.from_int(1), 2).unwrap();
        let v3 = additive_value(&r2, 1, 0, r2.from_int(3), 2).unwrap();
        assert_eq!(v1, RationalAngle::new(1, 4));
        assert_eq!(v3, RationalAngle::new(3, 4));
        // φ_K = φ_2∘Tr on unramified K/Q_2, x = ω, scale 1/2:
        // Tr(ω) = −1 → angle 1/2
        let rk = ResidueRing::new(LocalFieldSpec::unramified(2), 3);
        let omega = RingElt { a: 0, b: 1 };
        let v = additive_value(&rk, 1, 0, omega, 1).unwrap();
        assert_eq!(v, RationalAngle::new(1, 2));
    }

    #[test]
    fn lexicographic_coset_reps() {
        let r = ResidueRing::new(LocalFieldSpec::ramified_plus(3), 4);
        let reps = r.unit_coset_reps(2);
        assert_eq!(reps.len(), 3);
        // 1, 1+π, 1+2π
        assert_eq!(reps[0], r.one());
        let pi = r.uniformizer();
        assert_eq!(reps[1], r.add(r.one(), pi));
    }

    #[test]
    fn field_spec_json_roundtrip() {
        let spec = LocalFieldSpec::ramified2(-6);
        let v = spec.to_json(true);
        let back = LocalFieldSpec::from_json(&v, None).unwrap();
        assert_eq!(spec, back);
        assert!(LocalFieldSpec::from_json(
            &serde_json::json!({"p": 5, "kind": "ramified", "t": 7}),
            None
        )
        .is_err());
    }
}
