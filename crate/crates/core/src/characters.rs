//! Finite abelian unit groups of local fields at finite level, and
//! multiplicative/additive character arithmetic with conductor computation.
//!
//! Unit groups are built by exhaustive enumeration and a Smith-normal-form
//! decomposition, uniformly across Q_p, quadratic extensions and p = 2.
//! Characters are stored as one value (a rational angle) per SNF generator.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::angle::RationalAngle;
use crate::cyclotomic::FormalScalar;
use crate::error::{Result, Sym3Error};
use crate::fields::{additive_value, FieldKind, LocalFieldSpec, ResidueRing, RingElt};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// O_K^×/U_K^level as an explicit abelian group with dlog table.
pub struct UnitGroupModel {
    pub ring: ResidueRing,
    /// SNF generators; orders form a divisibility chain d_1 | d_2 | ...
    pub generators: Vec<RingElt>,
    pub orders: Vec<u64>,
    dlog: HashMap<u64, u64>,
    elements: Vec<u64>,
}

impl UnitGroupModel {
    pub fn order(&self) -> u64 {
        self.ring.unit_count()
    }

    pub fn field(&self) -> LocalFieldSpec {
        self.ring.field
    }

    pub fn level(&self) -> u32 {
        self.ring.level
    }

    /// Exponent vector of a unit over the SNF generators.
    pub fn dlog(&self, x: RingElt) -> Option<Vec<u64>> {
        let packed = *self.dlog.get(&self.ring.encode(x))?;
        Some(self.unpack(packed))
    }

    fn unpack(&self, mut packed: u64) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.orders.len());
        for &d in &self.orders {
            v.push(packed % d);
            packed /= d;
        }
        v
    }

    /// All units, indexed by packed dlog.
    pub fn elements(&self) -> impl Iterator<Item = (RingElt, Vec<u64>)> + '_ {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, &enc)| (self.ring.decode(enc), self.unpack(i as u64)))
    }

    pub fn contains(&self, x: RingElt) -> bool {
        self.dlog.contains_key(&self.ring.encode(x))
    }
}

/// Smith normal form of a relation matrix whose COLUMNS are relations on k
/// generators.  Returns (diag, W) where group ≅ ⊕ Z/diag[j] with the new
/// generators h_j = Π_i g_i^{W[i][j]}.
///
/// Row operations on the matrix change the generator basis and are mirrored
/// into W; column operations merely recombine relations.
fn snf_with_transform(mut m: Vec<Vec<i128>>) -> (Vec<i128>, Vec<Vec<i128>>) {
    let k = m.len();
    let mut w: Vec<Vec<i128>> = (0..k)
        .map(|i| (0..k).map(|j| i128::from(i == j)).collect())
        .collect();
    // row_i ← row_i + c·row_j  ⟹  h_j ← h_j·h_i^{−c}: col_j(W) −= c·col_i(W)
    for t in 0..k {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..k {
                for j in t..k {
                    if m[i][j] != 0
                        && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            if pi != t {
                m.swap(t, pi);
                for row in w.iter_mut() {
                    row.swap(t, pi);
                }
            }
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
            }
            let mut dirty = false;
            // clear column t below the pivot with row ops (mirrored:
            // row_i −= q·row_t on A means col_t += q·col_i on W)
            for i in t + 1..k {
                if m[i][t] != 0 {
                    let q = m[i][t].div_euclid(m[t][t]);
                    if q != 0 {
                        for j in 0..k {
                            m[i][j] -= q * m[t][j];
                        }
                        for row in w.iter_mut() {
                            let delta = q * row[i];
                            row[t] += delta;
                        }
                    }
                    if m[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            // clear row t right of the pivot with column ops (free)
            for j in t + 1..k {
                if m[t][j] != 0 {
                    let q = m[t][j].div_euclid(m[t][t]);
                    if q != 0 {
                        for i in 0..k {
                            m[i][j] -= q * m[i][t];
                        }
                    }
                    if m[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // pivot clean; enforce the divisibility chain
            let d = m[t][t];
            let mut fixed = true;
            'outer: for i in t + 1..k {
                for j in t + 1..k {
                    if m[i][j] % d != 0 {
                        // add row i to row t (mirrored) and restart the pivot
                        for jj in 0..k {
                            m[t][jj] += m[i][jj];
                        }
                        for row in w.iter_mut() {
                            let delta = row[t];
                            row[i] -= delta;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    let mut diag: Vec<i128> = (0..k).map(|i| m[i][i].abs()).collect();
    for i in 0..k.saturating_sub(1) {
        debug_assert!(
            diag[i] == 0 || diag[i + 1] % diag[i] == 0,
            "divisibility chain violated: {:?}",
            diag
        );
    }
    for d in diag.iter_mut() {
        if *d == 0 {
            *d = 1;
        }
    }
    (diag, w)
}

/// All products Π g_i^{e_i}, 0 ≤ e_i < orders[i], in mixed-radix order with
/// the first generator's digit fastest.  The table index is the packed dlog.
fn fill_products(
    ring: &ResidueRing,
    gens: &[RingElt],
    orders: &[u64],
) -> (Vec<u64>, HashMap<u64, u64>) {
    let total: u64 = orders.iter().product();
    let mut elems: Vec<u64> = Vec::with_capacity(total as usize);
    let mut index: HashMap<u64, u64> = HashMap::with_capacity(total as usize);
    elems.push(ring.encode(ring.one()));
    index.insert(ring.encode(ring.one()), 0);
    for (&g, &d) in gens.iter().zip(orders.iter()) {
        let block = elems.len();
        let mut power = ring.one();
        for _ in 1..d {
            power = ring.mul(power, g);
            for idx in 0..block {
                let v = ring.mul(power, ring.decode(elems[idx]));
                let enc = ring.encode(v);
                let prev = index.insert(enc, elems.len() as u64);
                assert!(prev.is_none(), "generators fail unique factorization");
                elems.push(enc);
            }
        }
    }
    assert_eq!(elems.len() as u64, total);
    (elems, index)
}

/// Build the unit group model at the given level.
pub fn build_unit_group_capped(
    field: LocalFieldSpec,
    level: u32,
    cap: u64,
) -> Result<UnitGroupModel> {
    let ring = ResidueRing::new(field, level);
    let order = ring.unit_count();
    if order > cap {
        return Err(Sym3Error::EnumerationTooLarge { order, cap });
    }
    // polycyclic generating sequence by greedy scan; the span list stays in
    // mixed-radix product order, so its index is a dlog over these generators
    let mut elems: Vec<u64> = Vec::with_capacity(order as usize);
    let mut index: HashMap<u64, u64> = HashMap::with_capacity(order as usize);
    elems.push(ring.encode(ring.one()));
    index.insert(ring.encode(ring.one()), 0);
    let mut gens: Vec<RingElt> = Vec::new();
    let mut gen_orders: Vec<u64> = Vec::new();
    for x in ring.units() {
        if elems.len() as u64 == order {
            break;
        }
        if index.contains_key(&ring.encode(x)) {
            continue;
        }
        // order of x modulo the current span
        let mut m = 1u64;
        let mut y = x;
        while !index.contains_key(&ring.encode(y)) {
            y = ring.mul(y, x);
            m += 1;
        }
        let block = elems.len();
        let mut power = ring.one();
        for _ in 1..m {
            power = ring.mul(power, x);
            for idx in 0..block {
                let v = ring.mul(power, ring.decode(elems[idx]));
                let enc = ring.encode(v);
                index.insert(enc, elems.len() as u64);
                elems.push(enc);
            }
        }
        gens.push(x);
        gen_orders.push(m);
    }
    assert_eq!(elems.len() as u64, order, "span must exhaust the units");

    let unpack_g = |mut packed: u64| -> Vec<u64> {
        gen_orders
            .iter()
            .map(|&d| {
                let e = packed % d;
                packed /= d;
                e
            })
            .collect()
    };

    // relations g_i^{m_i} = Π_{j<i} g_j^{r_ij}, then SNF
    let k = gens.len();
    let (orders, generators) = if k == 0 {
        (Vec::new(), Vec::new())
    } else {
        // column i is the relation g_i^{m_i}·Π g_j^{−r_ij} = 1
        let mut rel = vec![vec![0i128; k]; k];
        for i in 0..k {
            let gm = ring.pow(gens[i], gen_orders[i]);
            let r = unpack_g(index[&ring.encode(gm)]);
            for j in 0..k {
                rel[j][i] = -(r[j] as i128);
            }
            rel[i][i] += gen_orders[i] as i128;
        }
        let (diag, v) = snf_with_transform(rel);
        let mut out_orders = Vec::new();
        let mut out_gens = Vec::new();
        for j in 0..k {
            let d = diag[j] as u64;
            if d > 1 {
                let mut h = ring.one();
                for i in 0..k {
                    let e = v[i][j].rem_euclid(order as i128) as u64;
                    h = ring.mul(h, ring.pow(gens[i], e));
                }
                out_orders.push(d);
                out_gens.push(h);
            }
        }
        (out_orders, out_gens)
    };
    drop(index);
    drop(elems);

    // final table over the SNF basis; the fill asserts unique factorization
    let (elements, dlog) = fill_products(&ring, &generators, &orders);
    assert_eq!(elements.len() as u64, order, "SNF generators must span");

    Ok(UnitGroupModel {
        ring,
        generators,
        orders,
        dlog,
        elements,
    })
}

type ModelKey = (LocalFieldSpec, u32);
static MODEL_CACHE: Mutex<Option<HashMap<ModelKey, Arc<UnitGroupModel>>>> = Mutex::new(None);

/// Cached unit group model (default enumeration cap).
pub fn unit_group(field: LocalFieldSpec, level: u32) -> Result<Arc<UnitGroupModel>> {
    {
        let guard = MODEL_CACHE.lock().unwrap();
        if let Some(map) = guard.as_ref() {
            if let Some(m) = map.get(&(field, level)) {
                return Ok(Arc::clone(m));
            }
        }
    }
    let model = Arc::new(build_unit_group_capped(
        field,
        level,
        DEFAULT_ENUMERATION_CAP,
    )?);
    let mut guard = MODEL_CACHE.lock().unwrap();
    guard
        .get_or_insert_with(HashMap::new)
        .insert((field, level), Arc::clone(&model));
    Ok(model)
}

/// A character of K^× truncated at the model's level, with a formal value at
/// the uniformizer.
#[derive(Clone)]
pub struct MultiplicativeCharacter {
    pub group: Arc<UnitGroupModel>,
    /// χ(h_i) for the i-th SNF generator.
    pub unit_exponents: Vec<RationalAngle>,
    pub at_uniformizer: FormalScalar,
}

impl MultiplicativeCharacter {
    pub fn trivial(group: Arc<UnitGroupModel>) -> Self {
        let n = group.generators.len();
        MultiplicativeCharacter {
            group,
            unit_exponents: vec![RationalAngle::ZERO; n],
            at_uniformizer: FormalScalar::one(),
        }
    }

    pub fn new(
        group: Arc<UnitGroupModel>,
        unit_exponents: Vec<RationalAngle>,
        at_uniformizer: FormalScalar,
    ) -> Result<Self> {
        if unit_exponents.len() != group.generators.len() {
            return Err(Sym3Error::Schema {
                path: "unit_exponents".into(),
                message: format!(
                    "expected {} entries, got {}",
                    group.generators.len(),
                    unit_exponents.len()
                ),
            });
        }
        for (a, &d) in unit_exponents.iter().zip(group.orders.iter()) {
            if d % (a.denominator() as u64) != 0 {
                return Err(Sym3Error::Schema {
                    path: "unit_exponents".into(),
                    message: format!(
                        "value of order {} is not a {}-th root of unity",
                        a.denominator(),
                        d
                    ),
                });
            }
        }
        Ok(MultiplicativeCharacter {
            group,
            unit_exponents,
            at_uniformizer,
        })
    }

    /// Build from a value function on the SNF generators.
    pub fn from_values(
        group: Arc<UnitGroupModel>,
        f: impl Fn(RingElt) -> RationalAngle,
        at_uniformizer: FormalScalar,
    ) -> Result<Self> {
        let vals: Vec<RationalAngle> = group.generators.iter().map(|&g| f(g)).collect();
        Self::new(group, vals, at_uniformizer)
    }

    pub fn field(&self) -> LocalFieldSpec {
        self.group.field()
    }

    pub fn level(&self) -> u32 {
        self.group.level()
    }

    /// χ on a unit of the model.
    pub fn eval_unit(&self, x: RingElt) -> RationalAngle {
        let d = self
            .group
            .dlog(x)
            .expect("eval_unit: element is not a unit of the model");
        let mut acc = RationalAngle::ZERO;
        for (a, e) in self.unit_exponents.iter().zip(d.iter()) {
            acc = acc.add(&a.mul_int(*e as i64));
        }
        acc
    }

    /// χ on u·π^v given as a (unit, valuation) pair.
    pub fn eval(&self, unit: RingElt, valuation: i64) -> FormalScalar {
        let unit_part = FormalScalar::from_angle(&self.eval_unit(unit));
        unit_part.mul(&self.at_uniformizer.pow(valuation))
    }

    pub fn is_trivial_on_units(&self) -> bool {
        self.unit_exponents.iter().all(|a| a.is_zero())
    }

    /// Order of the induced character on O^×/U^level.
    pub fn order_on_units(&self) -> u64 {
        let mut ord = 1u64;
        for a in &self.unit_exponents {
            let d = a.denominator() as u64;
            ord = ord / num_integer::gcd(ord, d) * d;
        }
        ord
    }

    /// Conductor: smallest s with χ trivial on the image of U^s.
    pub fn conductor(&self) -> u32 {
        if self.is_trivial_on_units() {
            return 0;
        }
        let ring = &self.group.ring;
        let mut a = 1;
        for j in 1..ring.level {
            if ring
                .filtration_generators(j)
                .into_iter()
                .any(|g| !self.eval_unit(g).is_zero())
            {
                a = j + 1;
            }
        }
        a
    }

    pub fn power(&self, k: i64) -> Self {
        MultiplicativeCharacter {
            group: Arc::clone(&self.group),
            unit_exponents: self.unit_exponents.iter().map(|a| a.mul_int(k)).collect(),
            at_uniformizer: self.at_uniformizer.pow(k),
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        assert!(
            self.field() == other.field() && self.level() == other.level(),
            "characters live on different groups"
        );
        MultiplicativeCharacter {
            group: Arc::clone(&self.group),
            unit_exponents: self
                .unit_exponents
                .iter()
                .zip(other.unit_exponents.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
            at_uniformizer: self.at_uniformizer.mul(&other.at_uniformizer),
        }
    }

    pub fn inverse(&self) -> Self {
        self.power(-1)
    }

    /// Replace the formal value at the uniformizer.
    pub fn with_uniformizer_value(mut self, v: FormalScalar) -> Self {
        self.at_uniformizer = v;
        self
    }

    /// Same values on units (ignores the uniformizer value).
    pub fn eq_on_units(&self, other: &Self) -> bool {
        self.unit_exponents == other.unit_exponents
    }

    /// The same character materialized on the model at another level.
    ///
    /// Lowering the level requires the target to be at least the conductor;
    /// raising the level inflates through the projection of units.
    pub fn at_level(&self, new_level: u32) -> Result<Self> {
        if new_level == self.level() {
            return Ok(self.clone());
        }
        let target = unit_group(self.field(), new_level)?;
        if new_level < self.level() {
            let required = self.conductor();
            if new_level < required {
                return Err(Sym3Error::LevelTooLow {
                    level: new_level,
                    required,
                });
            }
            // lift target generators into the finer ring; χ is U^new_level-
            // invariant, so any lift evaluates consistently
            let big_ring = &self.group.ring;
            MultiplicativeCharacter::from_values(
                Arc::clone(&target),
                |g| self.eval_unit(big_ring.from_coords(g.a as i64, g.b as i64)),
                self.at_uniformizer.clone(),
            )
        } else {
            // project target generators down to the coarser ring
            let small = &self.group.ring;
            MultiplicativeCharacter::from_values(
                Arc::clone(&target),
                |g| self.eval_unit(small.from_coords(g.a as i64, g.b as i64)),
                self.at_uniformizer.clone(),
            )
        }
    }

    /// Product after aligning both characters to the max of the two levels.
    pub fn product_aligned(&self, other: &Self) -> Result<Self> {
        let lvl = self.level().max(other.level());
        Ok(self.at_level(lvl)?.product(&other.at_level(lvl)?))
    }
}

impl PartialEq for MultiplicativeCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.field() == other.field()
            && self.level() == other.level()
            && self.unit_exponents == other.unit_exponents
            && self.at_uniformizer == other.at_uniformizer
    }
}

impl std::fmt::Debug for MultiplicativeCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "χ[{:?} level {}]{:?} @π={}",
            self.field(),
            self.level(),
            self.unit_exponents,
            self.at_uniformizer
        )
    }
}

/// All characters of the model's unit group (trivial uniformizer value).
pub fn all_characters(group: &Arc<UnitGroupModel>) -> Vec<MultiplicativeCharacter> {
    let mut out = Vec::new();
    let k = group.orders.len();
    let mut digits = vec![0u64; k];
    loop {
        let exps: Vec<RationalAngle> = digits
            .iter()
            .zip(group.orders.iter())
            .map(|(&e, &d)| RationalAngle::new(e as i64, d as i64))
            .collect();
        out.push(MultiplicativeCharacter {
            group: Arc::clone(group),
            unit_exponents: exps,
            at_uniformizer: FormalScalar::one(),
        });
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            digits[pos] += 1;
            if digits[pos] < group.orders[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        if k == 0 {
            return out;
        }
    }
}

/// χ ∘ N_{K/Q_p} materialized on a unit model of K.
///
/// The K-model must be deep enough both to compute norms to the base level
/// and to realize the conductor predicted by the Tunnel formula.
pub fn inflate_by_norm(
    chi: &MultiplicativeCharacter,
    k_field: LocalFieldSpec,
    k_level: u32,
) -> Result<MultiplicativeCharacter> {
    assert!(matches!(chi.field().kind, FieldKind::Base));
    assert!(k_field.is_quadratic() && k_field.p == chi.field().p);
    let t = chi.level();
    let required = if k_field.f() == 2 { t } else { 2 * t - 1 };
    if k_level < required {
        return Err(Sym3Error::LevelTooLow {
            level: k_level,
            required,
        });
    }
    let kg = unit_group(k_field, k_level)?;
    let base_ring = &chi.group.ring;
    let norm_val = |x: RingElt| -> RingElt {
        let n = kg.ring.norm(x);
        base_ring.from_int((n % base_ring.a_mod) as i64)
    };
    debug_assert!(kg.ring.norm_modulus() % base_ring.a_mod == 0);
    // value at the uniformizer: N(π_K) = p^{2/e}·(unit)
    let at_unif = match k_field.kind {
        FieldKind::UnramifiedQuadratic => chi.at_uniformizer.pow(2),
        FieldKind::RamifiedQuadratic { .. } => {
            let n_pi = kg.ring.uniformizer_norm_exact();
            let p = k_field.p as i64;
            debug_assert!(n_pi % p == 0);
            let unit = base_ring.from_int(n_pi / p);
            chi.at_uniformizer
                .mul(&FormalScalar::from_angle(&chi.eval_unit(unit)))
        }
        FieldKind::Base => unreachable!(),
    };
    MultiplicativeCharacter::from_values(Arc::clone(&kg), |g| chi.eval_unit(norm_val(g)), at_unif)
}

/// κ^σ for the nontrivial automorphism σ of the quadratic field.
pub fn sigma_conjugate(kappa: &MultiplicativeCharacter) -> MultiplicativeCharacter {
    let ring = kappa.group.ring.clone();
    assert!(ring.field.is_quadratic());
    let vals: Vec<RationalAngle> = kappa
        .group
        .generators
        .iter()
        .map(|&g| kappa.eval_unit(ring.sigma(g)))
        .collect();
    // σ(π) = π·u with u = σ(π)/π a unit
    let u = ring.sigma_uniformizer_unit();
    let at_unif = kappa
        .at_uniformizer
        .mul(&FormalScalar::from_angle(&kappa.eval_unit(u)));
    MultiplicativeCharacter {
        group: Arc::clone(&kappa.group),
        unit_exponents: vals,
        at_uniformizer: at_unif,
    }
}

/// Restriction of a character of K^× to Q_p^×, materialized on a base model.
pub fn restrict_to_base(kappa: &MultiplicativeCharacter) -> Result<MultiplicativeCharacter> {
    let kf = kappa.field();
    assert!(kf.is_quadratic());
    let ring = &kappa.group.ring;
    let base_level = if kf.e() == 2 {
        kappa.level().div_ceil(2)
    } else {
        kappa.level()
    };
    let base = unit_group(LocalFieldSpec::base(kf.p), base_level)?;
    // κ(p): p = π_K^e · u_p
    let at_unif = match kf.kind {
        FieldKind::UnramifiedQuadratic => kappa.at_uniformizer.clone(),
        FieldKind::RamifiedQuadratic { .. } => {
            let u_p = p_over_pi_squared(ring);
            kappa
                .at_uniformizer
                .pow(2)
                .mul(&FormalScalar::from_angle(&kappa.eval_unit(u_p)))
        }
        FieldKind::Base => unreachable!(),
    };
    MultiplicativeCharacter::from_values(
        Arc::clone(&base),
        |g| kappa.eval_unit(ring.embed_base(g.a)),
        at_unif,
    )
}

/// The unit p/π² of a ramified quadratic ring.
pub fn p_over_pi_squared(ring: &ResidueRing) -> RingElt {
    let p = ring.p();
    let pi = ring.uniformizer();
    let sig_pi = ring.sigma(pi);
    let sq = ring.mul(sig_pi, sig_pi); // σ(π)², valuation 2, coords divisible by p
    debug_assert!(sq.a % p == 0 && sq.b % p == 0);
    let shifted = RingElt {
        a: sq.a / p,
        b: sq.b / p,
    };
    // p/π² = σ(π)²/N(π)² = (σ(π)²/p)·w0^{-2} with N(π) = p·w0
    let n_pi = ring.uniformizer_norm_exact();
    debug_assert!(n_pi % p as i64 == 0);
    let w0 = (n_pi / p as i64).rem_euclid(ring.a_mod as i64);
    let w0_inv = crate::fields::mod_inverse(w0, ring.a_mod as i64).expect("w0 unit");
    let w0_inv2 = ring.mul(
        ring.from_int(w0_inv),
        ring.from_int(w0_inv),
    );
    let u = ring.mul(shifted, w0_inv2);
    debug_assert!(ring.is_unit(u));
    u
}

/// An additive character u·p^v of the base field, composed with the trace on
/// quadratic extensions.
#[derive(Clone, Copy, Debug)]
pub struct AdditiveCharacter {
    pub field: LocalFieldSpec,
    pub scale_u: i64,
    pub scale_v: i64,
}

impl AdditiveCharacter {
    /// The canonical character φ_p(x) = e^{2πi{x}_p} (composed with Tr on K).
    pub fn canonical(field: LocalFieldSpec) -> Self {
        AdditiveCharacter {
            field,
            scale_u: 1,
            scale_v: 0,
        }
    }

    /// The conductor-(−1) character x ↦ φ_p(x/p), composed with Tr on K.
    pub fn conductor_minus_one(field: LocalFieldSpec) -> Self {
        AdditiveCharacter {
            field,
            scale_u: 1,
            scale_v: -1,
        }
    }

    /// n(φ): val_p(scale) on the base, (2/f)n + d(K/Q_p) after the trace.
    pub fn n(&self) -> i64 {
        match self.field.kind {
            FieldKind::Base => self.scale_v,
            FieldKind::UnramifiedQuadratic => self.scale_v,
            FieldKind::RamifiedQuadratic { .. } => {
                2 * self.scale_v + self.field.disc_val() as i64
            }
        }
    }

    /// Value at x/π^j for x in a residue ring of the same field.
    pub fn value(&self, ring: &ResidueRing, x: RingElt, j: i64) -> Result<RationalAngle> {
        assert!(ring.field == self.field);
        if j <= 0 {
            // x·π^{-j} is integral: scale the element instead
            let pi_pow = ring.pow(ring.uniformizer(), (-j) as u64);
            return additive_value(ring, self.scale_u, self.scale_v, ring.mul(x, pi_pow), 0);
        }
        additive_value(ring, self.scale_u, self.scale_v, x, j as u32)
    }

    /// Rescaled character x ↦ φ(a·x) for a = unit·p^w.
    pub fn rescale(&self, unit: i64, w: i64) -> Self {
        AdditiveCharacter {
            field: self.field,
            scale_u: self.scale_u * unit,
            scale_v: self.scale_v + w,
        }
    }
}

/// The canonical tame quadratic twist of Q_p^× (odd p): conductor p,
/// Legendre symbol on units, value 1 at p.
pub fn canonical_quadratic_twist(p: u64, level: u32) -> Result<MultiplicativeCharacter> {
    assert!(p % 2 == 1);
    let g = unit_group(LocalFieldSpec::base(p), level)?;
    MultiplicativeCharacter::from_values(
        Arc::clone(&g),
        |x| {
            if crate::fields::mod_pow(x.a % p, (p - 1) / 2, p) == 1 {
                RationalAngle::ZERO
            } else {
                RationalAngle::new(1, 2)
            }
        },
        FormalScalar::one(),
    )
}

/// The quadratic characters of Q_2^× attached to Q_2(√t), t ∈ {−1, 2, −2},
/// with the class-field-theoretic value χ(2) = +1 (2 is a norm in all three).
pub fn quadratic_twist_q2(t: i64, level: u32) -> Result<MultiplicativeCharacter> {
    assert!(matches!(t, -1 | 2 | -2));
    assert!(level >= 3);
    let g = unit_group(LocalFieldSpec::base(2), level)?;
    MultiplicativeCharacter::from_values(
        Arc::clone(&g),
        |x| {
            let u = x.a % 8;
            let minus_one = (u == 3 || u == 7) as i64; // (−1)^{(u−1)/2}
            let two = (u == 3 || u == 5) as i64; // (−1)^{(u²−1)/8}
            let e = match t {
                -1 => minus_one,
                2 => two,
                -2 => minus_one + two,
                _ => unreachable!(),
            };
            RationalAngle::new(e, 2)
        },
        FormalScalar::one(),
    )
}

/// ω_{K/Q_p}: the quadratic character of Q_p^× with kernel N(K^×).
pub fn norm_residue_character(
    k_field: LocalFieldSpec,
    level: u32,
) -> Result<MultiplicativeCharacter> {
    let p = k_field.p;
    let base = unit_group(LocalFieldSpec::base(p), level)?;
    match k_field.kind {
        FieldKind::Base => Ok(MultiplicativeCharacter::trivial(base)),
        FieldKind::UnramifiedQuadratic => {
            // unramified: trivial on units, −1 at p
            Ok(MultiplicativeCharacter::trivial(base).with_uniformizer_value(
                FormalScalar::from_angle(&RationalAngle::new(1, 2)),
            ))
        }
        FieldKind::RamifiedQuadratic { .. } if p % 2 == 1 => {
            let sym = k_field.norm_symbol_p();
            let chi = canonical_quadratic_twist(p, level)?;
            let at_p = if sym == 1 {
                RationalAngle::ZERO
            } else {
                RationalAngle::new(1, 2)
            };
            Ok(chi.with_uniformizer_value(FormalScalar::from_angle(&at_p)))
        }
        FieldKind::RamifiedQuadratic { .. } => {
            // p = 2: compute the norm group of units explicitly
            let delta = k_field.disc_val();
            assert!(level >= delta);
            let k_ring = ResidueRing::new(k_field, 2 * delta);
            let norm_mod = 1u64 << delta;
            let mut norms: std::collections::HashSet<u64> = std::collections::HashSet::new();
            for u in k_ring.units() {
                norms.insert(k_ring.norm(u) % norm_mod);
            }
            let n_pi = k_ring.uniformizer_norm_exact();
            debug_assert!(n_pi % 2 == 0);
            let two_unit = {
                // 2/N(π) = 1/w0 mod 2^δ
                let w0 = (n_pi / 2).rem_euclid(norm_mod as i64);
                crate::fields::mod_inverse(w0, norm_mod as i64).unwrap() as u64
            };
            let at_two = if norms.contains(&(two_unit % norm_mod)) {
                RationalAngle::ZERO
            } else {
                RationalAngle::new(1, 2)
            };
            MultiplicativeCharacter::from_values(
                Arc::clone(&base),
                |x| {
                    if norms.contains(&(x.a % norm_mod)) {
                        RationalAngle::ZERO
                    } else {
                        RationalAngle::new(1, 2)
                    }
                },
                FormalScalar::from_angle(&at_two),
            )
        }
    }
}

/// The p-part twist the variance protocol uses: the canonical tame quadratic
/// for odd p; χ_2 when the supercuspidal level is 2, χ_{−1} otherwise.
pub fn variance_twist(p: u64, level: u32, use_chi2: bool) -> Result<MultiplicativeCharacter> {
    if p == 2 {
        quadratic_twist_q2(if use_chi2 { 2 } else { -1 }, level.max(3))
    } else {
        canonical_quadratic_twist(p, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_q5_level1() {
        let g = unit_group(LocalFieldSpec::base(5), 1).unwrap();
        assert_eq!(g.orders, vec![4]);
    }

    #[test]
    fn unit_group_q2_level3() {
        let g = unit_group(LocalFieldSpec::base(2), 3).unwrap();
        assert_eq!(g.orders, vec![2, 2]);
    }

    #[test]
    fn unit_group_q2_level5() {
        let g = unit_group(LocalFieldSpec::base(2), 5).unwrap();
        assert_eq!(g.orders, vec![2, 8]);
    }

    #[test]
    fn unit_group_unramified_q3_level1() {
        let g = unit_group(LocalFieldSpec::unramified(3), 1).unwrap();
        assert_eq!(g.orders, vec![8]);
    }

    #[test]
    fn unit_group_q7_level2_cyclic() {
        let g = unit_group(LocalFieldSpec::base(7), 2).unwrap();
        assert_eq!(g.orders, vec![42]);
    }

    #[test]
    fn dlog_is_homomorphism() {
        let g = unit_group(LocalFieldSpec::unramified(3), 2).unwrap();
        let ring = &g.ring;
        let elts: Vec<RingElt> = ring.units().collect();
        for (i, &x) in elts.iter().enumerate().step_by(7) {
            let y = elts[(i * 13 + 5) % elts.len()];
            let dx = g.dlog(x).unwrap();
            let dy = g.dlog(y).unwrap();
            let dxy = g.dlog(ring.mul(x, y)).unwrap();
            for j in 0..g.orders.len() {
                assert_eq!((dx[j] + dy[j]) % g.orders[j], dxy[j]);
            }
        }
    }

    #[test]
    fn conductor_examples() {
        // trivial-on-units character → 0
        let g3 = unit_group(LocalFieldSpec::base(5), 3).unwrap();
        let triv = MultiplicativeCharacter::trivial(Arc::clone(&g3));
        assert_eq!(triv.conductor(), 0);
        // quadratic character of (Z/5)^× inflated to level 3 → 1
        let quad = canonical_quadratic_twist(5, 3).unwrap();
        assert_eq!(quad.conductor(), 1);
        // faithful character on (Z/9)^× → 2
        let g9 = unit_group(LocalFieldSpec::base(3), 2).unwrap();
        assert_eq!(g9.orders, vec![6]);
        let faithful = MultiplicativeCharacter::new(
            Arc::clone(&g9),
            vec![RationalAngle::new(1, 6)],
            FormalScalar::one(),
        )
        .unwrap();
        assert_eq!(faithful.conductor(), 2);
        // its cube has order 2 and conductor 1
        let cubed = faithful.power(3);
        assert_eq!(cubed.order_on_units(), 2);
        assert_eq!(cubed.conductor(), 1);
        // quadratic squared is trivial
        assert_eq!(quad.power(2).conductor(), 0);
    }

    #[test]
    fn conductor_power_never_grows() {
        let g = unit_group(LocalFieldSpec::base(3), 4).unwrap();
        for chi in all_characters(&g) {
            let a = chi.conductor();
            for k in 0..5 {
                assert!(chi.power(k).conductor() <= a);
            }
        }
    }

    #[test]
    fn inflate_tame_quadratic() {
        let chi = canonical_quadratic_twist(5, 1).unwrap();
        // unramified K: conductor stays 1
        let unram = inflate_by_norm(&chi, LocalFieldSpec::unramified(5), 2).unwrap();
        assert_eq!(unram.conductor(), 1);
        // ramified K: N(O_K^×) = (Z_p^×)², so χ∘N is unramified
        let ram = inflate_by_norm(&chi, LocalFieldSpec::ramified_plus(5), 2).unwrap();
        assert_eq!(ram.conductor(), 0);
        // trivial inflates to trivial
        let g = unit_group(LocalFieldSpec::base(5), 1).unwrap();
        let triv = MultiplicativeCharacter::trivial(g);
        let tk = inflate_by_norm(&triv, LocalFieldSpec::unramified(5), 1).unwrap();
        assert!(tk.is_trivial_on_units());
    }

    #[test]
    fn inflate_level_too_low() {
        let g = unit_group(LocalFieldSpec::base(3), 3).unwrap();
        let chi = MultiplicativeCharacter::new(
            Arc::clone(&g),
            vec![RationalAngle::new(1, g.orders[0] as i64)],
            FormalScalar::one(),
        )
        .unwrap();
        let err = inflate_by_norm(&chi, LocalFieldSpec::ramified_plus(3), 2);
        assert!(matches!(err, Err(Sym3Error::LevelTooLow { required: 5, .. })));
    }

    #[test]
    fn sigma_conjugate_frobenius_on_residue() {
        // unramified K over Q_3 at level 1: σ acts as x ↦ x³ on F_9^×
        let g = unit_group(LocalFieldSpec::unramified(3), 1).unwrap();
        let kappa = MultiplicativeCharacter::new(
            Arc::clone(&g),
            vec![RationalAngle::new(1, 8)],
            FormalScalar::one(),
        )
        .unwrap();
        let ks = sigma_conjugate(&kappa);
        assert!(ks.eq_on_units(&kappa.power(3)));
        // involution
        let kss = sigma_conjugate(&ks);
        assert!(kss.eq_on_units(&kappa));
        assert_eq!(kss.at_uniformizer, kappa.at_uniformizer);
    }

    #[test]
    fn sigma_fixed_character() {
        // a character pulled back from the base is σ-fixed
        let chi = canonical_quadratic_twist(3, 1).unwrap();
        let infl = inflate_by_norm(&chi, LocalFieldSpec::unramified(3), 1).unwrap();
        let s = sigma_conjugate(&infl);
        assert!(s.eq_on_units(&infl));
    }

    #[test]
    fn sigma_ramified_uniformizer_sign() {
        // σ(π) = −π for odd ramified K, so κ^σ(π) = κ(−1)·κ(π)
        let kf = LocalFieldSpec::ramified_plus(5);
        let g = unit_group(kf, 2).unwrap();
        for kappa in all_characters(&g) {
            let ks = sigma_conjugate(&kappa);
            let minus_one = g.ring.from_int(-1);
            let expected = kappa
                .at_uniformizer
                .mul(&FormalScalar::from_angle(&kappa.eval_unit(minus_one)));
            assert_eq!(ks.at_uniformizer, expected);
        }
    }

    #[test]
    fn tunnel_formula_small() {
        // f·a(χ∘N) = a(χ) + a(χω) − a(ω) for p = 3, levels ≤ 3
        for level in 1..=3u32 {
            let base = unit_group(LocalFieldSpec::base(3), level).unwrap();
            for k_field in [
                LocalFieldSpec::unramified(3),
                LocalFieldSpec::ramified_plus(3),
                LocalFieldSpec::ramified_minus(3),
            ] {
                let omega = norm_residue_character(k_field, level).unwrap();
                for chi in all_characters(&base) {
                    let f = k_field.f() as u32;
                    let a = chi.conductor();
                    let a_om = chi.product(&omega).conductor();
                    let om = omega.conductor();
                    let k_level = if f == 2 {
                        level
                    } else {
                        (2 * level).saturating_sub(1).max(1)
                    };
                    let inflated = inflate_by_norm(&chi, k_field, k_level).unwrap();
                    assert_eq!(
                        f * inflated.conductor(),
                        a + a_om - om,
                        "Tunnel fails for {:?} level {}",
                        k_field,
                        level
                    );
                }
            }
        }
    }

    #[test]
    fn q2_twist_values() {
        let chi_m1 = quadratic_twist_q2(-1, 3).unwrap();
        assert_eq!(chi_m1.conductor(), 2);
        let chi_2 = quadratic_twist_q2(2, 3).unwrap();
        assert_eq!(chi_2.conductor(), 3);
        let chi_m2 = quadratic_twist_q2(-2, 3).unwrap();
        assert_eq!(chi_m2.conductor(), 3);
        // kernels mod 8: χ_{−1}: {1,5}; χ_2: {1,7}; χ_{−2}: {1,3}
        let ring = &chi_m1.group.ring;
        let at = |chi: &MultiplicativeCharacter, u: i64| chi.eval_unit(ring.from_int(u));
        assert!(at(&chi_m1, 5).is_zero() && !at(&chi_m1, 3).is_zero());
        assert!(at(&chi_2, 7).is_zero() && !at(&chi_2, 3).is_zero());
        assert!(at(&chi_m2, 3).is_zero() && !at(&chi_m2, 5).is_zero());
    }

    #[test]
    fn norm_residue_characters() {
        // odd ramified: tame; unramified: unramified with ω(p) = −1
        let om = norm_residue_character(LocalFieldSpec::ramified_plus(5), 2).unwrap();
        assert_eq!(om.conductor(), 1);
        assert_eq!(om.at_uniformizer, FormalScalar::one());
        let om2 = norm_residue_character(LocalFieldSpec::ramified_minus(5), 2).unwrap();
        assert_eq!(
            om2.at_uniformizer,
            FormalScalar::from_angle(&RationalAngle::new(1, 2))
        );
        let omu = norm_residue_character(LocalFieldSpec::unramified(7), 2).unwrap();
        assert_eq!(omu.conductor(), 0);
        // p = 2: conductor equals the discriminant valuation
        for (t, delta) in [(-1i64, 2u32), (3, 2), (2, 3), (-2, 3), (6, 3), (-6, 3)] {
            let om = norm_residue_character(LocalFieldSpec::ramified2(t), 4).unwrap();
            assert_eq!(om.conductor(), delta, "t = {}", t);
        }
    }

    #[test]
    fn q2_norm_characters_match_hilbert_symbol() {
        // ω_{K/Q_2}(x) = (x, t)_2 for K = Q_2(√t)
        let eps = |u: i64| ((u - 1) / 2).rem_euclid(2); // u odd
        let om2 = |u: i64| ((u * u - 1) / 8).rem_euclid(2);
        let hilbert_unit = |u: i64, t: i64| -> bool {
            // (u, t)_2 = +1?
            if t % 2 != 0 {
                (eps(u) * eps(t)) % 2 == 0
            } else {
                let w = t / 2;
                (om2(u) + eps(u) * eps(w)) % 2 == 0
            }
        };
        let hilbert_two = |t: i64| -> bool {
            // (2, t)_2 = +1?
            if t % 2 != 0 {
                om2(t) % 2 == 0
            } else {
                om2(t / 2) % 2 == 0
            }
        };
        for t in [-1i64, 3, 2, -2, 6, -6] {
            let om = norm_residue_character(LocalFieldSpec::ramified2(t), 4).unwrap();
            let ring = &om.group.ring;
            for u in [1i64, 3, 5, 7, 9, 11, 13, 15] {
                assert_eq!(
                    om.eval_unit(ring.from_int(u)).is_zero(),
                    hilbert_unit(u, t),
                    "t={} u={}",
                    t,
                    u
                );
            }
            let at_two_trivial = om.at_uniformizer == FormalScalar::one();
            assert_eq!(at_two_trivial, hilbert_two(t), "t={} at 2", t);
        }
    }
}
