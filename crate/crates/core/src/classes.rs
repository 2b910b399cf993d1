//! Semisimple classes as Weyl orbits of torsion points on dual tori,
//! Frobenius structures, the conorm on classes, and the factorization checks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::duality::{build_conorm, ConormData, DualityError};
use crate::folding::{FoldError, FoldedDatum};
use crate::gamma::{product_action, GammaAction, GammaError};
use crate::lattice::{smith_normal_form, solve_torsion_fixed, LatticeError, LatticeMap, TorsionVector};
use crate::root_datum::{dot, from_big, to_big, BasedRootDatum, RootDatum, RootDatumError, DEFAULT_WEYL_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("Weyl orbit exceeds {0} points")]
    WeylCap(usize),
    #[error("torsion point does not fit in 64-bit arithmetic")]
    Overflow,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid Frobenius structure: {0}")]
    Frobenius(String),
    #[error("point lies on a torus of rank {got}, expected {expected}")]
    Rank { expected: usize, got: usize },
    #[error("lifted class is not Frobenius-stable: {0}")]
    Unstable(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("sweep of {0} points exceeds the budget")]
    Budget(u128),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
}

pub type Result<T> = std::result::Result<T, ClassError>;

const SWEEP_BUDGET: u128 = 4_000_000;

/// Numerators reduced into `[0, den)` with `den` minimal.
fn reduce(den: i64, num: &mut [i64]) -> i64 {
    for x in num.iter_mut() {
        *x = x.rem_euclid(den);
    }
    let g = num.iter().fold(den, |g, &x| g.gcd(&x));
    for x in num.iter_mut() {
        *x /= g;
    }
    den / g
}

fn key_of(tv: &TorsionVector) -> Result<(i64, Vec<i64>)> {
    let den = tv.denominator().to_i64().ok_or(ClassError::Overflow)?;
    let num = tv.numerators().iter().map(|x| x.to_i64().ok_or(ClassError::Overflow)).collect::<Result<_>>()?;
    Ok((den, num))
}

fn from_key(den: i64, num: &[i64]) -> TorsionVector {
    TorsionVector::from_i64(num, den)
}

fn i64_rows(m: &LatticeMap) -> Result<Vec<Vec<i64>>> {
    m.to_i64_rows().map_err(|_| ClassError::Overflow)
}

fn apply_mod(rows: &[Vec<i64>], den: i64, x: &[i64]) -> Vec<i64> {
    rows.iter().map(|r| dot(r, x).rem_euclid(den)).collect()
}

/// `s ∈ T^*` as a torsion point of `X_*(T^*) ⊗ ℚ/ℤ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    pub datum: Arc<RootDatum>,
    pub value: TorsionVector,
}

impl TorusPoint {
    pub fn new(datum: Arc<RootDatum>, value: TorsionVector) -> Result<Self> {
        if value.rank() != datum.rank() {
            return Err(ClassError::Rank { expected: datum.rank(), got: value.rank() });
        }
        Ok(TorusPoint { datum, value })
    }

    pub fn order(&self) -> &BigInt {
        self.value.denominator()
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A geometric semisimple class, stored as the least member of its Weyl
/// orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricClass {
    pub representative: TorusPoint,
    pub orbit_size: usize,
}

impl GeometricClass {
    pub fn datum(&self) -> &RootDatum {
        &self.representative.datum
    }
}

impl PartialOrd for GeometricClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GeometricClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.representative.value.cmp(&other.representative.value)
    }
}

impl fmt::Display for GeometricClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative)
    }
}

/// The Weyl group of a based datum acting on cocharacter torsion points.
#[derive(Clone, Debug)]
pub struct OrbitSpace {
    datum: Arc<RootDatum>,
    base: BasedRootDatum,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
}

impl OrbitSpace {
    pub fn new(base: &BasedRootDatum) -> Self {
        let d = base.datum();
        OrbitSpace {
            datum: Arc::new(d.clone()),
            base: base.clone(),
            simple_roots: base.simple().iter().map(|&s| d.root(s).to_vec()).collect(),
            simple_coroots: base.simple().iter().map(|&s| d.coroot(s).to_vec()).collect(),
        }
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn base(&self) -> &BasedRootDatum {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn point(&self, value: TorsionVector) -> Result<TorusPoint> {
        TorusPoint::new(self.datum.clone(), value)
    }

    fn orbit_raw(&self, den: i64, num: &[i64]) -> Result<Vec<Vec<i64>>> {
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        seen.insert(num.to_vec());
        let mut out = vec![num.to_vec()];
        let mut head = 0;
        while head < out.len() {
            for (a, c) in self.simple_roots.iter().zip(&self.simple_coroots) {
                let x = &out[head];
                let k = dot(a, x);
                if k.rem_euclid(den) == 0 {
                    continue;
                }
                let y: Vec<i64> = x.iter().zip(c).map(|(&xi, &ci)| (xi - k * ci).rem_euclid(den)).collect();
                if seen.insert(y.clone()) {
                    if out.len() >= DEFAULT_WEYL_CAP {
                        return Err(ClassError::WeylCap(DEFAULT_WEYL_CAP));
                    }
                    out.push(y);
                }
            }
            head += 1;
        }
        Ok(out)
    }

    /// The full Weyl orbit of a point.
    pub fn orbit(&self, value: &TorsionVector) -> Result<Vec<TorsionVector>> {
        let (den, num) = key_of(value)?;
        Ok(self.orbit_raw(den, &num)?.iter().map(|x| from_key(den, x)).collect())
    }

    fn canonical_raw(&self, den: i64, num: &[i64]) -> Result<(Vec<i64>, usize)> {
        let orbit = self.orbit_raw(den, num)?;
        let size = orbit.len();
        Ok((orbit.into_iter().min().expect("orbit is non-empty"), size))
    }

    pub fn canonicalize(&self, value: &TorsionVector) -> Result<GeometricClass> {
        if value.rank() != self.rank() {
            return Err(ClassError::Rank { expected: self.rank(), got: value.rank() });
        }
        let (den, num) = key_of(value)?;
        let (rep, orbit_size) = self.canonical_raw(den, &num)?;
        Ok(GeometricClass { representative: self.point(from_key(den, &rep))?, orbit_size })
    }

    /// Roots `α` with `⟨α, s⟩ = 0` in ℚ/ℤ.
    pub fn centralizer_roots(&self, value: &TorsionVector) -> Vec<usize> {
        (0..self.datum.num_roots()).filter(|&i| value.pair(self.datum.root(i)).is_zero()).collect()
    }
}

pub fn canonicalize_class(datum: &RootDatum, point: &TorsionVector) -> Result<GeometricClass> {
    OrbitSpace::new(&datum.default_base()).canonicalize(point)
}

fn prime_of(q: u64) -> Result<u64> {
    if q < 2 {
        return Err(ClassError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q ≥ 2 has a prime factor");
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    if r != 1 {
        return Err(ClassError::NotPrimePower(q));
    }
    Ok(p)
}

/// `x ↦ q·τ(x)` on cocharacter torsion points of a dual datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusStructure {
    pub q: u64,
    pub p: u64,
    pub tau: LatticeMap,
}

impl FrobeniusStructure {
    pub fn new(q: u64, tau: LatticeMap) -> Result<Self> {
        let p = prime_of(q)?;
        if !tau.is_square() || !tau.is_unimodular() {
            return Err(ClassError::Frobenius("τ must be an automorphism of the lattice".into()));
        }
        Ok(FrobeniusStructure { q, p, tau })
    }

    pub fn split(q: u64, rank: usize) -> Result<Self> {
        Self::new(q, LatticeMap::identity(rank))
    }

    pub fn is_split(&self) -> bool {
        self.tau.is_identity()
    }

    pub fn matrix(&self) -> LatticeMap {
        self.tau.scaled(self.q as i64)
    }

    pub fn apply(&self, x: &TorsionVector) -> TorsionVector {
        x.apply(&self.matrix())
    }

    /// `τ` must carry simple coroots to simple coroots and its inverse
    /// transpose simple roots to the matching simple roots.
    pub fn validate_on(&self, base: &BasedRootDatum) -> Result<()> {
        let d = base.datum();
        if self.tau.codomain_rank() != d.rank() {
            return Err(ClassError::Frobenius("τ has the wrong rank".into()));
        }
        let tau_inv_t = self.tau.inverse().map_err(ClassError::Lattice)?.transpose();
        for &s in base.simple() {
            let c = from_big(&self.tau.apply(&to_big(d.coroot(s))));
            let r = from_big(&tau_inv_t.apply(&to_big(d.root(s))));
            match d.index_of(&r) {
                Some(j) if base.simple_position(j).is_some() && d.coroot(j) == c.as_slice() => {}
                _ => return Err(ClassError::Frobenius(format!("τ does not preserve the base at simple root {s}"))),
            }
        }
        Ok(())
    }
}

/// A Frobenius-stable geometric class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableClass {
    pub class: GeometricClass,
    pub frob: FrobeniusStructure,
}

impl StableClass {
    /// Checks stability and coprimality to `p`.
    pub fn check(&self, space: &OrbitSpace) -> Result<()> {
        let rep = &self.class.representative.value;
        let den = rep.denominator();
        if !den.gcd(&BigInt::from(self.frob.p)).is_one() {
            return Err(ClassError::Unstable(format!("{rep} has order divisible by {}", self.frob.p)));
        }
        let image = space.canonicalize(&self.frob.apply(rep))?;
        if image != self.class {
            return Err(ClassError::Unstable(format!("{rep} maps to the class {image}")));
        }
        Ok(())
    }
}

impl fmt::Display for StableClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)
    }
}

/// Representatives of `w ~ u·w·τuτ⁻¹` as cocharacter matrices.
pub fn twisted_class_representatives(base: &BasedRootDatum, tau: &LatticeMap) -> Result<Vec<LatticeMap>> {
    let n = base.rank();
    let w = base.weyl_group()?;
    let index: HashMap<&[i64], usize> = w.iter().enumerate().map(|(i, e)| (e.raw_cocharacter(), i)).collect();
    let tau_inv = tau.inverse()?;
    let gens: Vec<(LatticeMap, LatticeMap)> = base
        .simple()
        .iter()
        .map(|&s| {
            let rows: Vec<Vec<i64>> = base.datum().reflection_matrix(s).chunks(n).map(|r| r.to_vec()).collect();
            let c = LatticeMap::from_rows(&rows, n).expect("square").transpose();
            let t = tau.mul(&c).mul(&tau_inv);
            (c, t)
        })
        .collect();
    let mut class = vec![usize::MAX; w.len()];
    let mut reps = Vec::new();
    for start in 0..w.len() {
        if class[start] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(w[start].cocharacter_matrix());
        class[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let m = w[i].cocharacter_matrix();
            for (c, t) in &gens {
                let img = c.mul(&m).mul(t);
                let flat: Vec<i64> = i64_rows(&img)?.concat();
                let j = *index
                    .get(flat.as_slice())
                    .ok_or_else(|| ClassError::Frobenius("τ does not normalize the Weyl group".into()))?;
                if class[j] == usize::MAX {
                    class[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(reps)
}

pub fn enumerate_stable_classes(base: &BasedRootDatum, frob: &FrobeniusStructure) -> Result<Vec<StableClass>> {
    enumerate_stable_classes_in(&OrbitSpace::new(base), frob)
}

/// Fixed points of `w∘qτ` over twisted class representatives `w`, merged
/// into Weyl orbits.
pub fn enumerate_stable_classes_in(space: &OrbitSpace, frob: &FrobeniusStructure) -> Result<Vec<StableClass>> {
    frob.validate_on(space.base())?;
    let n = space.rank();
    let qtau = frob.matrix();
    let qtau_rows = i64_rows(&qtau)?;
    let mut owner: HashMap<(i64, Vec<i64>), usize> = HashMap::new();
    let mut found: Vec<(i64, Vec<i64>, usize)> = Vec::new();
    for w in twisted_class_representatives(space.base(), &frob.tau)? {
        let m = w.mul(&qtau);
        let det = m.sub(&LatticeMap::identity(n))?.det()?.abs();
        for x in solve_torsion_fixed(&m)? {
            let (den, num) = key_of(&x)?;
            if !(&det % BigInt::from(den)).is_zero() || den.gcd(&(frob.p as i64)) != 1 {
                return Err(ClassError::Unstable(format!("{x} has order not dividing {det} or not prime to p")));
            }
            if owner.contains_key(&(den, num.clone())) {
                continue;
            }
            let orbit = space.orbit_raw(den, &num)?;
            let id = found.len();
            let size = orbit.len();
            let rep = orbit.iter().min().expect("non-empty").clone();
            for o in orbit {
                owner.insert((den, o), id);
            }
            found.push((den, rep, size));
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for (id, (den, rep, size)) in found.iter().enumerate() {
        let img = apply_mod(&qtau_rows, *den, rep);
        if owner.get(&(*den, img)) != Some(&id) {
            return Err(ClassError::Unstable(format!("{} is not Frobenius-stable", from_key(*den, rep))));
        }
        out.push(StableClass {
            class: GeometricClass { representative: space.point(from_key(*den, rep))?, orbit_size: *size },
            frob: frob.clone(),
        });
    }
    out.sort_by(|a, b| a.class.cmp(&b.class));
    Ok(out)
}

fn order_of(m: &LatticeMap) -> usize {
    let mut p = m.clone();
    let mut k = 1;
    while !p.is_identity() {
        p = p.mul(m);
        k += 1;
    }
    k
}

/// Stable classes by sweeping every point whose order divides
/// `lcm(q^e − 1)` over the orders `e` of `wτ`.
pub fn brute_force_stable_classes(base: &BasedRootDatum, frob: &FrobeniusStructure) -> Result<Vec<GeometricClass>> {
    frob.validate_on(base)?;
    let space = OrbitSpace::new(base);
    let n = space.rank();
    let mut orders: HashSet<usize> = HashSet::new();
    for w in base.weyl_group()? {
        orders.insert(order_of(&w.cocharacter_matrix().mul(&frob.tau)));
    }
    let big_n = orders
        .iter()
        .map(|&e| (frob.q as i64).checked_pow(e as u32).map(|v| v - 1).ok_or(ClassError::Overflow))
        .try_fold(1i64, |l, v| v.map(|v| l.lcm(&v)))?;
    let total = (big_n as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > SWEEP_BUDGET {
        return Err(ClassError::Budget(total));
    }
    let qtau = i64_rows(&frob.matrix())?;
    let mut seen: HashSet<(i64, Vec<i64>)> = HashSet::new();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    for _ in 0..total {
        let mut num = x.clone();
        let den = reduce(big_n, &mut num);
        if !seen.contains(&(den, num.clone())) {
            let orbit = space.orbit_raw(den, &num)?;
            let img = apply_mod(&qtau, den, &num);
            let stable = orbit.contains(&img);
            let size = orbit.len();
            let rep = orbit.iter().min().expect("non-empty").clone();
            for o in orbit {
                seen.insert((den, o));
            }
            if stable {
                out.push(GeometricClass { representative: space.point(from_key(den, &rep))?, orbit_size: size });
            }
        }
        for xi in x.iter_mut() {
            *xi += 1;
            if *xi < big_n {
                break;
            }
            *xi = 0;
        }
    }
    out.sort();
    Ok(out)
}

/// Conorm data with the Weyl orbit spaces of `G^*` and `G̃^*`.
#[derive(Clone, Debug)]
pub struct ConormContext {
    pub cd: ConormData,
    pub small: OrbitSpace,
    pub big: OrbitSpace,
    conorm_rows: Vec<Vec<i64>>,
}

impl ConormContext {
    pub fn new(a: &GammaAction) -> Result<Self> {
        Self::from_conorm(build_conorm(a)?)
    }

    pub fn from_conorm(cd: ConormData) -> Result<Self> {
        let small = OrbitSpace::new(&cd.small_dual());
        let big = OrbitSpace::new(&cd.big_dual());
        let conorm_rows = i64_rows(&cd.conorm_matrix)?;
        Ok(ConormContext { cd, small, big, conorm_rows })
    }

    pub fn conorm_value(&self, x: &TorsionVector) -> Result<TorsionVector> {
        if x.rank() != self.small.rank() {
            return Err(ClassError::Rank { expected: self.small.rank(), got: x.rank() });
        }
        Ok(x.apply(&self.cd.conorm_matrix))
    }

    pub fn conorm_class(&self, c: &GeometricClass) -> Result<GeometricClass> {
        self.big.canonicalize(&self.conorm_value(&c.representative.value)?)
    }

    /// Every Weyl translate of `s` has conorm in a single orbit.
    pub fn check_well_defined(&self, s: &TorsionVector) -> Result<bool> {
        let (den, num) = key_of(s)?;
        let image = |x: &[i64]| -> (i64, Vec<i64>) {
            let mut y = apply_mod(&self.conorm_rows, den, x);
            let d = reduce(den, &mut y);
            (d, y)
        };
        let (d0, y0) = image(&num);
        let target: HashSet<Vec<i64>> = self.big.orbit_raw(d0, &y0)?.into_iter().collect();
        for x in self.small.orbit_raw(den, &num)? {
            let (d, y) = image(&x);
            if d != d0 || !target.contains(&y) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Frobenius of `G^*` induced from that of `G̃^*`.
    pub fn descend_frobenius(&self, big: &FrobeniusStructure) -> Result<FrobeniusStructure> {
        let f = self.cd.folded();
        let p = f.restriction();
        let tau = p.mul(&big.tau).mul(&f.lift().transpose());
        if p.mul(&big.tau) != tau.mul(p) {
            return Err(ClassError::Frobenius("τ̃ does not descend to the fixed torus".into()));
        }
        FrobeniusStructure::new(big.q, tau)
    }

    /// The action is defined over `k` for `big`, and `small` is its descent.
    pub fn check_frobenius_pair(&self, small: &FrobeniusStructure, big: &FrobeniusStructure) -> Result<()> {
        if small.q != big.q {
            return Err(ClassError::Frobenius("the two structures have different q".into()));
        }
        big.validate_on(self.big.base())?;
        small.validate_on(self.small.base())?;
        let a = self.cd.action();
        let g_big = self.cd.action().base().datum();
        for (g, d) in a.diagrams().iter().enumerate() {
            if d.mul(&big.tau) != big.tau.mul(d) {
                return Err(ClassError::Frobenius(format!("τ̃ does not commute with {}", a.group().name(g))));
            }
            let t = a.twist(g);
            for r in g_big.roots() {
                let tr = from_big(&big.tau.apply(&to_big(r)));
                if t.pair(r) != t.pair(&tr) {
                    return Err(ClassError::Frobenius(format!("twist of {} is not τ-invariant", a.group().name(g))));
                }
            }
        }
        if self.descend_frobenius(big)? != *small {
            return Err(ClassError::Frobenius("the structures do not correspond under folding".into()));
        }
        Ok(())
    }

    pub fn lift_stable_class(
        &self,
        sc: &StableClass,
        small: &FrobeniusStructure,
        big: &FrobeniusStructure,
    ) -> Result<StableClass> {
        if sc.frob != *small {
            return Err(ClassError::Frobenius("class carries a different Frobenius structure".into()));
        }
        self.check_frobenius_pair(small, big)?;
        let out = StableClass { class: self.conorm_class(&sc.class)?, frob: big.clone() };
        out.check(&self.big)?;
        Ok(out)
    }
}

pub fn conorm_point(cd: &ConormData, s: &TorusPoint) -> Result<TorusPoint> {
    if s.value.rank() != cd.conorm_matrix.domain_rank() {
        return Err(ClassError::Rank { expected: cd.conorm_matrix.domain_rank(), got: s.value.rank() });
    }
    TorusPoint::new(Arc::new(cd.big_dual().datum().clone()), s.value.apply(&cd.conorm_matrix))
}

pub fn conorm_class(cd: &ConormData, c: &GeometricClass) -> Result<GeometricClass> {
    let p = conorm_point(cd, &c.representative)?;
    OrbitSpace::new(&cd.big_dual()).canonicalize(&p.value)
}

pub fn lift_stable_class(
    cd: &ConormData,
    sc: &StableClass,
    small: &FrobeniusStructure,
    big: &FrobeniusStructure,
) -> Result<StableClass> {
    ConormContext::from_conorm(cd.clone())?.lift_stable_class(sc, small, big)
}

/// Outcome of a factorization check, with the first few mismatches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checks: Vec<(String, bool)>,
    pub classes_checked: usize,
    pub witnesses: Vec<String>,
}

impl CheckReport {
    fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), ..Default::default() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn witness(&mut self, w: String) {
        if self.witnesses.len() < 8 {
            self.witnesses.push(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok) && self.witnesses.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.name, if self.passed() { "PASS" } else { "FAIL" })?;
        for (what, ok) in &self.checks {
            writeln!(f, "  [{}] {what}", if *ok { "ok" } else { "FAIL" })?;
        }
        if self.classes_checked > 0 {
            writeln!(f, "  classes checked: {}", self.classes_checked)?;
        }
        for w in &self.witnesses {
            writeln!(f, "  witness: {w}")?;
        }
        Ok(())
    }
}

/// `ℤ/(r·m)` cycling `r` copies of `h`: the conorm is `x ↦ (m·x, …, m·x)`.
pub fn verify_product_conorm(r: usize, m: usize, h: &BasedRootDatum) -> Result<CheckReport> {
    let mut rep = CheckReport::new(format!("product conorm r={r} m={m}"));
    let a = product_action(h, r, m)?;
    let cd = build_conorm(&a)?;
    let n = h.rank();
    let mut first = LatticeMap::zero(n * r, n);
    first.set_block(0, 0, &LatticeMap::identity(n));
    let iota = cd.folded().restriction().mul(&first);
    rep.check("first factor maps isomorphically onto the fixed torus", iota.is_unimodular());
    let expected = (1..r).fold(LatticeMap::scalar(n, m as i64), |acc, _| {
        acc.vstack(&LatticeMap::scalar(n, m as i64)).expect("same width")
    });
    let ok = cd.conorm_matrix.mul(&iota) == expected;
    if !ok {
        rep.witness(format!("conorm is {} in factor coordinates", cd.conorm_matrix.mul(&iota)));
    }
    rep.check("conorm equals the diagonal m-th power", ok);
    Ok(rep)
}

/// Trivial action of order `m`: the conorm is `s ↦ s^m`, on matrices and
/// on stable classes.
pub fn verify_trivial_action(h: &BasedRootDatum, m: usize, qs: &[u64]) -> Result<CheckReport> {
    let mut rep = CheckReport::new(format!("trivial action of order {m}"));
    let ctx = ConormContext::new(&GammaAction::trivial(h.clone(), m))?;
    let f = ctx.cd.folded();
    let mi = LatticeMap::scalar(h.rank(), m as i64);
    rep.check("conorm is m times the identity", ctx.cd.conorm_matrix.mul(f.restriction()) == mi);
    let lt = f.lift().transpose();
    for &q in qs {
        let frob = FrobeniusStructure::split(q, ctx.small.rank())?;
        for sc in enumerate_stable_classes_in(&ctx.small, &frob)? {
            let x = &sc.class.representative.value;
            let lhs = ctx.conorm_class(&sc.class)?;
            let rhs = ctx.big.canonicalize(&x.apply(&lt).scale(m as i64))?;
            rep.classes_checked += 1;
            if lhs != rhs {
                rep.witness(format!("q={q}: {} ↦ {lhs}, power map gives {rhs}", sc.class));
            }
        }
    }
    Ok(rep)
}

/// Twist on the folded torus reproducing given root-space scalars on the
/// rows of `roots`.
fn solve_twist(roots: &LatticeMap, scalars: &[BigRational]) -> Option<TorsionVector> {
    let snf = smith_normal_form(roots);
    let d = snf.invariant_factors();
    let uc: Vec<BigRational> = (0..roots.codomain_rank())
        .map(|i| {
            (0..roots.codomain_rank())
                .fold(BigRational::zero(), |acc, j| acc + BigRational::from_integer(snf.u.get(i, j).clone()) * &scalars[j])
        })
        .collect();
    let cols = roots.domain_rank();
    let mut y = vec![BigRational::zero(); cols];
    for (i, c) in uc.iter().enumerate() {
        match d.get(i) {
            Some(di) if !di.is_zero() => y[i] = c / BigRational::from_integer(di.clone()),
            _ => {
                if !c.is_integer() {
                    return None;
                }
            }
        }
    }
    let t: Vec<BigRational> = (0..cols)
        .map(|i| (0..cols).fold(BigRational::zero(), |acc, j| acc + BigRational::from_integer(snf.v.get(i, j).clone()) * &y[j]))
        .collect();
    Some(TorsionVector::from_rationals(&t))
}

/// The action of `Γ/Γ₀` on the fold by `Γ₀`.
pub fn induced_quotient_action(a: &GammaAction, f0: &FoldedDatum, gamma0: &[usize]) -> Result<GammaAction> {
    let grp = a.group();
    let datum = a.base().datum();
    for &h in gamma0 {
        if datum.roots().iter().any(|r| !a.twist(h).pair(r).is_zero()) {
            return Err(ClassError::Unsupported("the normal subgroup must act by pinned automorphisms".into()));
        }
    }
    let (quot, coset) = grp.quotient(gamma0)?;
    let p0 = f0.restriction();
    let l0t = f0.lift().transpose();
    let fixed = f0.fixed();
    let fd = fixed.datum();
    let mut diagrams = Vec::new();
    let mut twists = Vec::new();
    for c in 0..quot.size() {
        let reps: Vec<usize> = (0..grp.size()).filter(|&g| coset[g] == c).collect();
        let d = p0.mul(a.diagram(reps[0])).mul(&l0t);
        for &g in &reps {
            if p0.mul(a.diagram(g)) != d.mul(p0) {
                return Err(ClassError::Precondition(format!("{} does not descend to the fold", grp.name(g))));
            }
        }
        let g = reps[0];
        let mut rows = Vec::new();
        let mut scal = Vec::new();
        for &s in fixed.simple() {
            let sources = &f0.provenance(s).sources;
            let c0 = a.root_space_scalar(g, sources[0]);
            if sources.iter().any(|&src| a.root_space_scalar(g, src) != c0) {
                return Err(ClassError::Unsupported(format!(
                    "{} acts with varying scalars on one orbit",
                    grp.name(g)
                )));
            }
            rows.push(from_big(&d.apply(&to_big(fd.root(s)))));
            scal.push(c0.value().clone());
        }
        let t = if rows.is_empty() {
            TorsionVector::zero(fd.rank())
        } else {
            let m = LatticeMap::from_rows(&rows, fd.rank())?;
            solve_twist(&m, &scal)
                .ok_or_else(|| ClassError::Unsupported("no torus element realizes the induced scalars".into()))?
        };
        diagrams.push(d);
        twists.push(t);
    }
    let qa = GammaAction::new(quot, fixed.clone(), diagrams, twists)?;
    let v = qa.validate();
    if !v.is_valid() {
        return Err(ClassError::Precondition(format!("induced quotient action is invalid: {v}")));
    }
    Ok(qa)
}

/// Conorm of `Γ` against the composite through the fold by a normal `Γ₀`.
pub fn verify_normal_subgroup_composition(a: &GammaAction, gamma0: &[usize], qs: &[u64]) -> Result<CheckReport> {
    let mut rep = CheckReport::new(format!("normal subgroup of order {}", gamma0.len()));
    let full = ConormContext::new(a)?;
    let a0 = a.restrict(gamma0)?;
    let inner = ConormContext::new(&a0)?;
    let qa = induced_quotient_action(a, inner.cd.folded(), gamma0)?;
    let outer = ConormContext::new(&qa)?;
    let p = full.cd.folded().restriction();
    let composite_p = outer.cd.folded().restriction().mul(inner.cd.folded().restriction());
    let psi = composite_p.mul(&full.cd.folded().lift().transpose());
    let same_torus = psi.is_unimodular() && psi.mul(p) == composite_p;
    rep.check("fixed tori agree", same_torus);
    if !same_torus {
        return Ok(rep);
    }
    let fd = full.cd.folded().fixed().datum();
    let od = outer.cd.folded().fixed().datum();
    let roots_match = fd.num_roots() == od.num_roots()
        && fd.roots().iter().all(|r| od.index_of(&from_big(&psi.apply(&to_big(r)))).is_some());
    rep.check("fixed root data agree", roots_match);
    let composite = inner.cd.conorm_matrix.mul(&outer.cd.conorm_matrix).mul(&psi);
    let ok = composite == full.cd.conorm_matrix;
    if !ok {
        rep.witness(format!("{} ≠ {}", composite, full.cd.conorm_matrix));
    }
    rep.check("conorm matrices factor", ok);
    for &q in qs {
        let frob = FrobeniusStructure::split(q, full.small.rank())?;
        for sc in enumerate_stable_classes_in(&full.small, &frob)? {
            let x = &sc.class.representative.value;
            let lhs = full.conorm_class(&sc.class)?;
            let mid = outer.conorm_class(&outer.small.canonicalize(&x.apply(&psi))?)?;
            let rhs = inner.conorm_class(&inner.small.canonicalize(&mid.representative.value)?)?;
            rep.classes_checked += 1;
            if lhs != rhs {
                rep.witness(format!("q={q}: {} ↦ {lhs} directly, {rhs} in two steps", sc.class));
            }
        }
    }
    Ok(rep)
}

/// Compares an action with its pinned projection: root systems of the duals,
/// conorm matrices and stable classes.
pub fn verify_pinning_factorization(a: &GammaAction, qs: &[u64]) -> Result<CheckReport> {
    let hyp = a.stabilizer_hypothesis();
    if !hyp.cyclic_faithful.holds() {
        return Err(ClassError::Precondition(format!("stabilizers: {}", hyp.cyclic_faithful)));
    }
    let mut rep = CheckReport::new("pinning factorization");
    let ctx = ConormContext::new(a)?;
    let under = ConormContext::new(&a.pinned_projection())?;
    let same_torus = ctx.cd.folded().restriction() == under.cd.folded().restriction();
    rep.check("same fixed torus", same_torus);
    if !same_torus {
        return Ok(rep);
    }
    let small = ctx.small.datum();
    let large = under.small.datum();
    let mut image = Vec::new();
    let mut embedded = true;
    for (r, c) in small.roots().iter().zip(small.coroots()) {
        match large.index_of(r) {
            Some(j) if large.coroot(j) == c.as_slice() => image.push(j),
            _ => {
                embedded = false;
                rep.witness(format!("dual root {r:?} is not a root of the pinned dual"));
            }
        }
    }
    rep.check("dual roots embed with matching coroots", embedded);
    rep.check("image is a closed subsystem", large.is_closed_subsystem(&image));
    rep.check("conorm matrices agree", ctx.cd.conorm_matrix == under.cd.conorm_matrix);
    for &q in qs {
        let frob = FrobeniusStructure::split(q, ctx.small.rank())?;
        for sc in enumerate_stable_classes_in(&ctx.small, &frob)? {
            let lhs = ctx.conorm_class(&sc.class)?;
            let j = under.small.canonicalize(&sc.class.representative.value)?;
            let rhs = under.conorm_class(&j)?;
            rep.classes_checked += 1;
            if lhs != rhs {
                rep.witness(format!("q={q}: {} ↦ {lhs}, through the pinned dual {rhs}", sc.class));
            }
        }
    }
    Ok(rep)
}

/// The Levi subsystem attached to a torus point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeviSubdatum {
    /// Roots vanishing on the point.
    pub centralizer: Vec<usize>,
    /// Roots in the rational span of the centralizer.
    pub roots: Vec<usize>,
    pub datum: RootDatum,
    pub proper: bool,
}

fn span_filter(candidates: &[Vec<i64>], spanning: &[Vec<i64>], rank: usize) -> Result<Vec<usize>> {
    if spanning.is_empty() {
        return Ok(candidates.iter().enumerate().filter(|(_, v)| v.iter().all(|&x| x == 0)).map(|(i, _)| i).collect());
    }
    let base = LatticeMap::from_columns(spanning, rank)?;
    let r = base.rank();
    let mut out = Vec::new();
    for (i, v) in candidates.iter().enumerate() {
        let mut cols = spanning.to_vec();
        cols.push(v.clone());
        if LatticeMap::from_columns(&cols, rank)?.rank() == r {
            out.push(i);
        }
    }
    Ok(out)
}

pub fn levi_for_element(datum: &RootDatum, s: &TorsionVector) -> Result<LeviSubdatum> {
    if s.rank() != datum.rank() {
        return Err(ClassError::Rank { expected: datum.rank(), got: s.rank() });
    }
    let centralizer: Vec<usize> = (0..datum.num_roots()).filter(|&i| s.pair(datum.root(i)).is_zero()).collect();
    let spanning: Vec<Vec<i64>> = centralizer.iter().map(|&i| datum.root(i).to_vec()).collect();
    let roots = span_filter(datum.roots(), &spanning, datum.rank())?;
    Ok(LeviSubdatum {
        proper: roots.len() < datum.num_roots(),
        datum: datum.sub_datum(&roots),
        centralizer,
        roots,
    })
}

/// Whether `roots` is spanned by the simple roots it contains.
fn is_standard(base: &BasedRootDatum, roots: &[usize]) -> bool {
    let set: HashSet<usize> = roots.iter().copied().collect();
    let simple: Vec<usize> = base.simple().iter().copied().filter(|s| set.contains(s)).collect();
    let positions: Vec<usize> = simple.iter().map(|&s| base.simple_position(s).expect("simple")).collect();
    let supported = (0..base.datum().num_roots())
        .filter(|&i| {
            base.coefficients(i)
                .iter()
                .enumerate()
                .all(|(k, &c)| c == 0 || positions.contains(&k))
        })
        .count();
    supported == roots.len()
}

/// Conorm of the class of `s` against the conorm of the Γ-stable Levi
/// matching the Levi of `s`.
pub fn verify_levi_factorization(a: &GammaAction, s: &TorsionVector) -> Result<CheckReport> {
    let ctx = ConormContext::new(a)?;
    let dual = ctx.small.base().clone();
    let levi = levi_for_element(dual.datum(), s)?;
    if !levi.proper {
        return Err(ClassError::Precondition(format!("{s} lies in no proper Levi subgroup")));
    }
    let (den, num) = key_of(s)?;
    let mut standard = None;
    let mut orbit = ctx.small.orbit_raw(den, &num)?;
    orbit.sort();
    for x in orbit {
        let l = levi_for_element(dual.datum(), &from_key(den, &x))?;
        if is_standard(&dual, &l.roots) {
            standard = Some((from_key(den, &x), l));
            break;
        }
    }
    let (s0, levi) = standard.expect("every Levi subsystem is conjugate to a standard one");
    let mut rep = CheckReport::new(format!("Levi factorization at {s}"));

    // The dual keeps root indices, so the same indices give the Levi of G.
    let f = ctx.cd.folded();
    let g_roots: Vec<Vec<i64>> = levi.roots.iter().map(|&i| f.fixed().datum().root(i).to_vec()).collect();
    let big = a.base();
    let restricted: Vec<Vec<i64>> = big.datum().roots().iter().map(|r| f.restrict(r)).collect();
    let up = span_filter(&restricted, &g_roots, f.fixed().rank())?;
    if !is_standard(big, &up) {
        return Err(ClassError::Unsupported("the Γ-stable Levi upstairs is not standard".into()));
    }
    let up_datum = big.datum().sub_datum(&up);
    let up_base = BasedRootDatum::from_positive(up_datum, |i| big.is_positive(up[i]))?;
    let la = GammaAction::new(a.group().clone(), up_base, a.diagrams().to_vec(), a.twists().to_vec())?;
    let lv = la.validate();
    rep.check("Γ preserves the Levi upstairs", lv.is_valid());
    let lctx = ConormContext::new(&la)?;
    rep.check("same fixed torus", lctx.cd.folded().restriction() == f.restriction());
    rep.check("same conorm matrix", lctx.cd.conorm_matrix == ctx.cd.conorm_matrix);
    let lfd = lctx.cd.folded().fixed().datum();
    let matches = lfd.num_roots() == g_roots.len() && g_roots.iter().all(|r| lfd.index_of(r).is_some());
    rep.check("fold of the Levi upstairs is the Levi of the fixed group", matches);
    let lhs = ctx.big.canonicalize(&ctx.conorm_value(s)?)?;
    let levi_class = lctx.small.canonicalize(&s0)?;
    let rhs = ctx.big.canonicalize(&lctx.conorm_value(&levi_class.representative.value)?)?;
    if lhs != rhs {
        rep.witness(format!("{s} ↦ {lhs}, through the Levi {rhs}"));
    }
    rep.classes_checked = 1;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::swap_twist_action;

    fn gl(n: usize) -> BasedRootDatum {
        let e = |i: usize| (0..n).map(|k| i64::from(k == i)).collect::<Vec<i64>>();
        let simple: Vec<Vec<i64>> =
            (0..n - 1).map(|i| e(i).iter().zip(e(i + 1)).map(|(a, b)| a - b).collect()).collect();
        BasedRootDatum::from_simple(n, &simple, &simple).unwrap()
    }

    fn gl_involution(n: usize) -> LatticeMap {
        let mut m = LatticeMap::zero(n, n);
        for i in 0..n {
            m.set(n - 1 - i, i, BigInt::from(-1));
        }
        m
    }

    fn pinned_gl(n: usize) -> GammaAction {
        GammaAction::cyclic(gl(n), 2, gl_involution(n), TorsionVector::zero(n)).unwrap()
    }

    fn so_twist(n: usize) -> GammaAction {
        let nums: Vec<i64> = (0..n).map(|i| i64::from(i % 2 == 1)).collect();
        GammaAction::cyclic(gl(n), 2, gl_involution(n), TorsionVector::from_i64(&nums, 2)).unwrap()
    }

    fn tv(n: &[i64], d: i64) -> TorsionVector {
        TorsionVector::from_i64(n, d)
    }

    #[test]
    fn canonical_forms() {
        let sl2 = BasedRootDatum::from_simple(1, &[vec![2]], &[vec![1]]).unwrap();
        let sp = OrbitSpace::new(&sl2);
        assert_eq!(sp.canonicalize(&tv(&[1], 3)).unwrap(), sp.canonicalize(&tv(&[2], 3)).unwrap());
        assert!(sp.canonicalize(&tv(&[0], 1)).unwrap().representative.value.is_zero());
        let g2 = OrbitSpace::new(&gl(2));
        let c = g2.canonicalize(&tv(&[1, 0], 2)).unwrap();
        assert_eq!(c, g2.canonicalize(&tv(&[0, 1], 2)).unwrap());
        assert_eq!(c.representative.value, tv(&[0, 1], 2));
        assert_eq!(c.orbit_size, 2);
        assert_eq!(canonicalize_class(gl(2).datum(), &tv(&[1, 0], 2)).unwrap(), c);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_of(4).unwrap(), 2);
        assert_eq!(prime_of(9).unwrap(), 3);
        assert_eq!(prime_of(6), Err(ClassError::NotPrimePower(6)));
    }

    #[test]
    fn gl_counts_match_sweep() {
        for n in 1..=2 {
            for q in 2..=5u64 {
                let frob = FrobeniusStructure::split(q, n).unwrap();
                let e = enumerate_stable_classes(&gl(n), &frob).unwrap();
                let expected = q.pow(n as u32 - 1) * (q - 1);
                assert_eq!(e.len() as u64, expected, "GL{n} q={q}");
                let b = brute_force_stable_classes(&gl(n), &frob).unwrap();
                let ec: Vec<_> = e.into_iter().map(|s| s.class).collect();
                assert_eq!(ec, b);
            }
        }
    }

    #[test]
    fn sl2_dual_matches_sweep() {
        let sl2 = BasedRootDatum::from_simple(1, &[vec![2]], &[vec![1]]).unwrap();
        let frob = FrobeniusStructure::split(3, 1).unwrap();
        let e = enumerate_stable_classes(&sl2, &frob).unwrap();
        let b = brute_force_stable_classes(&sl2, &frob).unwrap();
        assert_eq!(e.len(), b.len());
        // 3x = ±x leaves 0, 1/2 and ±1/4
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn twisted_frobenius_on_gl3() {
        // unitary groups: x ↦ −q·w0·x
        let tau = gl_involution(3);
        let frob = FrobeniusStructure::new(2, tau).unwrap();
        let e = enumerate_stable_classes(&gl(3), &frob).unwrap();
        let b = brute_force_stable_classes(&gl(3), &frob).unwrap();
        assert_eq!(e.len(), b.len());
        // q^2 (q+1) semisimple classes of U3(q)
        assert_eq!(e.len(), 12);
    }

    #[test]
    fn conorm_points_and_classes() {
        let sl2 = BasedRootDatum::from_simple(1, &[vec![2]], &[vec![1]]).unwrap();
        let ctx = ConormContext::new(&GammaAction::trivial(sl2, 2)).unwrap();
        let p = ctx.small.point(tv(&[1], 6)).unwrap();
        assert_eq!(conorm_point(&ctx.cd, &p).unwrap().value, tv(&[1], 3));
        let zero = ctx.small.canonicalize(&tv(&[0], 1)).unwrap();
        assert_eq!(conorm_class(&ctx.cd, &zero).unwrap(), ctx.big.canonicalize(&tv(&[0], 1)).unwrap());

        let swap = product_action(&gl(2), 2, 1).unwrap();
        let ctx = ConormContext::new(&swap).unwrap();
        let x = tv(&[1, 2], 5);
        let img = ctx.conorm_value(&x).unwrap();
        assert_eq!(img.rank(), 4);
        let nums: Vec<i64> = img.numerators().iter().map(|v| v.to_i64().unwrap()).collect();
        assert_eq!(nums[..2], nums[2..]);
    }

    #[test]
    fn well_definedness_on_gl4() {
        for a in [pinned_gl(4), so_twist(4)] {
            let ctx = ConormContext::new(&a).unwrap();
            for d in [2, 3, 5, 12] {
                for i in 0..d {
                    for j in 0..d {
                        assert!(ctx.check_well_defined(&tv(&[i, j], d)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn lifts_are_stable() {
        let ctx = ConormContext::new(&so_twist(4)).unwrap();
        let big = FrobeniusStructure::split(3, 4).unwrap();
        let small = ctx.descend_frobenius(&big).unwrap();
        assert!(small.is_split());
        let classes = enumerate_stable_classes_in(&ctx.small, &small).unwrap();
        assert!(!classes.is_empty());
        for sc in &classes {
            let l = ctx.lift_stable_class(sc, &small, &big).unwrap();
            if sc.class.representative.value.is_zero() {
                assert!(l.class.representative.value.is_zero());
            }
        }
        let g2 = ConormContext::new(&GammaAction::trivial(gl(2), 2)).unwrap();
        let f = FrobeniusStructure::split(3, 2).unwrap();
        for sc in enumerate_stable_classes_in(&g2.small, &f).unwrap() {
            let l = g2.lift_stable_class(&sc, &f, &f).unwrap();
            let x = &sc.class.representative.value;
            assert_eq!(l.class, g2.big.canonicalize(&x.scale(2)).unwrap());
        }
    }

    #[test]
    fn incompatible_frobenius_rejected() {
        let ctx = ConormContext::new(&pinned_gl(4)).unwrap();
        let big = FrobeniusStructure::split(3, 4).unwrap();
        let small = FrobeniusStructure::split(5, 2).unwrap();
        assert!(ctx.check_frobenius_pair(&small, &big).is_err());
    }

    #[test]
    fn product_and_trivial_identities() {
        for (r, m) in [(2, 1), (1, 1), (4, 1), (2, 2), (1, 3)] {
            assert!(verify_product_conorm(r, m, &gl(2)).unwrap().passed());
        }
        let rep = verify_trivial_action(&gl(2), 2, &[2, 3]).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(rep.classes_checked > 0);
    }

    #[test]
    fn normal_subgroup_composition() {
        let a = swap_twist_action(&gl(3), &gl_involution(3)).unwrap();
        for g0 in [vec![0, 2], vec![0, 1, 2, 3], vec![0]] {
            let rep = verify_normal_subgroup_composition(&a, &g0, &[2, 3]).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn pinning_factorization_gl4() {
        let rep = verify_pinning_factorization(&so_twist(4), &[2, 3]).unwrap();
        assert!(rep.passed(), "{rep}");
        let rep = verify_pinning_factorization(&pinned_gl(4), &[3]).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn levi_subsystems() {
        let d = gl(4);
        let full = levi_for_element(d.datum(), &tv(&[0, 0, 0, 0], 1)).unwrap();
        assert!(!full.proper);
        let l = levi_for_element(d.datum(), &tv(&[0, 0, 0, 1], 2)).unwrap();
        assert_eq!(l.datum.cartan_type().label(), "A2");
        let reg = levi_for_element(d.datum(), &tv(&[0, 1, 2, 3], 4)).unwrap();
        assert!(reg.roots.is_empty());
    }

    #[test]
    fn levi_factorization_on_gl4() {
        let a = pinned_gl(4);
        let ctx = ConormContext::new(&a).unwrap();
        let mut checked = 0;
        for d in [3, 5] {
            for i in 0..d {
                for j in 0..d {
                    let s = tv(&[i, j], d);
                    let l = levi_for_element(ctx.small.datum(), &s).unwrap();
                    if !l.proper {
                        continue;
                    }
                    let rep = verify_levi_factorization(&a, &s).unwrap();
                    assert!(rep.passed(), "{rep}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
        assert!(matches!(
            verify_levi_factorization(&a, &tv(&[0, 0], 1)),
            Err(ClassError::Precondition(_))
        ));
        let t = GammaAction::trivial(gl(2), 2);
        assert!(verify_levi_factorization(&t, &tv(&[0, 1], 3)).unwrap().passed());
    }
}
