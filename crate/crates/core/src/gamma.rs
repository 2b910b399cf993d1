//! Finite groups acting on a based root datum through pairs (diagram
//! automorphism, torus twist).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::chevalley::{propagate_scalars, root_image, ChevalleyError, StructureConstants};
use crate::lattice::{LatticeError, LatticeMap, Phase, TorsionVector};
use crate::root_datum::{BasedRootDatum, Family, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("invalid group table: {0}")]
    Group(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("action does not preserve the base: {0}")]
    NotQuasiSemisimple(String),
    #[error("inconsistent twist cocycle: {0}")]
    Cocycle(String),
    #[error(transparent)]
    Chevalley(#[from] ChevalleyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, GammaError>;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
}

impl FiniteGroup {
    pub fn new(mult: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(GammaError::Group("empty table".into()));
        }
        if mult.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GammaError::Group("table is not a square table of element indices".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mult[e][a] == a && mult[a][e] == a))
            .ok_or_else(|| GammaError::Group("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| mult[a][b] == identity && mult[b][a] == identity)
                .ok_or_else(|| GammaError::Group(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(GammaError::Group(format!("not associative on ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let names = match names {
            Some(v) if v.len() == n => v,
            Some(_) => return Err(GammaError::Group("wrong number of element names".into())),
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };
        Ok(FiniteGroup { mult, identity, inverse, names })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `ℤ/n` with element `k` standing for `γ^k`.
    pub fn cyclic(n: usize) -> Self {
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let names = (0..n).map(|k| if k == 0 { "e".to_string() } else { format!("γ^{k}") }).collect();
        FiniteGroup::new(mult, Some(names)).expect("cyclic group table")
    }

    /// Permutations of three points in lexicographic order; element 0 is the
    /// identity, 1 = (2 3), 2 = (1 2), 3 = (1 2 3), 4 = (1 3 2), 5 = (1 3).
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        // (a·b)(i) = a(b(i))
        let mult = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let names = perms.iter().map(|p| format!("{}{}{}", p[0] + 1, p[1] + 1, p[2] + 1)).collect();
        FiniteGroup::new(mult, Some(names)).expect("S3 table")
    }

    pub fn size(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.size()).any(|a| self.element_order(a) == self.size())
    }

    /// Closure of a generating set.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen: HashSet<usize> = HashSet::from([self.identity]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.sort();
        v
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let s: HashSet<usize> = set.iter().copied().collect();
        s.contains(&self.identity) && s.iter().all(|&a| s.iter().all(|&b| s.contains(&self.mul(a, self.inverse(b)))))
    }

    pub fn is_normal(&self, set: &[usize]) -> bool {
        let s: HashSet<usize> = set.iter().copied().collect();
        self.is_subgroup(set)
            && (0..self.size()).all(|g| s.iter().all(|&h| s.contains(&self.mul(self.mul(g, h), self.inverse(g)))))
    }

    /// The subgroup as a group of its own, with the inclusion map.
    pub fn subgroup(&self, set: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        if !self.is_subgroup(set) {
            return Err(GammaError::Group("not a subgroup".into()));
        }
        let mut elems: Vec<usize> = set.to_vec();
        elems.sort();
        elems.dedup();
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mult = elems.iter().map(|&a| elems.iter().map(|&b| pos[&self.mul(a, b)]).collect()).collect();
        let names = elems.iter().map(|&g| self.names[g].clone()).collect();
        Ok((FiniteGroup::new(mult, Some(names))?, elems))
    }

    /// Quotient by a normal subgroup, with the projection map. Cosets are
    /// numbered by their least element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        if !self.is_normal(normal) {
            return Err(GammaError::Group("not a normal subgroup".into()));
        }
        let n = self.size();
        let mut coset = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset[g] != usize::MAX {
                continue;
            }
            for &h in normal {
                coset[self.mul(g, h)] = reps.len();
            }
            reps.push(g);
        }
        let mult = reps.iter().map(|&a| reps.iter().map(|&b| coset[self.mul(a, b)]).collect()).collect();
        let names = reps.iter().map(|&g| format!("{}·N", self.names[g])).collect();
        Ok((FiniteGroup::new(mult, Some(names))?, coset))
    }
}

/// Γ acting on a based root datum: `φ(γ) = Int(t_γ) ∘ d_γ` with `d_γ`
/// preserving the base and `t_γ` a torsion point of the cocharacter torus,
/// meaningful only through the pairings `⟨α, t_γ⟩`.
#[derive(Clone, Debug)]
pub struct GammaAction {
    group: FiniteGroup,
    base: BasedRootDatum,
    diagram: Vec<LatticeMap>,
    cochar: Vec<LatticeMap>,
    twist: Vec<TorsionVector>,
    sc: StructureConstants,
    perm: Vec<Vec<usize>>,
    pinned: Vec<Vec<Phase>>,
}

impl GammaAction {
    /// Rejects diagrams that fail to permute the simple roots. Homomorphism
    /// and cocycle conditions are reported by [`GammaAction::validate`].
    pub fn new(
        group: FiniteGroup,
        base: BasedRootDatum,
        diagram: Vec<LatticeMap>,
        twist: Vec<TorsionVector>,
    ) -> Result<Self> {
        let sc = StructureConstants::build(&base);
        Self::with_constants(group, base, diagram, twist, sc)
    }

    pub fn with_constants(
        group: FiniteGroup,
        base: BasedRootDatum,
        diagram: Vec<LatticeMap>,
        twist: Vec<TorsionVector>,
        sc: StructureConstants,
    ) -> Result<Self> {
        let n = base.rank();
        if diagram.len() != group.size() || twist.len() != group.size() {
            return Err(GammaError::Shape("need one diagram and one twist per group element".into()));
        }
        let mut cochar = Vec::with_capacity(diagram.len());
        let mut perm = Vec::with_capacity(diagram.len());
        let mut pinned = Vec::with_capacity(diagram.len());
        for (g, (d, t)) in diagram.iter().zip(&twist).enumerate() {
            if d.codomain_rank() != n || d.domain_rank() != n || t.rank() != n {
                return Err(GammaError::Shape(format!("element {g} has the wrong rank")));
            }
            let inv = d
                .inverse()
                .map_err(|_| GammaError::NotQuasiSemisimple(format!("diagram of element {g} is not unimodular")))?;
            cochar.push(inv.transpose());
            let mut p = Vec::with_capacity(base.datum().num_roots());
            for i in 0..base.datum().num_roots() {
                p.push(root_image(&base, d, i).ok_or_else(|| {
                    GammaError::NotQuasiSemisimple(format!("element {g} does not preserve the roots"))
                })?);
            }
            for &s in base.simple() {
                if base.simple_position(p[s]).is_none() {
                    return Err(GammaError::NotQuasiSemisimple(format!(
                        "element {g} sends a simple root outside the base"
                    )));
                }
            }
            let zeros = vec![Phase::zero(); base.simple().len()];
            pinned.push(propagate_scalars(&sc, d, &zeros)?);
            perm.push(p);
        }
        Ok(GammaAction { group, base, diagram, cochar, twist, sc, perm, pinned })
    }

    /// Extends images of generators to the whole group by breadth-first
    /// search, using `d_{γg} = d_γ d_g` and `t_{γg} = t_γ + d_γ·t_g`.
    pub fn from_generators(
        group: FiniteGroup,
        base: BasedRootDatum,
        generators: &[(usize, LatticeMap, TorsionVector)],
    ) -> Result<Self> {
        let n = base.rank();
        let size = group.size();
        let mut diagram: Vec<Option<LatticeMap>> = vec![None; size];
        let mut twist: Vec<Option<TorsionVector>> = vec![None; size];
        diagram[group.identity()] = Some(LatticeMap::identity(n));
        twist[group.identity()] = Some(TorsionVector::zero(n));
        let mut queue = VecDeque::from([group.identity()]);
        for (_, d, _) in generators {
            if !d.is_unimodular() {
                return Err(GammaError::NotQuasiSemisimple("generator is not unimodular".into()));
            }
        }
        let datum = base.datum().clone();
        while let Some(x) = queue.pop_front() {
            let dx = diagram[x].clone().unwrap();
            let tx = twist[x].clone().unwrap();
            let cx = dx.inverse()?.transpose();
            for (g, dg, tg) in generators {
                let y = group.mul(x, *g);
                let dy = dx.mul(dg);
                let ty = tx.add(&tg.apply(&cx));
                match &diagram[y] {
                    None => {
                        diagram[y] = Some(dy);
                        twist[y] = Some(ty);
                        queue.push_back(y);
                    }
                    Some(existing) => {
                        if *existing != dy {
                            return Err(GammaError::Cocycle(format!(
                                "diagram images do not define a homomorphism at element {}",
                                group.name(y)
                            )));
                        }
                        let old = twist[y].as_ref().unwrap();
                        for r in datum.roots() {
                            if old.pair(r) != ty.pair(r) {
                                return Err(GammaError::Cocycle(format!(
                                    "twist images disagree at element {} on root {r:?}",
                                    group.name(y)
                                )));
                            }
                        }
                    }
                }
            }
        }
        if diagram.iter().any(|d| d.is_none()) {
            return Err(GammaError::Group("generators do not generate the group".into()));
        }
        GammaAction::new(
            group,
            base,
            diagram.into_iter().map(|d| d.unwrap()).collect(),
            twist.into_iter().map(|t| t.unwrap()).collect(),
        )
    }

    /// ℤ/m acting trivially.
    pub fn trivial(base: BasedRootDatum, m: usize) -> Self {
        let n = base.rank();
        GammaAction::new(
            FiniteGroup::cyclic(m),
            base,
            vec![LatticeMap::identity(n); m],
            vec![TorsionVector::zero(n); m],
        )
        .expect("trivial action")
    }

    /// ℤ/order generated by one (diagram, twist) pair.
    pub fn cyclic(base: BasedRootDatum, order: usize, diagram: LatticeMap, twist: TorsionVector) -> Result<Self> {
        let group = FiniteGroup::cyclic(order);
        let g = if order > 1 { 1 } else { 0 };
        GammaAction::from_generators(group, base, &[(g, diagram, twist)])
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn base(&self) -> &BasedRootDatum {
        &self.base
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    /// `d_γ` on characters.
    pub fn diagram(&self, g: usize) -> &LatticeMap {
        &self.diagram[g]
    }

    pub fn diagrams(&self) -> &[LatticeMap] {
        &self.diagram
    }

    /// `d_γ` on cocharacters, the inverse transpose of [`GammaAction::diagram`].
    pub fn cocharacter_diagram(&self, g: usize) -> &LatticeMap {
        &self.cochar[g]
    }

    pub fn cocharacter_diagrams(&self) -> &[LatticeMap] {
        &self.cochar
    }

    pub fn twist(&self, g: usize) -> &TorsionVector {
        &self.twist[g]
    }

    pub fn twists(&self) -> &[TorsionVector] {
        &self.twist
    }

    /// Index of `γ(α)`.
    pub fn act_root(&self, g: usize, root: usize) -> usize {
        self.perm[g][root]
    }

    pub fn is_pinned(&self) -> bool {
        (0..self.group.size()).all(|g| self.base.datum().roots().iter().all(|r| self.twist[g].pair(r).is_zero()))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let datum = self.base.datum();
        let grp = &self.group;
        if !self.diagram[grp.identity()].is_identity() {
            rep.push("identity element does not act trivially on the lattice");
        }
        for a in 0..grp.size() {
            if !self.diagram[a].is_unimodular() {
                rep.push(format!("diagram of {} is not unimodular", grp.name(a)));
            }
            for b in 0..grp.size() {
                let ab = grp.mul(a, b);
                if self.diagram[ab] != self.diagram[a].mul(&self.diagram[b]) {
                    rep.push(format!("diagram is not a homomorphism at ({}, {})", grp.name(a), grp.name(b)));
                }
            }
        }
        for g in 0..grp.size() {
            for i in 0..datum.num_roots() {
                let j = self.perm[g][i];
                let img = crate::root_datum::from_big(
                    &self.cochar[g].apply(&crate::root_datum::to_big(datum.coroot(i))),
                );
                if img != datum.coroot(j) {
                    rep.push(format!("{} does not carry coroot {i} to the coroot of its image", grp.name(g)));
                }
            }
            for &s in self.base.simple() {
                if self.base.simple_position(self.perm[g][s]).is_none() {
                    rep.push(format!("{} does not preserve the simple roots", grp.name(g)));
                }
            }
        }
        for a in 0..grp.size() {
            for b in 0..grp.size() {
                let ab = grp.mul(a, b);
                let composed = self.twist[a].add(&self.twist[b].apply(&self.cochar[a]));
                for (i, r) in datum.roots().iter().enumerate() {
                    if self.twist[ab].pair(r) != composed.pair(r) {
                        rep.push(format!(
                            "twist cocycle fails at ({}, {}) on root {i}: {} ≠ {}",
                            grp.name(a),
                            grp.name(b),
                            self.twist[ab].pair(r),
                            composed.pair(r)
                        ));
                        break;
                    }
                }
            }
        }
        rep
    }

    /// Same diagrams, all twists zero.
    pub fn pinned_projection(&self) -> GammaAction {
        let n = self.rank();
        let mut a = self.clone();
        a.twist = vec![TorsionVector::zero(n); self.group.size()];
        a
    }

    pub fn root_orbit(&self, root: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.group.size()).map(|g| self.perm[g][root]).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn root_stabilizer(&self, root: usize) -> Vec<usize> {
        (0..self.group.size()).filter(|&g| self.perm[g][root] == root).collect()
    }

    /// Exponent `c` with `φ(γ) X_α = ζ^c X_{γα}`.
    pub fn root_space_scalar(&self, g: usize, root: usize) -> Phase {
        let image = self.perm[g][root];
        self.pinned[g][root].add(&self.twist[g].pair(self.base.datum().root(image)))
    }

    /// Whether `φ(γ)` is trivial on `Lie(G̃)_α` for every γ fixing α.
    pub fn root_survives(&self, root: usize) -> bool {
        self.root_stabilizer(root).into_iter().all(|g| self.root_space_scalar(g, root).is_zero())
    }

    /// Key identifying `φ(γ)` as an automorphism: diagram plus all
    /// root-space scalars.
    fn phi_key(&self, g: usize) -> (Vec<BigInt>, Vec<Phase>) {
        let scal = (0..self.base.datum().num_roots()).map(|i| self.root_space_scalar(g, i)).collect();
        (self.diagram[g].entries().to_vec(), scal)
    }

    /// Elements of Γ grouped by their image `φ(γ)`; the class of the
    /// identity is the kernel.
    pub fn phi_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<((Vec<BigInt>, Vec<Phase>), Vec<usize>)> = Vec::new();
        for g in 0..self.group.size() {
            let k = self.phi_key(g);
            match classes.iter_mut().find(|(key, _)| *key == k) {
                Some((_, v)) => v.push(g),
                None => classes.push((k, vec![g])),
            }
        }
        classes.into_iter().map(|(_, v)| v).collect()
    }

    pub fn stabilizer_hypothesis(&self) -> StabilizerReport {
        let datum = self.base.datum();
        let classes = self.phi_classes();
        let class_of: HashMap<usize, usize> =
            classes.iter().enumerate().flat_map(|(c, v)| v.iter().map(move |&g| (g, c))).collect();
        let mut comps = Vec::new();
        for comp in datum.components() {
            let set: HashSet<usize> = comp.iter().copied().collect();
            let stab: Vec<usize> = (0..self.group.size())
                .filter(|&g| comp.iter().all(|&i| set.contains(&self.perm[g][i])))
                .collect();
            let phi_stab: HashSet<usize> = stab.iter().map(|g| class_of[g]).collect();
            let images: HashSet<Vec<usize>> =
                stab.iter().map(|&g| comp.iter().map(|&i| self.perm[g][i]).collect()).collect();
            let faithful = phi_stab.len() == images.len();
            let trivial = images.len() == 1;
            // order of φ(γ): least k with φ(γ^k) = φ(e)
            let id_class = class_of[&self.group.identity()];
            let cyclic = stab.iter().any(|&g| {
                let mut x = g;
                let mut k = 1;
                while class_of[&x] != id_class {
                    x = self.group.mul(x, g);
                    k += 1;
                }
                k == phi_stab.len()
            });
            let sub = datum.sub_datum(&comp);
            let label = sub.cartan_type();
            let is_a_even = label.components.len() == 1
                && label.components[0].family == Family::A
                && label.components[0].rank % 2 == 0;
            comps.push(ComponentStabilizer {
                roots: comp,
                label: label.label(),
                type_a_even: is_a_even,
                stabilizer_order: phi_stab.len(),
                image_order: images.len(),
                faithful,
                trivial,
                cyclic,
            });
        }
        let root_inclusion = match comps.iter().find(|c| c.type_a_even && !(c.trivial || c.faithful)) {
            Some(c) => Hypothesis::Fails(format!(
                "stabilizer of the {} component acts neither trivially nor faithfully",
                c.label
            )),
            None => Hypothesis::Holds,
        };
        let cyclic_faithful = match comps.iter().find(|c| !(c.cyclic && c.faithful)) {
            Some(c) => Hypothesis::Fails(format!(
                "stabilizer of the {} component is {}{}",
                c.label,
                if c.cyclic { "cyclic" } else { "not cyclic" },
                if c.faithful { " and faithful" } else { " and not faithful" }
            )),
            None => Hypothesis::Holds,
        };
        StabilizerReport { components: comps, root_inclusion, cyclic_faithful }
    }

    /// The action restricted to a subgroup.
    pub fn restrict(&self, subgroup: &[usize]) -> Result<GammaAction> {
        let (grp, incl) = self.group.subgroup(subgroup)?;
        GammaAction::with_constants(
            grp,
            self.base.clone(),
            incl.iter().map(|&g| self.diagram[g].clone()).collect(),
            incl.iter().map(|&g| self.twist[g].clone()).collect(),
            self.sc.clone(),
        )
    }

    /// Equality as actions: same group table, diagrams and root pairings of
    /// twists.
    pub fn same_action(&self, other: &GammaAction) -> bool {
        self.group == other.group
            && self.base == other.base
            && self.diagram == other.diagram
            && (0..self.group.size()).all(|g| {
                self.base.datum().roots().iter().all(|r| self.twist[g].pair(r) == other.twist[g].pair(r))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Holds,
    Fails(String),
}

impl Hypothesis {
    pub fn holds(&self) -> bool {
        matches!(self, Hypothesis::Holds)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Holds => write!(f, "holds"),
            Hypothesis::Fails(w) => write!(f, "fails: {w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStabilizer {
    pub roots: Vec<usize>,
    pub label: String,
    pub type_a_even: bool,
    /// Order of the stabilizer inside φ(Γ).
    pub stabilizer_order: usize,
    /// Order of its image in the permutations of the component's roots.
    pub image_order: usize,
    pub faithful: bool,
    pub trivial: bool,
    pub cyclic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    pub components: Vec<ComponentStabilizer>,
    /// Every A_{2n} component has a stabilizer acting trivially or faithfully.
    pub root_inclusion: Hypothesis,
    /// Every component has a cyclic stabilizer acting faithfully.
    pub cyclic_faithful: Hypothesis,
}

/// Block permutation matrix moving factor `i` of `H^r` to factor `σ(i)`.
pub fn block_permutation(rank: usize, sigma: &[usize]) -> LatticeMap {
    let r = sigma.len();
    let mut m = LatticeMap::zero(rank * r, rank * r);
    for (i, &j) in sigma.iter().enumerate() {
        for k in 0..rank {
            m.set(j * rank + k, i * rank + k, BigInt::from(1));
        }
    }
    m
}

/// `ℤ/(r·m)` acting on `H^r` by cyclically shifting the factors, so every
/// factor has stabilizer of order `m` acting trivially.
pub fn product_action(h: &BasedRootDatum, r: usize, m: usize) -> Result<GammaAction> {
    let base = BasedRootDatum::product(&vec![h.clone(); r]);
    let n = h.rank();
    let shift: Vec<usize> = (0..r).map(|i| (i + 1) % r).collect();
    let d = block_permutation(n, &shift);
    GammaAction::cyclic(base, r * m, d, TorsionVector::zero(n * r))
}

/// `ℤ/4` on `H × H` by `(x, y) ↦ (θy, x)` for an involutive diagram `θ` of `H`.
pub fn swap_twist_action(h: &BasedRootDatum, theta: &LatticeMap) -> Result<GammaAction> {
    let n = h.rank();
    let base = BasedRootDatum::product(&[h.clone(), h.clone()]);
    let mut d = LatticeMap::zero(2 * n, 2 * n);
    d.set_block(0, n, theta);
    d.set_block(n, 0, &LatticeMap::identity(n));
    GammaAction::cyclic(base, 4, d, TorsionVector::zero(2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{adjoint_from_cartan, cartan_matrix_of};

    fn ad(f: Family, l: usize) -> BasedRootDatum {
        let (r, a, c) = adjoint_from_cartan(&cartan_matrix_of(f, l));
        BasedRootDatum::from_simple(r, &a, &c).unwrap()
    }

    fn perm_matrix(perm: &[usize]) -> LatticeMap {
        block_permutation(1, perm)
    }

    #[test]
    fn group_tables() {
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.size(), 6);
        assert!(!s3.is_cyclic());
        assert!(FiniteGroup::cyclic(4).is_cyclic());
        let a3 = s3.generated(&[3]);
        assert_eq!(a3.len(), 3);
        assert!(s3.is_normal(&a3));
        assert!(!s3.is_normal(&[0, 1]));
        let (q, proj) = s3.quotient(&a3).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(proj[0], proj[3]);
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![0, 1]], None).is_err());
    }

    #[test]
    fn a2_involution() {
        let b = ad(Family::A, 2);
        let a = GammaAction::cyclic(b.clone(), 2, perm_matrix(&[1, 0]), TorsionVector::zero(2)).unwrap();
        assert!(a.validate().is_valid());
        let (a1, a2) = (b.simple()[0], b.simple()[1]);
        assert_eq!(a.root_orbit(a1), {
            let mut v = vec![a1, a2];
            v.sort();
            v
        });
        assert_eq!(a.root_stabilizer(a1), vec![0]);
        let top = b.datum().sum_index(a1, a2).unwrap();
        assert_eq!(a.root_orbit(top), vec![top]);
        assert_eq!(a.root_stabilizer(top), vec![0, 1]);
        assert_eq!(a.root_space_scalar(1, top), Phase::half());
        assert!(a.root_space_scalar(0, top).is_zero());
        assert!(!a.root_survives(top));
        let rep = a.stabilizer_hypothesis();
        assert!(rep.root_inclusion.holds());
        assert!(rep.cyclic_faithful.holds());
    }

    #[test]
    fn d4_actions() {
        let b = ad(Family::D, 4);
        // Bourbaki: α2 is the center node; triality 1 → 3 → 4 → 1
        let tri = perm_matrix(&[2, 1, 3, 0]);
        let a = GammaAction::cyclic(b.clone(), 3, tri.clone(), TorsionVector::zero(4)).unwrap();
        assert!(a.validate().is_valid());
        assert_eq!(a.root_orbit(b.simple()[1]), vec![b.simple()[1]]);
        let swap = perm_matrix(&[0, 1, 3, 2]);
        let s3 = GammaAction::from_generators(
            FiniteGroup::symmetric3(),
            b,
            &[(3, tri, TorsionVector::zero(4)), (1, swap, TorsionVector::zero(4))],
        )
        .unwrap();
        assert!(s3.validate().is_valid());
        let rep = s3.stabilizer_hypothesis();
        assert!(!rep.cyclic_faithful.holds());
    }

    #[test]
    fn cocycle_violation_reported() {
        let b = ad(Family::A, 2);
        let a = GammaAction::cyclic(b.clone(), 2, perm_matrix(&[1, 0]), TorsionVector::zero(2)).unwrap();
        let mut twists = a.twists().to_vec();
        twists[1] = TorsionVector::from_i64(&[1, 0], 3);
        let bad = GammaAction::new(a.group().clone(), b, a.diagrams().to_vec(), twists).unwrap();
        let rep = bad.validate();
        assert!(!rep.is_valid());
        assert!(rep.violations[0].contains("cocycle"));
    }

    #[test]
    fn trivial_action_is_valid() {
        let a = GammaAction::trivial(ad(Family::B, 2), 3);
        assert!(a.validate().is_valid());
        assert!(a.pinned_projection().same_action(&a));
        let rep = a.stabilizer_hypothesis();
        assert!(rep.root_inclusion.holds());
        assert!(rep.cyclic_faithful.holds());
    }

    #[test]
    fn rejects_non_diagram() {
        let b = ad(Family::A, 2);
        let err = GammaAction::new(
            FiniteGroup::cyclic(2),
            b,
            vec![LatticeMap::identity(2), LatticeMap::scalar(2, -1)],
            vec![TorsionVector::zero(2); 2],
        );
        assert!(matches!(err, Err(GammaError::NotQuasiSemisimple(_))));
    }
}
