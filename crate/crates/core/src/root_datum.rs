//! Root data with explicit root and coroot lists, bases, Weyl groups and
//! Cartan-type recognition.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{
    smith_normal_form, solve_integer, LatticeError, LatticeMap, RatMatrix,
};

pub const DEFAULT_WEYL_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootDatumError {
    #[error("malformed root datum: {0}")]
    Shape(String),
    #[error("not a base: {0}")]
    NotABase(String),
    #[error("Weyl group exceeds the cap of {0} elements")]
    WeylCap(usize),
    #[error("vector {0:?} is not a root")]
    NotARoot(Vec<i64>),
    #[error("cannot parse Cartan type {0:?}")]
    ParseType(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, RootDatumError>;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub(crate) fn from_big(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("coordinate overflows i64")).collect()
}

/// Row-major product of two `n × n` machine-integer matrices.
pub(crate) fn matmul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

pub(crate) fn matvec(n: usize, a: &[i64], v: &[i64]) -> Vec<i64> {
    (0..n).map(|i| dot(&a[i * n..(i + 1) * n], v)).collect()
}

/// Roots and coroots in `ℤ^rank`, index aligned, paired by the dot product.
#[derive(Clone, Debug)]
pub struct RootDatum {
    rank: usize,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl PartialEq for RootDatum {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.roots == other.roots && self.coroots == other.coroots
    }
}

impl Eq for RootDatum {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootLength {
    Short,
    Long,
}

impl RootDatum {
    /// Only shapes and duplicates are checked here; see [`RootDatum::validate`].
    pub fn new(rank: usize, roots: Vec<Vec<i64>>, coroots: Vec<Vec<i64>>) -> Result<Self> {
        if roots.len() != coroots.len() {
            return Err(RootDatumError::Shape(format!(
                "{} roots but {} coroots",
                roots.len(),
                coroots.len()
            )));
        }
        for v in roots.iter().chain(&coroots) {
            if v.len() != rank {
                return Err(RootDatumError::Shape(format!("vector {v:?} does not have length {rank}")));
            }
        }
        let mut index = HashMap::with_capacity(roots.len());
        for (i, r) in roots.iter().enumerate() {
            if index.insert(r.clone(), i).is_some() {
                return Err(RootDatumError::Shape(format!("duplicate root {r:?}")));
            }
        }
        Ok(RootDatum { rank, roots, coroots, index })
    }

    pub fn torus(rank: usize) -> Self {
        RootDatum { rank, roots: vec![], coroots: vec![], index: HashMap::new() }
    }

    /// Closes simple (root, coroot) pairs under the simple reflections. Roots
    /// come out positive first, ordered by height and then by coefficient
    /// vector (descending), followed by the negatives in the same order.
    pub fn from_simple(rank: usize, simple_roots: &[Vec<i64>], simple_coroots: &[Vec<i64>]) -> Result<Self> {
        let l = simple_roots.len();
        if simple_coroots.len() != l {
            return Err(RootDatumError::Shape("simple roots and coroots differ in number".into()));
        }
        for v in simple_roots.iter().chain(simple_coroots) {
            if v.len() != rank {
                return Err(RootDatumError::Shape(format!("vector {v:?} does not have length {rank}")));
            }
        }
        for i in 0..l {
            if dot(&simple_roots[i], &simple_coroots[i]) != 2 {
                return Err(RootDatumError::Shape(format!("simple pair {i} does not pair to 2")));
            }
        }
        let mut pairs: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        for i in 0..l {
            pairs.insert(simple_roots[i].clone(), simple_coroots[i].clone());
        }
        let mut list: Vec<(Vec<i64>, Vec<i64>)> =
            (0..l).map(|i| (simple_roots[i].clone(), simple_coroots[i].clone())).collect();
        let mut head = 0;
        while head < list.len() {
            let (a, ac) = list[head].clone();
            head += 1;
            for j in 0..l {
                let k = dot(&a, &simple_coroots[j]);
                let m = dot(&simple_roots[j], &ac);
                let b: Vec<i64> = a.iter().zip(&simple_roots[j]).map(|(x, y)| x - k * y).collect();
                let bc: Vec<i64> = ac.iter().zip(&simple_coroots[j]).map(|(x, y)| x - m * y).collect();
                match pairs.get(&b) {
                    Some(existing) => {
                        if *existing != bc {
                            return Err(RootDatumError::Shape(format!("root {b:?} has two coroots")));
                        }
                    }
                    None => {
                        if list.len() > 100_000 {
                            return Err(RootDatumError::Shape("root system is not finite".into()));
                        }
                        pairs.insert(b.clone(), bc.clone());
                        list.push((b, bc));
                    }
                }
            }
        }
        // order by simple coefficients
        let cartan: Vec<Vec<i64>> =
            (0..l).map(|i| (0..l).map(|j| dot(&simple_roots[j], &simple_coroots[i])).collect()).collect();
        let cinv = cartan_inverse(&cartan)
            .ok_or_else(|| RootDatumError::Shape("simple roots are linearly dependent".into()))?;
        let mut keyed: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> = list
            .into_iter()
            .map(|(r, c)| {
                let p: Vec<i64> = simple_coroots.iter().map(|sc| dot(&r, sc)).collect();
                (coefficients_from_pairings(&cinv, &p), r, c)
            })
            .collect();
        for (co, r, _) in &keyed {
            if !(co.iter().all(|&x| x >= 0) || co.iter().all(|&x| x <= 0)) {
                return Err(RootDatumError::NotABase(format!("root {r:?} has mixed-sign coefficients")));
            }
        }
        let mut pos: Vec<_> = keyed.iter().filter(|(co, _, _)| co.iter().sum::<i64>() > 0).cloned().collect();
        pos.sort_by(|a, b| {
            let ha: i64 = a.0.iter().sum();
            let hb: i64 = b.0.iter().sum();
            ha.cmp(&hb).then_with(|| b.0.cmp(&a.0))
        });
        keyed.clear();
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        for (_, r, c) in &pos {
            roots.push(r.clone());
            coroots.push(c.clone());
        }
        for (_, r, c) in &pos {
            roots.push(r.iter().map(|x| -x).collect());
            coroots.push(c.iter().map(|x| -x).collect());
        }
        RootDatum::new(rank, roots, coroots)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Equality of the sets of (root, coroot) pairs, ignoring order.
    pub fn same_datum(&self, other: &RootDatum) -> bool {
        self.rank == other.rank
            && self.num_roots() == other.num_roots()
            && self.roots.iter().zip(&self.coroots).all(|(r, c)| {
                other.index_of(r).is_some_and(|j| other.coroots[j] == *c)
            })
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    pub fn root(&self, i: usize) -> &[i64] {
        &self.roots[i]
    }

    pub fn coroot(&self, i: usize) -> &[i64] {
        &self.coroots[i]
    }

    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn neg_index(&self, i: usize) -> usize {
        let neg: Vec<i64> = self.roots[i].iter().map(|x| -x).collect();
        self.index_of(&neg).expect("root system is not symmetric")
    }

    /// Index of `roots[i] + roots[j]` when that sum is a root.
    pub fn sum_index(&self, i: usize, j: usize) -> Option<usize> {
        let s: Vec<i64> = self.roots[i].iter().zip(&self.roots[j]).map(|(a, b)| a + b).collect();
        self.index_of(&s)
    }

    /// `s_i(x) = x − ⟨x, α_i^∨⟩ α_i` on characters.
    pub fn reflect(&self, i: usize, x: &[i64]) -> Vec<i64> {
        let k = dot(x, &self.coroots[i]);
        x.iter().zip(&self.roots[i]).map(|(a, b)| a - k * b).collect()
    }

    /// `s_i^∨(λ) = λ − ⟨α_i, λ⟩ α_i^∨` on cocharacters.
    pub fn coreflect(&self, i: usize, lambda: &[i64]) -> Vec<i64> {
        let k = dot(&self.roots[i], lambda);
        lambda.iter().zip(&self.coroots[i]).map(|(a, b)| a - k * b).collect()
    }

    /// Matrix of `s_i` on characters.
    pub fn reflection_matrix(&self, i: usize) -> Vec<i64> {
        let n = self.rank;
        let mut m = vec![0i64; n * n];
        for r in 0..n {
            for c in 0..n {
                m[r * n + c] = i64::from(r == c) - self.roots[i][r] * self.coroots[i][c];
            }
        }
        m
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for (i, (a, c)) in self.roots.iter().zip(&self.coroots).enumerate() {
            if dot(a, c) != 2 {
                rep.push(format!("⟨α,α^∨⟩ ≠ 2 for root {i} {a:?} (got {})", dot(a, c)));
            }
        }
        if !rep.is_valid() {
            return rep;
        }
        let coindex: HashMap<&Vec<i64>, usize> = self.coroots.iter().enumerate().map(|(i, c)| (c, i)).collect();
        if coindex.len() != self.coroots.len() {
            rep.push("duplicate coroots");
        }
        for (i, a) in self.roots.iter().enumerate() {
            let neg: Vec<i64> = a.iter().map(|x| -x).collect();
            match self.index_of(&neg) {
                None => rep.push(format!("−α missing for root {a:?}")),
                Some(j) => {
                    let negc: Vec<i64> = self.coroots[i].iter().map(|x| -x).collect();
                    if self.coroots[j] != negc {
                        rep.push(format!("coroot of −α is not −α^∨ for root {a:?}"));
                    }
                }
            }
            let dbl: Vec<i64> = a.iter().map(|x| 2 * x).collect();
            if self.index_of(&dbl).is_some() {
                rep.push(format!("non-reduced: 2α is a root for α = {a:?}"));
            }
        }
        for i in 0..self.roots.len() {
            for j in 0..self.roots.len() {
                let b = self.reflect(i, &self.roots[j]);
                let bc = self.coreflect(i, &self.coroots[j]);
                match self.index_of(&b) {
                    None => {
                        rep.push(format!("s_{i} sends root {j} outside the root set"));
                        return rep;
                    }
                    Some(k) => {
                        if self.coroots[k] != bc {
                            rep.push(format!("s_{i} and s_{i}^∨ disagree on root {j}"));
                            return rep;
                        }
                    }
                }
            }
        }
        rep
    }

    /// Swaps characters with cocharacters and roots with coroots, keeping
    /// the index alignment.
    pub fn dual(&self) -> RootDatum {
        RootDatum::new(self.rank, self.coroots.clone(), self.roots.clone()).expect("coroots of a datum are distinct")
    }

    /// Irreducible components as sorted lists of root indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.roots.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if dot(&self.roots[i], &self.coroots[j]) != 0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            let g = *slot.entry(r).or_insert_with(|| {
                groups.push(vec![]);
                groups.len() - 1
            });
            groups[g].push(i);
        }
        groups
    }

    /// Rank of the sublattice spanned by the roots.
    pub fn semisimple_rank(&self) -> usize {
        if self.roots.is_empty() {
            return 0;
        }
        LatticeMap::from_columns(&self.roots, self.rank).expect("shapes checked").rank()
    }

    pub fn central_rank(&self) -> usize {
        self.rank - self.semisimple_rank()
    }

    /// `X / ℤΦ` as (free rank, nontrivial invariant factors).
    pub fn root_lattice_quotient(&self) -> (usize, Vec<BigInt>) {
        if self.roots.is_empty() {
            return (self.rank, vec![]);
        }
        let m = LatticeMap::from_columns(&self.roots, self.rank).expect("shapes checked");
        let f = smith_normal_form(&m).invariant_factors();
        let nonzero: Vec<BigInt> = f.iter().filter(|d| !d.is_zero()).cloned().collect();
        let free = self.rank - nonzero.len();
        (free, nonzero.into_iter().filter(|d| !d.is_one()).collect())
    }

    /// A generic positive system from the functional `(1, M, M², …)`.
    pub fn default_base(&self) -> BasedRootDatum {
        let bound = self.roots.iter().flatten().map(|x| x.abs()).max().unwrap_or(0) as i128;
        let m = 2 * bound + 1;
        let weights: Vec<i128> = (0..self.rank).scan(1i128, |acc, _| {
            let w = *acc;
            *acc *= m;
            Some(w)
        }).collect();
        let value: Vec<i128> = self
            .roots
            .iter()
            .map(|r| r.iter().zip(&weights).map(|(&x, w)| x as i128 * w).sum())
            .collect();
        BasedRootDatum::from_positive(self.clone(), |i| value[i] > 0).expect("a generic functional always gives a base")
    }

    /// W-invariant form on `X ⊗ ℚ`, scaled per irreducible component so the
    /// long roots have squared length 2.
    pub fn invariant_inner_product(&self) -> RatMatrix {
        let n = self.rank;
        let mut total = RatMatrix::zero(n, n);
        for comp in self.components() {
            let mut b = vec![0i64; n * n];
            for &i in &comp {
                let c = &self.coroots[i];
                for r in 0..n {
                    for s in 0..n {
                        b[r * n + s] += c[r] * c[s];
                    }
                }
            }
            let max_len = comp
                .iter()
                .map(|&i| dot(&self.roots[i], &matvec(n, &b, &self.roots[i])))
                .max()
                .unwrap_or(1);
            let scale = BigRational::new(BigInt::from(2), BigInt::from(max_len));
            for r in 0..n {
                for s in 0..n {
                    let v = total.get(r, s) + &scale * BigRational::from_integer(BigInt::from(b[r * n + s]));
                    total.set(r, s, v);
                }
            }
        }
        total
    }

    /// Squared lengths of all roots under [`RootDatum::invariant_inner_product`].
    pub fn root_lengths(&self) -> Vec<BigRational> {
        let form = self.invariant_inner_product();
        self.roots
            .iter()
            .map(|r| {
                let v: Vec<BigRational> = r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
                let fv = form.apply(&v);
                v.iter().zip(&fv).fold(BigRational::zero(), |s, (a, b)| s + a * b)
            })
            .collect()
    }

    /// Long/short classification of every root; simply laced components are
    /// all long.
    pub fn length_classes(&self) -> Vec<RootLength> {
        let lengths = self.root_lengths();
        let mut out = vec![RootLength::Long; self.roots.len()];
        for comp in self.components() {
            let max = comp.iter().map(|&i| &lengths[i]).max().cloned();
            if let Some(max) = max {
                for &i in &comp {
                    if lengths[i] < max {
                        out[i] = RootLength::Short;
                    }
                }
            }
        }
        out
    }

    pub fn classify_length(&self, root: &[i64]) -> Result<RootLength> {
        let i = self.index_of(root).ok_or_else(|| RootDatumError::NotARoot(root.to_vec()))?;
        Ok(self.length_classes()[i])
    }

    pub fn is_closed_subsystem(&self, subset: &[usize]) -> bool {
        let set: HashSet<usize> = subset.iter().copied().collect();
        for &i in &set {
            if !set.contains(&self.neg_index(i)) {
                return false;
            }
            for &j in &set {
                if let Some(k) = self.sum_index(i, j) {
                    if !set.contains(&k) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Same lattice, keeping only the listed roots.
    pub fn sub_datum(&self, indices: &[usize]) -> RootDatum {
        let roots = indices.iter().map(|&i| self.roots[i].clone()).collect();
        let coroots = indices.iter().map(|&i| self.coroots[i].clone()).collect();
        RootDatum::new(self.rank, roots, coroots).expect("subset of a datum")
    }

    /// Direct product; coordinates are concatenated.
    pub fn product(factors: &[RootDatum]) -> RootDatum {
        let rank: usize = factors.iter().map(|f| f.rank).sum();
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        let mut offset = 0;
        for f in factors {
            for (r, c) in f.roots.iter().zip(&f.coroots) {
                let mut rr = vec![0; rank];
                let mut cc = vec![0; rank];
                rr[offset..offset + f.rank].copy_from_slice(r);
                cc[offset..offset + f.rank].copy_from_slice(c);
                roots.push(rr);
                coroots.push(cc);
            }
            offset += f.rank;
        }
        RootDatum::new(rank, roots, coroots).expect("product of data")
    }

    pub fn cartan_type(&self) -> CartanType {
        self.default_base().cartan_type()
    }
}

fn cartan_inverse(cartan: &[Vec<i64>]) -> Option<RatMatrix> {
    let l = cartan.len();
    if l == 0 {
        return Some(RatMatrix::zero(0, 0));
    }
    let m = LatticeMap::from_rows(cartan, l).ok()?;
    m.rational_inverse()
}

fn coefficients_from_pairings(cinv: &RatMatrix, p: &[i64]) -> Vec<i64> {
    let pv: Vec<BigRational> = p.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    cinv.apply(&pv)
        .iter()
        .map(|x| {
            assert!(x.is_integer(), "root is not an integral combination of simple roots");
            x.to_integer().to_i64().expect("coefficient overflow")
        })
        .collect()
}

/// A root datum with a chosen base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedRootDatum {
    datum: RootDatum,
    simple: Vec<usize>,
    coeffs: Vec<Vec<i64>>,
}

impl BasedRootDatum {
    pub fn new(datum: RootDatum, simple: Vec<usize>) -> Result<Self> {
        for &s in &simple {
            if s >= datum.num_roots() {
                return Err(RootDatumError::NotABase(format!("index {s} out of range")));
            }
        }
        let cartan: Vec<Vec<i64>> = simple
            .iter()
            .map(|&i| simple.iter().map(|&j| dot(datum.root(j), datum.coroot(i))).collect())
            .collect();
        let cinv = cartan_inverse(&cartan)
            .ok_or_else(|| RootDatumError::NotABase("simple roots are linearly dependent".into()))?;
        let mut coeffs = Vec::with_capacity(datum.num_roots());
        for r in datum.roots() {
            let p: Vec<i64> = simple.iter().map(|&i| dot(r, datum.coroot(i))).collect();
            let pv: Vec<BigRational> = p.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            let c = cinv.apply(&pv);
            if c.iter().any(|x| !x.is_integer()) {
                return Err(RootDatumError::NotABase(format!("root {r:?} is not an integral combination")));
            }
            let c: Vec<i64> = c.iter().map(|x| x.to_integer().to_i64().unwrap()).collect();
            if !(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0)) {
                return Err(RootDatumError::NotABase(format!("root {r:?} has mixed-sign coefficients")));
            }
            let back: Vec<i64> = (0..datum.rank())
                .map(|k| simple.iter().zip(&c).map(|(&s, &ci)| ci * datum.root(s)[k]).sum())
                .collect();
            if back != *r {
                return Err(RootDatumError::NotABase(format!("root {r:?} is outside the span of the base")));
            }
            coeffs.push(c);
        }
        Ok(BasedRootDatum { datum, simple, coeffs })
    }

    /// Base whose positive roots are those selected by `is_positive`.
    pub fn from_positive(datum: RootDatum, is_positive: impl Fn(usize) -> bool) -> Result<Self> {
        let pos: Vec<usize> = (0..datum.num_roots()).filter(|&i| is_positive(i)).collect();
        let pos_set: HashSet<usize> = pos.iter().copied().collect();
        let mut simple = Vec::new();
        for &i in &pos {
            let decomposable = pos.iter().any(|&j| {
                let d: Vec<i64> = datum.root(i).iter().zip(datum.root(j)).map(|(a, b)| a - b).collect();
                datum.index_of(&d).map(|k| pos_set.contains(&k)).unwrap_or(false)
            });
            if !decomposable {
                simple.push(i);
            }
        }
        BasedRootDatum::new(datum, simple)
    }

    pub fn from_simple(rank: usize, simple_roots: &[Vec<i64>], simple_coroots: &[Vec<i64>]) -> Result<Self> {
        let datum = RootDatum::from_simple(rank, simple_roots, simple_coroots)?;
        let simple = (0..simple_roots.len()).collect();
        BasedRootDatum::new(datum, simple)
    }

    /// Direct product; roots of factor k follow those of factors before it.
    pub fn product(factors: &[BasedRootDatum]) -> BasedRootDatum {
        let datum = RootDatum::product(&factors.iter().map(|f| f.datum.clone()).collect::<Vec<_>>());
        let mut simple = Vec::new();
        let mut offset = 0;
        for f in factors {
            simple.extend(f.simple.iter().map(|s| s + offset));
            offset += f.datum.num_roots();
        }
        BasedRootDatum::new(datum, simple).expect("product of bases is a base")
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn simple(&self) -> &[usize] {
        &self.simple
    }

    pub fn simple_position(&self, root: usize) -> Option<usize> {
        self.simple.iter().position(|&s| s == root)
    }

    pub fn coefficients(&self, root: usize) -> &[i64] {
        &self.coeffs[root]
    }

    pub fn height(&self, root: usize) -> i64 {
        self.coeffs[root].iter().sum()
    }

    pub fn is_positive(&self, root: usize) -> bool {
        self.height(root) > 0
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.datum.num_roots()).filter(|&i| self.is_positive(i)).collect()
    }

    /// `C[i][j] = ⟨α_j, α_i^∨⟩`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.simple
            .iter()
            .map(|&i| self.simple.iter().map(|&j| dot(self.datum.root(j), self.datum.coroot(i))).collect())
            .collect()
    }

    /// The dual datum keeps the same indices, so the simple coroots form its
    /// base.
    pub fn dual(&self) -> BasedRootDatum {
        BasedRootDatum::new(self.datum.dual(), self.simple.clone()).expect("simple coroots form a base of the dual")
    }

    pub fn weyl_group(&self) -> Result<Vec<WeylElement>> {
        self.weyl_group_capped(DEFAULT_WEYL_CAP)
    }

    /// Breadth-first enumeration; each element carries its lexicographically
    /// least reduced word.
    pub fn weyl_group_capped(&self, cap: usize) -> Result<Vec<WeylElement>> {
        let n = self.rank();
        let id: Vec<i64> = (0..n * n).map(|k| i64::from(k / n == k % n)).collect();
        let gens: Vec<Vec<i64>> = self.simple.iter().map(|&s| self.datum.reflection_matrix(s)).collect();
        let cogens: Vec<Vec<i64>> = gens.iter().map(|g| transpose_flat(n, g)).collect();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        seen.insert(id.clone());
        let mut out = vec![WeylElement { word: vec![], rank: n, mat: id.clone(), comat: id }];
        let mut head = 0;
        while head < out.len() {
            for (i, (g, cg)) in gens.iter().zip(&cogens).enumerate() {
                let mat = matmul(n, &out[head].mat, g);
                if seen.contains(&mat) {
                    continue;
                }
                if out.len() >= cap {
                    return Err(RootDatumError::WeylCap(cap));
                }
                seen.insert(mat.clone());
                let comat = matmul(n, &out[head].comat, cg);
                let mut word = out[head].word.clone();
                word.push(i);
                out.push(WeylElement { word, rank: n, mat, comat });
            }
            head += 1;
        }
        Ok(out)
    }

    pub fn cartan_type(&self) -> CartanType {
        let datum = &self.datum;
        let mut components = Vec::new();
        let lengths = datum.root_lengths();
        for comp in datum.components() {
            let set: HashSet<usize> = comp.iter().copied().collect();
            let simple: Vec<usize> = self.simple.iter().copied().filter(|s| set.contains(s)).collect();
            let l = simple.len();
            let bonds: Vec<i64> = simple
                .iter()
                .enumerate()
                .flat_map(|(a, &i)| {
                    simple[a + 1..].iter().map(move |&j| dot(datum.root(i), datum.coroot(j)) * dot(datum.root(j), datum.coroot(i)))
                })
                .collect();
            let max_bond = bonds.iter().copied().max().unwrap_or(0);
            let family = if max_bond == 3 {
                Family::G
            } else if max_bond == 2 {
                if l == 2 {
                    Family::C
                } else {
                    let max_len = simple.iter().map(|&s| &lengths[s]).max().unwrap();
                    let long = simple.iter().filter(|&&s| &lengths[s] == max_len).count();
                    if long == 1 {
                        Family::C
                    } else if long == l - 1 {
                        Family::B
                    } else {
                        Family::F
                    }
                }
            } else {
                let count = comp.len();
                if count == l * (l + 1) {
                    Family::A
                } else if l >= 4 && count == 2 * l * (l - 1) {
                    Family::D
                } else {
                    Family::E
                }
            };
            components.push(CartanComponent { family, rank: l });
        }
        components.sort();
        CartanType { components, central_rank: datum.central_rank() }
    }
}

fn transpose_flat(n: usize, m: &[i64]) -> Vec<i64> {
    let mut t = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = m[i * n + j];
        }
    }
    t
}

/// A Weyl group element with its action on characters and on cocharacters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    word: Vec<usize>,
    rank: usize,
    mat: Vec<i64>,
    comat: Vec<i64>,
}

impl WeylElement {
    /// Reduced word in positions of the simple roots within the base.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn matrix(&self) -> LatticeMap {
        let rows: Vec<Vec<i64>> = self.mat.chunks(self.rank.max(1)).map(|r| r.to_vec()).collect();
        if self.rank == 0 {
            return LatticeMap::zero(0, 0);
        }
        LatticeMap::from_rows(&rows, self.rank).expect("square")
    }

    /// Action on cocharacters, the inverse transpose of [`WeylElement::matrix`].
    pub fn cocharacter_matrix(&self) -> LatticeMap {
        if self.rank == 0 {
            return LatticeMap::zero(0, 0);
        }
        let rows: Vec<Vec<i64>> = self.comat.chunks(self.rank).map(|r| r.to_vec()).collect();
        LatticeMap::from_rows(&rows, self.rank).expect("square")
    }

    pub fn act(&self, x: &[i64]) -> Vec<i64> {
        matvec(self.rank, &self.mat, x)
    }

    pub fn act_cocharacter(&self, lambda: &[i64]) -> Vec<i64> {
        matvec(self.rank, &self.comat, lambda)
    }

    pub(crate) fn raw_cocharacter(&self) -> &[i64] {
        &self.comat
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanComponent {
    pub family: Family,
    pub rank: usize,
}

impl CartanComponent {
    /// Resolves the low-rank coincidences B1 = C1 = A1, B2 = C2, D2 = A1×A1
    /// and D3 = A3.
    pub fn normalized(self) -> Vec<CartanComponent> {
        use Family::*;
        let a1 = CartanComponent { family: A, rank: 1 };
        match (self.family, self.rank) {
            (B | C, 1) => vec![a1],
            (B, 2) => vec![CartanComponent { family: C, rank: 2 }],
            (D, 2) => vec![a1, a1],
            (D, 3) => vec![CartanComponent { family: A, rank: 3 }],
            _ => vec![self],
        }
    }
}

impl fmt::Display for CartanComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub components: Vec<CartanComponent>,
    pub central_rank: usize,
}

impl CartanType {
    pub fn normalized_components(&self) -> Vec<CartanComponent> {
        let mut v: Vec<CartanComponent> = self.components.iter().flat_map(|c| c.normalized()).collect();
        v.sort();
        v
    }

    /// Equality of the semisimple types after resolving low-rank coincidences.
    pub fn same_semisimple_type(&self, other: &CartanType) -> bool {
        self.normalized_components() == other.normalized_components()
    }

    pub fn label(&self) -> String {
        if self.components.is_empty() {
            return "T".into();
        }
        self.components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x")
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for CartanType {
    type Err = RootDatumError;

    /// Parses labels like `"C2"`, `"A1xA1"` or `"T"`; the central rank is set to 0.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || RootDatumError::ParseType(s.to_string());
        let t = s.trim();
        if t == "T" || t.is_empty() {
            return Ok(CartanType { components: vec![], central_rank: 0 });
        }
        let mut components = Vec::new();
        for part in t.split(['x', '×', '*']) {
            let part = part.trim();
            let mut chars = part.chars();
            let family = match chars.next().ok_or_else(bad)? {
                'A' => Family::A,
                'B' => Family::B,
                'C' => Family::C,
                'D' => Family::D,
                'E' => Family::E,
                'F' => Family::F,
                'G' => Family::G,
                _ => return Err(bad()),
            };
            let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
            if rank == 0 {
                return Err(bad());
            }
            components.push(CartanComponent { family, rank });
        }
        components.sort();
        Ok(CartanType { components, central_rank: 0 })
    }
}

/// An isomorphism `g: X_a → X_b` carrying roots to roots and (by transpose)
/// coroots of `b` to coroots of `a`, if one exists within a small search.
pub fn find_isomorphism(a: &BasedRootDatum, b: &BasedRootDatum) -> Option<LatticeMap> {
    let n = a.rank();
    if b.rank() != n || a.datum().num_roots() != b.datum().num_roots() || a.simple().len() != b.simple().len() {
        return None;
    }
    let ca = a.cartan_matrix();
    let cb = b.cartan_matrix();
    let l = ca.len();
    let mut perms = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; l];
    cartan_bijections(&ca, &cb, &mut current, &mut used, &mut perms);
    for pi in perms {
        // unknowns g[r][c] at r*n + c
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let mut rhs: Vec<i64> = Vec::new();
        for i in 0..l {
            let alpha = a.datum().root(a.simple()[i]);
            let beta = b.datum().root(b.simple()[pi[i]]);
            for r in 0..n {
                let mut row = vec![0; n * n];
                for c in 0..n {
                    row[r * n + c] = alpha[c];
                }
                rows.push(row);
                rhs.push(beta[r]);
            }
            let acv = a.datum().coroot(a.simple()[i]);
            let bcv = b.datum().coroot(b.simple()[pi[i]]);
            for c in 0..n {
                let mut row = vec![0; n * n];
                for r in 0..n {
                    row[r * n + c] = bcv[r];
                }
                rows.push(row);
                rhs.push(acv[c]);
            }
        }
        let sys = if rows.is_empty() {
            LatticeMap::zero(0, n * n)
        } else {
            LatticeMap::from_rows(&rows, n * n).ok()?
        };
        let Some((x0, kernel)) = solve_integer(&sys, &to_big(&rhs)) else { continue };
        let k = kernel.domain_rank();
        let range: i64 = if k <= 3 { 2 } else { 1 };
        if k > 6 {
            continue;
        }
        let kcols: Vec<Vec<BigInt>> = kernel.columns();
        let mut coeffs = vec![-range; k];
        loop {
            let mut x = x0.clone();
            for (j, col) in kcols.iter().enumerate() {
                for (xi, ci) in x.iter_mut().zip(col) {
                    *xi += ci * BigInt::from(coeffs[j]);
                }
            }
            let g = LatticeMap::new(n, n, x).ok()?;
            if g.is_unimodular() && maps_roots(&g, a, b) {
                return Some(g);
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                coeffs[pos] += 1;
                if coeffs[pos] <= range {
                    break;
                }
                coeffs[pos] = -range;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    None
}

fn maps_roots(g: &LatticeMap, a: &BasedRootDatum, b: &BasedRootDatum) -> bool {
    let gt = g.transpose();
    a.datum().roots().iter().zip(a.datum().coroots()).all(|(r, c)| {
        let img = from_big(&g.apply(&to_big(r)));
        match b.datum().index_of(&img) {
            Some(j) => from_big(&gt.apply(&to_big(b.datum().coroot(j)))) == *c,
            None => false,
        }
    })
}

fn cartan_bijections(
    ca: &[Vec<i64>],
    cb: &[Vec<i64>],
    current: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let i = current.len();
    if i == ca.len() {
        out.push(current.clone());
        return;
    }
    for j in 0..cb.len() {
        if used[j] {
            continue;
        }
        let ok = (0..i).all(|k| ca[i][k] == cb[j][current[k]] && ca[k][i] == cb[current[k]][j]) && ca[i][i] == cb[j][j];
        if ok {
            used[j] = true;
            current.push(j);
            cartan_bijections(ca, cb, current, used, out);
            current.pop();
            used[j] = false;
        }
    }
}

/// `(rank, simple roots, simple coroots)` for the simply connected datum of a
/// Cartan matrix: characters in the fundamental-weight basis.
pub fn simply_connected_from_cartan(cartan: &[Vec<i64>]) -> (usize, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let l = cartan.len();
    // α_j = Σ_i ⟨α_j, α_i^∨⟩ ω_i
    let roots = (0..l).map(|j| (0..l).map(|i| cartan[i][j]).collect()).collect();
    let coroots = (0..l).map(|i| (0..l).map(|k| i64::from(i == k)).collect()).collect();
    (l, roots, coroots)
}

/// Adjoint datum of a Cartan matrix: characters in the simple-root basis.
pub fn adjoint_from_cartan(cartan: &[Vec<i64>]) -> (usize, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let l = cartan.len();
    let roots = (0..l).map(|j| (0..l).map(|k| i64::from(j == k)).collect()).collect();
    let coroots = (0..l).map(|i| cartan[i].clone()).collect();
    (l, roots, coroots)
}

/// Cartan matrix `C[i][j] = ⟨α_j, α_i^∨⟩` with Bourbaki numbering.
pub fn cartan_matrix_of(family: Family, l: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; l]; l];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match family {
        Family::A | Family::B | Family::C => {
            for i in 0..l.saturating_sub(1) {
                link(i, i + 1);
            }
        }
        Family::D => {
            for i in 0..l - 2 {
                link(i, i + 1);
            }
            link(l - 3, l - 1);
        }
        Family::E => {
            // 1-3-4-5-6-..., 2 attached to 4
            link(0, 2);
            link(1, 3);
            for i in 2..l - 1 {
                link(i, i + 1);
            }
        }
        Family::F => {
            link(0, 1);
            link(1, 2);
            link(2, 3);
        }
        Family::G => {
            link(0, 1);
        }
    }
    match family {
        // α_l short in B, long in C
        Family::B => c[l - 1][l - 2] = -2,
        Family::C => c[l - 2][l - 1] = -2,
        Family::F => c[2][1] = -2,
        Family::G => c[1][0] = -3,
        _ => {}
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl(n: usize) -> BasedRootDatum {
        let mut sr = Vec::new();
        for i in 0..n - 1 {
            let mut v = vec![0; n];
            v[i] = 1;
            v[i + 1] = -1;
            sr.push(v);
        }
        BasedRootDatum::from_simple(n, &sr, &sr).unwrap()
    }

    fn sc(family: Family, l: usize) -> BasedRootDatum {
        let (r, a, c) = simply_connected_from_cartan(&cartan_matrix_of(family, l));
        BasedRootDatum::from_simple(r, &a, &c).unwrap()
    }

    fn ad(family: Family, l: usize) -> BasedRootDatum {
        let (r, a, c) = adjoint_from_cartan(&cartan_matrix_of(family, l));
        BasedRootDatum::from_simple(r, &a, &c).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(gl(2).datum().validate().is_valid());
        assert!(RootDatum::torus(1).validate().is_valid());
        let bad = RootDatum::new(1, vec![vec![2], vec![-2]], vec![vec![2], vec![-2]]).unwrap();
        let rep = bad.validate();
        assert!(!rep.is_valid());
        assert!(rep.violations[0].contains("⟨α,α^∨⟩ ≠ 2"));
    }

    #[test]
    fn weyl_orders() {
        let cases = [
            (Family::A, 1, 2usize),
            (Family::A, 2, 6),
            (Family::A, 3, 24),
            (Family::B, 3, 48),
            (Family::C, 3, 48),
            (Family::D, 4, 192),
            (Family::G, 2, 12),
            (Family::F, 4, 1152),
            (Family::E, 6, 51840),
        ];
        for (f, l, order) in cases {
            let w = sc(f, l).weyl_group().unwrap();
            assert_eq!(w.len(), order, "{f:?}{l}");
        }
        assert_eq!(gl(4).weyl_group().unwrap().len(), 24);
        assert!(matches!(sc(Family::F, 4).weyl_group_capped(100), Err(RootDatumError::WeylCap(100))));
    }

    #[test]
    fn reduced_words_are_lex_least() {
        let w = sc(Family::A, 2).weyl_group().unwrap();
        let words: Vec<Vec<usize>> = w.iter().map(|e| e.word().to_vec()).collect();
        assert_eq!(words, vec![vec![], vec![0], vec![1], vec![0, 1], vec![1, 0], vec![0, 1, 0]]);
        let b = sc(Family::A, 2);
        for e in &w {
            let mut m = LatticeMap::identity(2);
            for &i in e.word() {
                let s = b.datum().reflection_matrix(b.simple()[i]);
                let s = LatticeMap::from_rows(&s.chunks(2).map(|r| r.to_vec()).collect::<Vec<_>>(), 2).unwrap();
                m = m.mul(&s);
            }
            assert_eq!(m, e.matrix());
            assert!(e.matrix().transpose().mul(&e.cocharacter_matrix()).is_identity());
        }
    }

    #[test]
    fn inner_product_lengths() {
        let sl2 = RootDatum::new(1, vec![vec![2], vec![-2]], vec![vec![1], vec![-1]]).unwrap();
        let l = sl2.root_lengths();
        assert_eq!(l[0], BigRational::from_integer(2.into()));
        for (fam, ratio) in [(Family::C, 2), (Family::G, 3)] {
            let d = sc(fam, 2);
            let l = d.datum().root_lengths();
            let max = l.iter().max().unwrap().clone();
            let min = l.iter().min().unwrap().clone();
            assert_eq!(max / min, BigRational::from_integer(ratio.into()));
        }
    }

    #[test]
    fn inner_product_is_invariant() {
        for d in [sc(Family::B, 3), sc(Family::G, 2), gl(3), ad(Family::F, 4)] {
            let form = d.datum().invariant_inner_product();
            let n = d.rank();
            for &s in d.simple() {
                let m = d.datum().reflection_matrix(s);
                let m = LatticeMap::from_rows(&m.chunks(n).map(|r| r.to_vec()).collect::<Vec<_>>(), n).unwrap();
                let mr = RatMatrix::from_lattice(&m);
                assert_eq!(mr.transpose().mul(&form).mul(&mr), form);
            }
        }
    }

    #[test]
    fn length_classification() {
        let g2 = sc(Family::G, 2);
        let pos = g2.positive_roots();
        let highest = *pos.iter().max_by_key(|&&i| g2.height(i)).unwrap();
        assert_eq!(g2.datum().classify_length(g2.datum().root(highest)).unwrap(), RootLength::Long);
        // α1 is long in C2, α1 = e1 − e2 short
        let c2 = sc(Family::C, 2);
        assert_eq!(c2.datum().length_classes()[c2.simple()[0]], RootLength::Short);
        let a2 = sc(Family::A, 2);
        assert!(a2.datum().length_classes().iter().all(|&l| l == RootLength::Long));
        assert!(a2.datum().classify_length(&[5, 5]).is_err());
        // constant on Weyl orbits
        let f4 = ad(Family::F, 4);
        let cls = f4.datum().length_classes();
        for i in 0..f4.datum().num_roots() {
            for &s in f4.simple() {
                let j = f4.datum().index_of(&f4.datum().reflect(s, f4.datum().root(i))).unwrap();
                assert_eq!(cls[i], cls[j]);
            }
        }
    }

    #[test]
    fn cartan_types() {
        let t = gl(4).cartan_type();
        assert_eq!(t.label(), "A3");
        assert_eq!(t.central_rank, 1);
        for (f, l, label) in [
            (Family::C, 2, "C2"),
            (Family::B, 2, "C2"),
            (Family::B, 3, "B3"),
            (Family::C, 3, "C3"),
            (Family::C, 4, "C4"),
            (Family::B, 4, "B4"),
            (Family::D, 4, "D4"),
            (Family::D, 5, "D5"),
            (Family::E, 6, "E6"),
            (Family::F, 4, "F4"),
            (Family::G, 2, "G2"),
        ] {
            assert_eq!(ad(f, l).cartan_type().label(), label);
            assert_eq!(sc(f, l).datum().cartan_type().label(), label);
        }
        let d2: CartanType = "D2".parse().unwrap();
        let a1a1: CartanType = "A1xA1".parse().unwrap();
        assert!(d2.same_semisimple_type(&a1a1));
        assert!("Q3".parse::<CartanType>().is_err());
    }

    #[test]
    fn closed_subsystems() {
        let c2 = sc(Family::C, 2);
        let d = c2.datum();
        let cls = d.length_classes();
        let long: Vec<usize> = (0..d.num_roots()).filter(|&i| cls[i] == RootLength::Long).collect();
        assert!(d.is_closed_subsystem(&long));
        let a2 = sc(Family::A, 2);
        let (a1, a2i) = (a2.simple()[0], a2.simple()[1]);
        let d = a2.datum();
        assert!(d.is_closed_subsystem(&[a1, d.neg_index(a1)]));
        assert!(!d.is_closed_subsystem(&[a1, a2i, d.neg_index(a1), d.neg_index(a2i)]));
    }

    #[test]
    fn duality() {
        let c3 = sc(Family::C, 3);
        let dual = c3.dual();
        assert_eq!(dual.cartan_type().label(), "B3");
        assert_eq!(dual.datum().dual(), *c3.datum());
        let g = gl(3);
        assert!(find_isomorphism(&g, &g.dual()).is_some());
        let e6 = ad(Family::E, 6);
        assert_eq!(e6.datum().root_lattice_quotient(), (0, vec![]));
        assert_eq!(e6.datum().dual().root_lattice_quotient(), (0, vec![BigInt::from(3)]));
        assert_eq!(sc(Family::E, 6).datum().root_lattice_quotient(), (0, vec![BigInt::from(3)]));
        assert!(find_isomorphism(&e6.dual(), &sc(Family::E, 6)).is_some());
        assert!(find_isomorphism(&e6, &sc(Family::E, 6)).is_none());
    }

    #[test]
    fn default_base_agrees() {
        let d = sc(Family::F, 4);
        let b = d.datum().default_base();
        assert_eq!(b.simple().len(), 4);
        assert_eq!(b.positive_roots().len(), 24);
        assert!(find_isomorphism(&b, &d).is_some());
    }
}
