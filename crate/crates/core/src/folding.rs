//! The root datum of the identity component of the fixed points, and the
//! comparisons between an action and its pinned projection.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::gamma::{GammaAction, GammaError, Hypothesis};
use crate::lattice::{coinvariant_quotient, fixed_sublattice, smith_normal_form, LatticeError, LatticeMap};
use crate::root_datum::{dot, from_big, to_big, BasedRootDatum, CartanType, RootDatumError, RootLength};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoldError {
    #[error("coroot multiplier 2/{0} is not 1 or 2")]
    Multiplier(i64),
    #[error("internal inconsistency while folding: {0}")]
    Inconsistent(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
}

pub type Result<T> = std::result::Result<T, FoldError>;

/// Where a folded root comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Surviving source roots restricting to this root.
    pub sources: Vec<usize>,
    /// `c` in `β^∨ = c · Σ_{Γ/Γ_α} γ(α^∨)`.
    pub multiplier: i64,
}

/// The datum of `G = (G̃^Γ)°` on the torus `T = (T̃^Γ)°`.
#[derive(Clone, Debug)]
pub struct FoldedDatum {
    source: GammaAction,
    fixed: BasedRootDatum,
    restriction: LatticeMap,
    corestriction: LatticeMap,
    lift: LatticeMap,
    provenance: Vec<Provenance>,
}

impl FoldedDatum {
    pub fn source(&self) -> &GammaAction {
        &self.source
    }

    pub fn fixed(&self) -> &BasedRootDatum {
        &self.fixed
    }

    /// `i^*: X^*(T̃) → X^*(T)`.
    pub fn restriction(&self) -> &LatticeMap {
        &self.restriction
    }

    /// `X_*(T) ↪ X_*(T̃)`.
    pub fn corestriction(&self) -> &LatticeMap {
        &self.corestriction
    }

    /// Integral left inverse of the corestriction.
    pub fn lift(&self) -> &LatticeMap {
        &self.lift
    }

    pub fn provenance(&self, folded_root: usize) -> &Provenance {
        &self.provenance[folded_root]
    }

    pub fn restrict(&self, x: &[i64]) -> Vec<i64> {
        from_big(&self.restriction.apply(&to_big(x)))
    }

    pub fn cartan_type(&self) -> CartanType {
        self.fixed.cartan_type()
    }

    /// Folded simple roots are the restrictions of the surviving orbits of
    /// source simple roots.
    pub fn simple_roots_from_orbits(&self) -> bool {
        let src = self.source.base();
        let mut from_orbits: HashSet<Vec<i64>> = HashSet::new();
        for &s in src.simple() {
            if self.source.root_survives(s) {
                from_orbits.insert(self.restrict(src.datum().root(s)));
            }
        }
        let simple: HashSet<Vec<i64>> =
            self.fixed.simple().iter().map(|&s| self.fixed.datum().root(s).to_vec()).collect();
        simple == from_orbits
    }
}

/// Integer `L` with `L·K = I` for a saturated basis `K`.
pub(crate) fn left_inverse(k: &LatticeMap) -> Result<LatticeMap> {
    let r = k.domain_rank();
    let n = k.codomain_rank();
    let snf = smith_normal_form(k);
    if snf.invariant_factors().iter().any(|d| *d != BigInt::from(1)) {
        return Err(FoldError::Inconsistent("fixed cocharacter lattice is not saturated".into()));
    }
    let mut proj = LatticeMap::zero(r, n);
    for i in 0..r {
        proj.set(i, i, BigInt::from(1));
    }
    Ok(snf.v.mul(&proj).mul(&snf.u))
}

pub fn fold(a: &GammaAction) -> Result<FoldedDatum> {
    let src = a.base();
    let datum = src.datum();
    let n = src.rank();
    let quotient = coinvariant_quotient(a.diagrams())?;
    let fixed = fixed_sublattice(a.cocharacter_diagrams())?;
    let p = quotient.projection.clone();
    let k = fixed.basis().clone();
    if p != k.transpose() {
        return Err(FoldError::Inconsistent("coinvariant projection is not dual to the fixed cocharacters".into()));
    }
    let r = k.domain_rank();
    let l = left_inverse(&k)?;

    let mut roots: Vec<Vec<i64>> = Vec::new();
    let mut info: HashMap<Vec<i64>, (Vec<i64>, Provenance, bool)> = HashMap::new();
    for i in 0..datum.num_roots() {
        if !a.root_survives(i) {
            continue;
        }
        let beta = from_big(&p.apply(&to_big(datum.root(i))));
        let mut v = vec![0i64; n];
        for j in a.root_orbit(i) {
            for (x, y) in v.iter_mut().zip(datum.coroot(j)) {
                *x += y;
            }
        }
        let pairing = dot(datum.root(i), &v);
        let c = match pairing {
            2 => 1,
            1 => 2,
            other => return Err(FoldError::Multiplier(other)),
        };
        let lv = from_big(&l.apply(&to_big(&v)));
        let kv = from_big(&k.apply(&to_big(&lv)));
        if kv != v {
            return Err(FoldError::Inconsistent("orbit sum of coroots is not Γ-fixed".into()));
        }
        let coroot: Vec<i64> = lv.iter().map(|x| c * x).collect();
        match info.get_mut(&beta) {
            Some((existing, prov, _)) => {
                if *existing != coroot {
                    return Err(FoldError::Inconsistent(format!("restricted root {beta:?} gets two coroots")));
                }
                prov.sources.push(i);
            }
            None => {
                roots.push(beta.clone());
                info.insert(beta, (coroot, Provenance { sources: vec![i], multiplier: c }, src.is_positive(i)));
            }
        }
    }

    // simple roots, ordered by the first source simple root below them
    let pos: Vec<&Vec<i64>> = roots.iter().filter(|b| info[*b].2).collect();
    let pos_set: HashSet<&Vec<i64>> = pos.iter().copied().collect();
    let mut simple: Vec<(usize, Vec<i64>)> = Vec::new();
    for b in &pos {
        let decomposable = pos.iter().any(|c| {
            let d: Vec<i64> = b.iter().zip(c.iter()).map(|(x, y)| x - y).collect();
            pos_set.contains(&d)
        });
        if !decomposable {
            let key = info[*b]
                .1
                .sources
                .iter()
                .map(|&s| {
                    let co = src.coefficients(s);
                    co.iter().position(|&x| x != 0).unwrap_or(usize::MAX)
                })
                .min()
                .unwrap_or(usize::MAX);
            simple.push((key, (*b).clone()));
        }
    }
    simple.sort();
    let simple_roots: Vec<Vec<i64>> = simple.iter().map(|(_, b)| b.clone()).collect();
    let simple_coroots: Vec<Vec<i64>> = simple_roots.iter().map(|b| info[b].0.clone()).collect();
    let based = BasedRootDatum::from_simple(r, &simple_roots, &simple_coroots)?;
    let fd = based.datum();
    if fd.num_roots() != roots.len() {
        return Err(FoldError::Inconsistent(format!(
            "restricted roots ({}) do not form the closed system of the folded base ({})",
            roots.len(),
            fd.num_roots()
        )));
    }
    let mut provenance = Vec::with_capacity(fd.num_roots());
    for (j, b) in fd.roots().iter().enumerate() {
        let (coroot, prov, _) = info
            .get(b)
            .ok_or_else(|| FoldError::Inconsistent(format!("folded system contains non-restricted {b:?}")))?;
        if coroot.as_slice() != fd.coroot(j) {
            return Err(FoldError::Inconsistent(format!("coroot mismatch at folded root {b:?}")));
        }
        provenance.push(prov.clone());
    }
    let rep = fd.validate();
    if !rep.is_valid() {
        return Err(FoldError::Inconsistent(format!("folded datum is invalid: {rep}")));
    }
    Ok(FoldedDatum { source: a.clone(), fixed: based, restriction: p, corestriction: k, lift: l, provenance })
}

/// `(1/|Γ|) Σ_γ γ(α)` in `V^*(T̃)`.
pub fn average_restriction(a: &GammaAction, root: usize) -> Vec<BigRational> {
    let datum = a.base().datum();
    let n = a.rank();
    let size = BigInt::from(a.group().size());
    let mut sum = vec![BigInt::zero(); n];
    for g in 0..a.group().size() {
        let img = datum.root(a.act_root(g, root));
        for (s, x) in sum.iter_mut().zip(img) {
            *s += BigInt::from(*x);
        }
    }
    sum.into_iter().map(|s| BigRational::new(s, size.clone())).collect()
}

#[derive(Clone, Debug)]
pub struct RestrictedRootReport {
    /// Φ(G, T) in `X^*(T)` coordinates.
    pub phi: Vec<Vec<i64>>,
    /// Φ of the pinned projection, same coordinates.
    pub underline_phi: Vec<Vec<i64>>,
    pub phi_type: CartanType,
    pub underline_type: CartanType,
    pub phi_in_underline: bool,
    pub underline_short_in_phi: bool,
    pub witness_not_in_underline: Option<Vec<i64>>,
    pub witness_short_missing: Option<Vec<i64>>,
    pub root_inclusion_hypothesis: Hypothesis,
    pub cyclic_faithful_hypothesis: Hypothesis,
    /// The same inclusions recomputed on averaged rational restrictions agree.
    pub averages_agree: bool,
}

fn rational_set(a: &GammaAction) -> HashSet<Vec<BigRational>> {
    (0..a.base().datum().num_roots())
        .filter(|&i| a.root_survives(i))
        .map(|i| average_restriction(a, i))
        .collect()
}

pub fn restricted_root_comparison(a: &GammaAction) -> Result<RestrictedRootReport> {
    let pinned = a.pinned_projection();
    let f = fold(a)?;
    let uf = fold(&pinned)?;
    let phi: Vec<Vec<i64>> = f.fixed().datum().roots().to_vec();
    let uphi: Vec<Vec<i64>> = uf.fixed().datum().roots().to_vec();
    let phi_set: HashSet<&Vec<i64>> = phi.iter().collect();
    let uphi_set: HashSet<&Vec<i64>> = uphi.iter().collect();
    let lengths = uf.fixed().datum().length_classes();
    let short: Vec<&Vec<i64>> =
        uphi.iter().enumerate().filter(|(i, _)| lengths[*i] == RootLength::Short).map(|(_, r)| r).collect();
    let witness_not_in_underline = phi.iter().find(|r| !uphi_set.contains(r)).cloned();
    let witness_short_missing = short.iter().find(|r| !phi_set.contains(*r)).map(|r| (*r).clone());

    // same comparison on rational averages inside V^*(T̃)^Γ
    let rphi = rational_set(a);
    let ruphi = rational_set(&pinned);
    let mut short_rational: HashSet<Vec<BigRational>> = HashSet::new();
    for i in 0..pinned.base().datum().num_roots() {
        if pinned.root_survives(i) {
            let b = f.restrict(pinned.base().datum().root(i));
            let j = uf.fixed().datum().index_of(&b).expect("restriction of a surviving root");
            if lengths[j] == RootLength::Short {
                short_rational.insert(average_restriction(&pinned, i));
            }
        }
    }
    let averages_agree = rphi.len() == phi.len()
        && ruphi.len() == uphi.len()
        && rphi.is_subset(&ruphi) == witness_not_in_underline.is_none()
        && short_rational.is_subset(&rphi) == witness_short_missing.is_none();

    let hyp = a.stabilizer_hypothesis();
    Ok(RestrictedRootReport {
        phi_type: f.cartan_type(),
        underline_type: uf.cartan_type(),
        phi_in_underline: witness_not_in_underline.is_none(),
        underline_short_in_phi: witness_short_missing.is_none(),
        phi,
        underline_phi: uphi,
        witness_not_in_underline,
        witness_short_missing,
        root_inclusion_hypothesis: hyp.root_inclusion,
        cyclic_faithful_hypothesis: hyp.cyclic_faithful,
        averages_agree,
    })
}

#[derive(Clone, Debug)]
pub struct DualLengthReport {
    /// Φ^* as coroots of the fold, in `X_*(T)` coordinates.
    pub phi_dual: Vec<Vec<i64>>,
    pub underline_phi_dual: Vec<Vec<i64>>,
    pub underline_long: Vec<Vec<i64>>,
    pub long_in_phi: bool,
    pub phi_in_underline: bool,
    pub two_lengths: bool,
}

impl DualLengthReport {
    pub fn sandwich_holds(&self) -> bool {
        self.long_in_phi && self.phi_in_underline
    }
}

pub fn dual_length_comparison(a: &GammaAction) -> Result<DualLengthReport> {
    let hyp = a.stabilizer_hypothesis();
    if let Hypothesis::Fails(w) = hyp.cyclic_faithful {
        return Err(FoldError::Hypothesis(w));
    }
    let f = fold(a)?;
    let uf = fold(&a.pinned_projection())?;
    let dual = f.fixed().datum().dual();
    let udual = uf.fixed().datum().dual();
    let lengths = udual.length_classes();
    let phi_dual: Vec<Vec<i64>> = dual.roots().to_vec();
    let uphi_dual: Vec<Vec<i64>> = udual.roots().to_vec();
    let long: Vec<Vec<i64>> =
        uphi_dual.iter().enumerate().filter(|(i, _)| lengths[*i] == RootLength::Long).map(|(_, r)| r.clone()).collect();
    let phi_set: HashSet<&Vec<i64>> = phi_dual.iter().collect();
    let uphi_set: HashSet<&Vec<i64>> = uphi_dual.iter().collect();
    Ok(DualLengthReport {
        long_in_phi: long.iter().all(|r| phi_set.contains(r)),
        phi_in_underline: phi_dual.iter().all(|r| uphi_set.contains(r)),
        two_lengths: lengths.iter().any(|&l| l == RootLength::Short),
        phi_dual,
        underline_phi_dual: uphi_dual,
        underline_long: long,
    })
}

/// Every folded simple reflection on `X_*(T)` is induced by a source Weyl
/// element commuting with Γ.
pub fn verify_weyl_embedding(f: &FoldedDatum) -> Result<bool> {
    let src = f.source();
    let w = src.base().weyl_group()?;
    let k = f.corestriction();
    let fd = f.fixed();
    let r = fd.rank();
    let gammas: Vec<LatticeMap> = src.cocharacter_diagrams().to_vec();
    let fixed_w: Vec<LatticeMap> = w
        .iter()
        .map(|e| e.cocharacter_matrix())
        .filter(|m| gammas.iter().all(|g| g.mul(m) == m.mul(g)))
        .collect();
    for &s in fd.simple() {
        // s_β^∨ on X_*(T)
        let mut refl = LatticeMap::identity(r);
        let beta = fd.datum().root(s);
        let cob = fd.datum().coroot(s);
        for i in 0..r {
            for j in 0..r {
                let v = refl.get(i, j) - BigInt::from(cob[i] * beta[j]);
                refl.set(i, j, v);
            }
        }
        let target = k.mul(&refl);
        if !fixed_w.iter().any(|m| m.mul(k) == target) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{block_permutation, FiniteGroup};
    use crate::lattice::TorsionVector;
    use crate::root_datum::{adjoint_from_cartan, cartan_matrix_of, Family};

    fn gl(n: usize) -> BasedRootDatum {
        let sr: Vec<Vec<i64>> = (0..n - 1)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v[i + 1] = -1;
                v
            })
            .collect();
        BasedRootDatum::from_simple(n, &sr, &sr).unwrap()
    }

    fn gl_involution(n: usize) -> LatticeMap {
        // e_i ↦ −e_{n+1−i}
        let mut m = LatticeMap::zero(n, n);
        for i in 0..n {
            m.set(n - 1 - i, i, BigInt::from(-1));
        }
        m
    }

    fn so_twist(n: usize) -> TorsionVector {
        let nums: Vec<i64> = (0..n).map(|i| if i % 2 == 1 { 1 } else { 0 }).collect();
        TorsionVector::from_i64(&nums, 2)
    }

    #[test]
    fn gl4_pinned_is_c2() {
        let a = GammaAction::cyclic(gl(4), 2, gl_involution(4), TorsionVector::zero(4)).unwrap();
        let f = fold(&a).unwrap();
        assert_eq!(f.cartan_type().label(), "C2");
        assert!(f.simple_roots_from_orbits());
        assert!(verify_weyl_embedding(&f).unwrap());
    }

    #[test]
    fn gl4_so_twist_is_d2() {
        let a = GammaAction::cyclic(gl(4), 2, gl_involution(4), so_twist(4)).unwrap();
        assert!(a.validate().is_valid());
        let f = fold(&a).unwrap();
        assert!(f.cartan_type().same_semisimple_type(&"D2".parse().unwrap()));
        let rep = restricted_root_comparison(&a).unwrap();
        assert!(rep.phi_in_underline);
        assert!(rep.underline_short_in_phi);
        assert!(rep.averages_agree);
        assert!(rep.cyclic_faithful_hypothesis.holds());
        let d = dual_length_comparison(&a).unwrap();
        assert!(d.sandwich_holds());
        assert!(d.two_lengths);
    }

    #[test]
    fn a2_pinned_drops_highest_root() {
        let (r, s, c) = adjoint_from_cartan(&cartan_matrix_of(Family::A, 2));
        let b = BasedRootDatum::from_simple(r, &s, &c).unwrap();
        let a = GammaAction::cyclic(b, 2, block_permutation(1, &[1, 0]), TorsionVector::zero(2)).unwrap();
        let f = fold(&a).unwrap();
        assert_eq!(f.fixed().datum().num_roots(), 2);
        assert_eq!(f.provenance(0).multiplier, 2);
    }

    #[test]
    fn trivial_fold_is_isomorphic() {
        let (r, s, c) = adjoint_from_cartan(&cartan_matrix_of(Family::B, 3));
        let b = BasedRootDatum::from_simple(r, &s, &c).unwrap();
        let a = GammaAction::trivial(b.clone(), 2);
        let f = fold(&a).unwrap();
        assert!(crate::root_datum::find_isomorphism(f.fixed(), &b).is_some());
        let _ = FiniteGroup::trivial();
    }

    #[test]
    fn pinned_comparison_is_equal() {
        let a = GammaAction::cyclic(gl(4), 2, gl_involution(4), TorsionVector::zero(4)).unwrap();
        let rep = restricted_root_comparison(&a).unwrap();
        let s1: HashSet<_> = rep.phi.iter().collect();
        let s2: HashSet<_> = rep.underline_phi.iter().collect();
        assert_eq!(s1, s2);
        let d = dual_length_comparison(&a).unwrap();
        let s1: HashSet<_> = d.phi_dual.iter().collect();
        let s2: HashSet<_> = d.underline_phi_dual.iter().collect();
        assert_eq!(s1, s2);
    }
}
