//! Norm and conorm as integer lattice maps, and their compatibility with
//! isogenies.

use thiserror::Error;

use crate::folding::{fold, FoldError, FoldedDatum};
use crate::gamma::{GammaAction, GammaError};
use crate::lattice::{integer_kernel, smith_normal_form, LatticeError, LatticeMap};
use crate::root_datum::{from_big, to_big, BasedRootDatum, RootDatum, RootDatumError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("invalid isogeny: {0}")]
    Isogeny(String),
    #[error("isogeny is not Γ-equivariant: {0}")]
    NonEquivariant(String),
    #[error("norm data inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
}

pub type Result<T> = std::result::Result<T, DualityError>;

#[derive(Clone, Debug)]
pub struct NormData {
    pub folded: FoldedDatum,
    /// `λ ↦ Σ_γ γ·λ` on `X_*(T̃)`.
    pub norm_on_cochar: LatticeMap,
    /// `χ ↦ Σ_γ γ·χ̃` from `X^*(T)` to `X^*(T̃)`.
    pub norm_pullback: LatticeMap,
}

impl NormData {
    pub fn action(&self) -> &GammaAction {
        self.folded.source()
    }

    /// `⟨norm_pullback(χ), λ⟩ = ⟨χ, norm(λ)⟩` on basis vectors, with
    /// `norm(λ)` read in `X_*(T)` coordinates.
    pub fn check_adjoint(&self) -> bool {
        let l = self.folded.lift();
        let k = self.folded.corestriction();
        let n = &self.norm_on_cochar;
        // norm lands in X_*(T)
        if k.mul(&l.mul(n)) != *n {
            return false;
        }
        self.norm_pullback.transpose() == l.mul(n)
    }

    /// Independence of the lift: the Γ-sum kills the kernel of restriction.
    pub fn check_well_defined(&self) -> bool {
        let s = group_sum(self.action().diagrams());
        let ker = integer_kernel(self.folded.restriction());
        s.mul(&ker).is_zero()
    }
}

fn group_sum(ms: &[LatticeMap]) -> LatticeMap {
    let n = ms[0].codomain_rank();
    ms.iter().fold(LatticeMap::zero(n, n), |acc, m| acc.add(m).expect("same shape"))
}

/// The conorm `X_*(T^*) = X^*(T) → X^*(T̃) = X_*(T̃^*)`, with both duality
/// maps the identity on coordinates.
#[derive(Clone, Debug)]
pub struct ConormData {
    pub norm: NormData,
    pub conorm_matrix: LatticeMap,
}

impl ConormData {
    pub fn folded(&self) -> &FoldedDatum {
        &self.norm.folded
    }

    pub fn action(&self) -> &GammaAction {
        self.norm.action()
    }

    /// The dual group `G^*` of the fixed-point group.
    pub fn small_dual(&self) -> BasedRootDatum {
        self.folded().fixed().dual()
    }

    /// The dual group `G̃^*`.
    pub fn big_dual(&self) -> BasedRootDatum {
        self.action().base().dual()
    }
}

pub fn build_norm(a: &GammaAction) -> Result<NormData> {
    let folded = fold(a)?;
    let s = group_sum(a.diagrams());
    let norm_on_cochar = group_sum(a.cocharacter_diagrams());
    let lift_t = folded.lift().transpose();
    if !folded.restriction().mul(&lift_t).is_identity() {
        return Err(DualityError::Inconsistent("transpose of the lift is not a section of restriction".into()));
    }
    let norm_pullback = s.mul(&lift_t);
    let nd = NormData { folded, norm_on_cochar, norm_pullback };
    if !nd.check_well_defined() {
        return Err(DualityError::Inconsistent("norm pullback depends on the lift".into()));
    }
    if !nd.check_adjoint() {
        return Err(DualityError::Inconsistent("norm and norm pullback are not adjoint".into()));
    }
    Ok(nd)
}

pub fn build_conorm(a: &GammaAction) -> Result<ConormData> {
    let norm = build_norm(a)?;
    let conorm_matrix = norm.norm_pullback.clone();
    Ok(ConormData { norm, conorm_matrix })
}

/// An isogeny `source → target`, stored as the character pullback
/// `X^*(target) → X^*(source)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isogeny {
    pub source: RootDatum,
    pub target: RootDatum,
    pub char_pullback: LatticeMap,
}

impl Isogeny {
    pub fn new(source: RootDatum, target: RootDatum, char_pullback: LatticeMap) -> Result<Self> {
        let iso = Isogeny { source, target, char_pullback };
        iso.check()?;
        Ok(iso)
    }

    pub fn identity(d: &RootDatum) -> Self {
        Isogeny { source: d.clone(), target: d.clone(), char_pullback: LatticeMap::identity(d.rank()) }
    }

    /// The target whose character lattice is the full-rank sublattice of
    /// `X^*(source)` spanned by the columns of `sublattice`.
    pub fn quotient_by(source: &RootDatum, sublattice: &LatticeMap) -> Result<Self> {
        let n = source.rank();
        if sublattice.codomain_rank() != n || sublattice.domain_rank() != n {
            return Err(DualityError::Isogeny("sublattice must have full rank".into()));
        }
        let inv = sublattice
            .rational_inverse()
            .ok_or_else(|| DualityError::Isogeny("sublattice must have full rank".into()))?;
        let bt = sublattice.transpose();
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        for (r, c) in source.roots().iter().zip(source.coroots()) {
            let rr: Vec<num_rational::BigRational> =
                r.iter().map(|&x| num_rational::BigRational::from_integer(x.into())).collect();
            let img = inv.apply(&rr);
            if img.iter().any(|x| !x.is_integer()) {
                return Err(DualityError::Isogeny(format!("root {r:?} is not in the sublattice")));
            }
            roots.push(img.iter().map(|x| x.to_integer().try_into().expect("small coordinate")).collect());
            coroots.push(from_big(&bt.apply(&to_big(c))));
        }
        let target = RootDatum::new(n, roots, coroots)?;
        Isogeny::new(source.clone(), target, sublattice.clone())
    }

    fn check(&self) -> Result<()> {
        let (ns, nt) = (self.source.rank(), self.target.rank());
        if self.char_pullback.codomain_rank() != ns || self.char_pullback.domain_rank() != nt || ns != nt {
            return Err(DualityError::Isogeny("pullback has the wrong shape".into()));
        }
        let det = self.char_pullback.det()?;
        if det == 0.into() {
            return Err(DualityError::Isogeny("pullback is not injective with finite cokernel".into()));
        }
        if self.source.num_roots() != self.target.num_roots() {
            return Err(DualityError::Isogeny("root counts differ".into()));
        }
        let push = self.char_pullback.transpose();
        let mut hit = vec![false; self.source.num_roots()];
        for (b, bc) in self.target.roots().iter().zip(self.target.coroots()) {
            let a = from_big(&self.char_pullback.apply(&to_big(b)));
            let i = self
                .source
                .index_of(&a)
                .ok_or_else(|| DualityError::Isogeny(format!("target root {b:?} does not pull back to a root")))?;
            if hit[i] {
                return Err(DualityError::Isogeny("roots do not correspond bijectively".into()));
            }
            hit[i] = true;
            if from_big(&push.apply(&to_big(self.source.coroot(i)))) != *bc {
                return Err(DualityError::Isogeny(format!("coroot of {b:?} does not match")));
            }
        }
        Ok(())
    }

    /// Order of the kernel, i.e. of the cokernel of the pullback.
    pub fn degree(&self) -> num_bigint::BigInt {
        smith_normal_form(&self.char_pullback).invariant_factors().iter().product()
    }

    /// Index of the pullback of `target_root` in the source.
    pub fn pull_root(&self, target_root: usize) -> usize {
        let a = from_big(&self.char_pullback.apply(&to_big(self.target.root(target_root))));
        self.source.index_of(&a).expect("checked on construction")
    }
}

/// The isogeny of dual data, `target^* → source^*`, with pullback the
/// transpose.
pub fn dual_isogeny(phi: &Isogeny) -> Isogeny {
    Isogeny {
        source: phi.target.dual(),
        target: phi.source.dual(),
        char_pullback: phi.char_pullback.transpose(),
    }
}

#[derive(Clone, Debug)]
pub struct IsogenySquareReport {
    /// `φ̃^* ∘ conorm'`
    pub lhs: LatticeMap,
    /// `conorm ∘ φ^*` on the folded tori.
    pub rhs: LatticeMap,
    pub folded_pullback: LatticeMap,
    pub holds: bool,
}

/// The Γ-action induced on the target of an equivariant isogeny.
pub fn induced_action(a: &GammaAction, phi: &Isogeny) -> Result<GammaAction> {
    if phi.source != *a.base().datum() {
        return Err(DualityError::NonEquivariant("isogeny source is not the acted-on datum".into()));
    }
    let pb = &phi.char_pullback;
    let inv = pb.rational_inverse().expect("checked on construction");
    let inv_lat = crate::lattice::RatMatrix::from_lattice;
    let mut diagrams = Vec::new();
    for (g, d) in a.diagrams().iter().enumerate() {
        let m = inv.mul(&inv_lat(&d.mul(pb)));
        let m = crate::lattice::rational_to_integer(&m).ok_or_else(|| {
            DualityError::NonEquivariant(format!("element {} does not preserve the target lattice", a.group().name(g)))
        })?;
        diagrams.push(m);
    }
    let push = pb.transpose();
    let twists = a.twists().iter().map(|t| t.apply(&push)).collect();
    let simple: Vec<usize> = a
        .base()
        .simple()
        .iter()
        .map(|&s| {
            (0..phi.target.num_roots())
                .find(|&j| phi.pull_root(j) == s)
                .expect("roots correspond bijectively")
        })
        .collect();
    let base = BasedRootDatum::new(phi.target.clone(), simple)?;
    Ok(GammaAction::new(a.group().clone(), base, diagrams, twists)?)
}

pub fn verify_isogeny_square(a: &GammaAction, phi: &Isogeny) -> Result<IsogenySquareReport> {
    let target_action = induced_action(a, phi)?;
    let rep = target_action.validate();
    if !rep.is_valid() {
        return Err(DualityError::NonEquivariant(format!("induced action is invalid: {rep}")));
    }
    let c = build_conorm(a)?;
    let c2 = build_conorm(&target_action)?;
    let p = c.folded().restriction();
    let p2 = c2.folded().restriction();
    let l2t = c2.folded().lift().transpose();
    let pb = &phi.char_pullback;
    let folded_pullback = p.mul(pb).mul(&l2t);
    if p.mul(pb) != folded_pullback.mul(p2) {
        return Err(DualityError::NonEquivariant("pullback does not descend to the folded tori".into()));
    }
    let lhs = pb.mul(&c2.conorm_matrix);
    let rhs = c.conorm_matrix.mul(&folded_pullback);
    Ok(IsogenySquareReport { holds: lhs == rhs, lhs, rhs, folded_pullback })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::product_action;

    fn sl2() -> BasedRootDatum {
        BasedRootDatum::from_simple(1, &[vec![2]], &[vec![1]]).unwrap()
    }

    fn pgl2_isogeny() -> Isogeny {
        Isogeny::quotient_by(sl2().datum(), &LatticeMap::scalar(1, 2)).unwrap()
    }

    #[test]
    fn trivial_action_conorm_is_scalar() {
        for m in 1..=3 {
            let a = crate::gamma::GammaAction::trivial(sl2(), m);
            let c = build_conorm(&a).unwrap();
            assert_eq!(c.conorm_matrix, LatticeMap::scalar(1, m as i64));
        }
    }

    #[test]
    fn swap_conorm_is_diagonal() {
        let a = product_action(&sl2(), 2, 1).unwrap();
        let c = build_conorm(&a).unwrap();
        assert_eq!(c.conorm_matrix.to_i64_rows().unwrap(), vec![vec![1], vec![1]]);
        assert!(c.norm.check_adjoint());
    }

    #[test]
    fn sl2_pgl2_dual() {
        let phi = pgl2_isogeny();
        assert_eq!(phi.degree(), 2.into());
        assert_eq!(phi.target.roots(), &[vec![1], vec![-1]]);
        let d = dual_isogeny(&phi);
        assert_eq!(d.degree(), 2.into());
        assert_eq!(d.source, *sl2().datum());
        assert_eq!(dual_isogeny(&d), phi);
        let id = Isogeny::identity(sl2().datum());
        assert_eq!(dual_isogeny(&id), Isogeny::identity(&sl2().datum().dual()));
    }

    #[test]
    fn swap_square() {
        let a = product_action(&sl2(), 2, 1).unwrap();
        let phi = Isogeny::quotient_by(a.base().datum(), &LatticeMap::scalar(2, 2)).unwrap();
        let rep = verify_isogeny_square(&a, &phi).unwrap();
        assert!(rep.holds, "{} vs {}", rep.lhs, rep.rhs);
        let rep = verify_isogeny_square(&a, &Isogeny::identity(a.base().datum())).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn non_equivariant_rejected() {
        let a = product_action(&sl2(), 2, 1).unwrap();
        let sub = LatticeMap::from_rows(&[vec![2, 0], vec![0, 1]], 2).unwrap();
        // only the first factor is divided
        let phi = Isogeny::quotient_by(a.base().datum(), &sub).unwrap();
        assert!(matches!(verify_isogeny_square(&a, &phi), Err(DualityError::NonEquivariant(_))));
    }
}
