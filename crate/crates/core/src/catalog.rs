//! Named groups, actions and isogenies.
//!
//! Preset names are `GL4`, `SL3`, `PGL3`, `Sp4`, `SO8`, `Spin8`, `E6ad`,
//! `E6sc`, `F4`, `G2`, `D4`, `D4ad`, products such as `SL4xGL1`, and powers
//! such as `GL3^2`. Parentheses around the parameter are accepted.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::duality::{DualityError, Isogeny};
use crate::gamma::{block_permutation, product_action, swap_twist_action, FiniteGroup, GammaAction, GammaError};
use crate::lattice::{LatticeMap, TorsionVector};
use crate::root_datum::{
    adjoint_from_cartan, cartan_matrix_of, simply_connected_from_cartan, BasedRootDatum, CartanType, Family,
    RootDatumError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{preset}` has no action `{action}`")]
    UnknownAction { preset: String, action: String },
    #[error("preset `{preset}` has no isogeny `{isogeny}`")]
    UnknownIsogeny { preset: String, isogeny: String },
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
}

pub type Result<T> = std::result::Result<T, CatalogError>;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub datum: BasedRootDatum,
    pub actions: Vec<(String, GammaAction)>,
    pub isogenies: Vec<(String, Isogeny)>,
    pub doc: String,
    /// Diagram of the pinned involution, when there is one.
    involution: Option<LatticeMap>,
}

impl Preset {
    fn new(name: impl Into<String>, datum: BasedRootDatum, doc: impl Into<String>) -> Self {
        Preset { name: name.into(), datum, actions: vec![], isogenies: vec![], doc: doc.into(), involution: None }
    }

    pub fn action(&self, name: &str) -> Result<&GammaAction> {
        self.actions.iter().find(|(n, _)| n == name).map(|(_, a)| a).ok_or_else(|| CatalogError::UnknownAction {
            preset: self.name.clone(),
            action: name.to_string(),
        })
    }

    pub fn isogeny(&self, name: &str) -> Result<&Isogeny> {
        self.isogenies.iter().find(|(n, _)| n == name).map(|(_, i)| i).ok_or_else(|| {
            CatalogError::UnknownIsogeny { preset: self.name.clone(), isogeny: name.to_string() }
        })
    }

    pub fn action_names(&self) -> Vec<&str> {
        self.actions.iter().map(|(n, _)| n.as_str()).collect()
    }

    fn with_trivial(mut self) -> Self {
        let a = GammaAction::trivial(self.datum.clone(), 2);
        self.actions.push(("trivial".into(), a));
        self
    }

    fn with_involution(mut self, d: LatticeMap) -> Result<Self> {
        let n = self.datum.rank();
        let a = GammaAction::cyclic(self.datum.clone(), 2, d.clone(), TorsionVector::zero(n))?;
        self.actions.push(("pinned-involution".into(), a));
        self.involution = Some(d);
        Ok(self)
    }

    fn push_action(&mut self, name: &str, a: GammaAction) {
        self.actions.push((name.to_string(), a));
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.name, self.datum.cartan_type(), self.doc)
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|k| i64::from(k == i)).collect()
}

fn diff(n: usize, i: usize, j: usize) -> Vec<i64> {
    (0..n).map(|k| i64::from(k == i) - i64::from(k == j)).collect()
}

fn based(rank: usize, simple: &[Vec<i64>], cosimple: &[Vec<i64>]) -> BasedRootDatum {
    BasedRootDatum::from_simple(rank, simple, cosimple).expect("catalog data is a based root datum")
}

fn from_cartan(family: Family, l: usize, simply_connected: bool) -> BasedRootDatum {
    let c = cartan_matrix_of(family, l);
    let (r, a, co) = if simply_connected { simply_connected_from_cartan(&c) } else { adjoint_from_cartan(&c) };
    based(r, &a, &co)
}

/// `GL(n)` on the diagonal torus, `e_i` basis.
pub fn gl(n: usize) -> BasedRootDatum {
    let s: Vec<Vec<i64>> = (0..n.saturating_sub(1)).map(|i| diff(n, i, i + 1)).collect();
    based(n, &s, &s)
}

/// `SL(n)` in the fundamental-weight basis.
pub fn sl(n: usize) -> BasedRootDatum {
    from_cartan(Family::A, n - 1, true)
}

/// `PGL(n)` in the simple-root basis.
pub fn pgl(n: usize) -> BasedRootDatum {
    from_cartan(Family::A, n - 1, false)
}

/// `Sp(2n)` with roots `±e_i ± e_j`, `±2e_i`.
pub fn sp(two_n: usize) -> BasedRootDatum {
    let n = two_n / 2;
    let mut s: Vec<Vec<i64>> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
    let mut c = s.clone();
    s.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
    c.push(unit(n, n - 1));
    based(n, &s, &c)
}

/// Split `SO(m)` in standard orthogonal coordinates.
pub fn so(m: usize) -> BasedRootDatum {
    let n = m / 2;
    let mut s: Vec<Vec<i64>> = (0..n.saturating_sub(1)).map(|i| diff(n, i, i + 1)).collect();
    let mut c = s.clone();
    if m % 2 == 1 {
        s.push(unit(n, n - 1));
        c.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
    } else if n >= 2 {
        let mut v = unit(n, n - 2);
        v[n - 1] = 1;
        s.push(v.clone());
        c.push(v);
    }
    based(n, &s, &c)
}

/// `Spin(m)` in the fundamental-weight basis, `m ≥ 5`.
pub fn spin(m: usize) -> BasedRootDatum {
    if m % 2 == 1 {
        from_cartan(Family::B, m / 2, true)
    } else {
        from_cartan(Family::D, m / 2, true)
    }
}

fn perm(p: &[usize]) -> LatticeMap {
    block_permutation(1, p)
}

/// `e_i ↦ −e_{n+1−i}`.
fn gl_involution(n: usize) -> LatticeMap {
    let mut m = LatticeMap::zero(n, n);
    for i in 0..n {
        m.set(n - 1 - i, i, BigInt::from(-1));
    }
    m
}

fn reversal(l: usize) -> Vec<usize> {
    (0..l).rev().collect()
}

const D4_TRIALITY: [usize; 4] = [2, 1, 3, 0];
const D4_SWAP: [usize; 4] = [0, 1, 3, 2];
const E6_INVOLUTION: [usize; 6] = [5, 1, 4, 3, 2, 0];

/// Twists of the non-pinned exceptional actions, on cocharacter coordinates.
const E6_C4_TWIST: ([i64; 6], i64) = ([0, 1, 0, 0, 0, 0], 2);
const D4_TWISTED_TRIALITY: ([i64; 4], i64) = ([0, 1, 0, 0], 3);

fn d4(simply_connected: bool, name: &str) -> Result<Preset> {
    let base = from_cartan(Family::D, 4, simply_connected);
    let mut p = Preset::new(name, base.clone(), "D4 with its outer automorphisms").with_trivial();
    p = p.with_involution(perm(&D4_SWAP))?;
    let zero = TorsionVector::zero(4);
    p.push_action("triality", GammaAction::cyclic(base.clone(), 3, perm(&D4_TRIALITY), zero.clone())?);
    let s3 = GammaAction::from_generators(
        FiniteGroup::symmetric3(),
        base.clone(),
        &[(3, perm(&D4_TRIALITY), zero.clone()), (1, perm(&D4_SWAP), zero)],
    )?;
    p.push_action("S3", s3);
    let (t, den) = D4_TWISTED_TRIALITY;
    p.push_action(
        "twisted-triality",
        GammaAction::cyclic(base, 3, perm(&D4_TRIALITY), TorsionVector::from_i64(&t, den))?,
    );
    Ok(p)
}

/// Character pullback to a simply connected datum in the weight basis: the
/// coordinates of `χ` are `⟨χ, α_j^∨⟩`.
fn weight_pullback(target: &BasedRootDatum) -> LatticeMap {
    let d = target.datum();
    let rows: Vec<Vec<i64>> = target.simple().iter().map(|&s| d.coroot(s).to_vec()).collect();
    LatticeMap::from_rows(&rows, d.rank()).expect("rectangular")
}

fn single(family: &str, n: Option<usize>, name: &str) -> Result<Preset> {
    let unknown = || CatalogError::UnknownPreset(name.to_string());
    let need = |lo: usize| n.filter(|&n| n >= lo).ok_or_else(unknown);
    let p = match family {
        "GL" => {
            let n = need(1)?;
            let mut p = Preset::new(name, gl(n), "general linear group").with_trivial().with_involution(gl_involution(n))?;
            if n % 2 == 0 {
                let t: Vec<i64> = (0..n).map(|i| i64::from(i % 2 == 1)).collect();
                let a = GammaAction::cyclic(gl(n), 2, gl_involution(n), TorsionVector::from_i64(&t, 2))?;
                p.push_action("outer-SO", a);
                let b = p.action("pinned-involution")?.clone();
                p.push_action("swap-of-blocks", b);
            }
            if n >= 2 {
                let mut s: Vec<Vec<i64>> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                s.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
                let iso = Isogeny::quotient_by(p.datum.datum(), &LatticeMap::from_columns(&s, n).expect("square"))?;
                p.isogenies.push(("to-center-quotient".into(), iso));
            }
            p
        }
        "SL" => {
            let n = need(2)?;
            let mut p = Preset::new(name, sl(n), "special linear group, weight coordinates").with_trivial();
            if n >= 3 {
                p = p.with_involution(perm(&reversal(n - 1)))?;
            }
            let roots: Vec<Vec<i64>> = p.datum.simple().iter().map(|&s| p.datum.datum().root(s).to_vec()).collect();
            let iso = Isogeny::quotient_by(p.datum.datum(), &LatticeMap::from_columns(&roots, n - 1).expect("square"))?;
            p.isogenies.push(("to-PGL".into(), iso));
            p
        }
        "PGL" => {
            let n = need(2)?;
            let mut p = Preset::new(name, pgl(n), "projective linear group, root coordinates").with_trivial();
            if n >= 3 {
                p = p.with_involution(perm(&reversal(n - 1)))?;
            }
            p
        }
        "Sp" => {
            let n = need(2).and_then(|n| if n % 2 == 0 { Ok(n) } else { Err(unknown()) })?;
            Preset::new(name, sp(n), "symplectic group, standard coordinates").with_trivial()
        }
        "SO" => {
            let m = need(3)?;
            let mut p = Preset::new(name, so(m), "split special orthogonal group, standard coordinates").with_trivial();
            if m % 2 == 0 {
                let k = m / 2;
                let mut d = LatticeMap::identity(k);
                d.set(k - 1, k - 1, BigInt::from(-1));
                p = p.with_involution(d)?;
            }
            p
        }
        "Spin" => {
            let m = need(5)?;
            let mut p = Preset::new(name, spin(m), "spin group, weight coordinates").with_trivial();
            if m % 2 == 0 {
                let k = m / 2;
                let mut s: Vec<usize> = (0..k).collect();
                s.swap(k - 2, k - 1);
                p = p.with_involution(perm(&s))?;
            }
            let iso = Isogeny::quotient_by(p.datum.datum(), &weight_pullback(&so(m)))?;
            p.isogenies.push(("to-SO".into(), iso));
            p
        }
        "E6ad" | "E6" => {
            let base = from_cartan(Family::E, 6, false);
            let mut p =
                Preset::new(name, base.clone(), "adjoint E6, root coordinates").with_trivial().with_involution(perm(&E6_INVOLUTION))?;
            let (t, den) = E6_C4_TWIST;
            p.push_action("C4-twist", GammaAction::cyclic(base, 2, perm(&E6_INVOLUTION), TorsionVector::from_i64(&t, den))?);
            p
        }
        "E6sc" => {
            let base = from_cartan(Family::E, 6, true);
            let mut p = Preset::new(name, base.clone(), "simply connected E6, weight coordinates")
                .with_trivial()
                .with_involution(perm(&E6_INVOLUTION))?;
            let iso = Isogeny::quotient_by(base.datum(), &weight_pullback(&from_cartan(Family::E, 6, false)))?;
            p.isogenies.push(("to-adjoint".into(), iso));
            p
        }
        "F4" => Preset::new(name, from_cartan(Family::F, 4, false), "F4, root coordinates").with_trivial(),
        "G2" => Preset::new(name, from_cartan(Family::G, 2, false), "G2, root coordinates").with_trivial(),
        "D4" => d4(true, name)?,
        "D4ad" => d4(false, name)?,
        _ => return Err(unknown()),
    };
    Ok(p)
}

fn split_family(s: &str) -> (String, Option<usize>) {
    let t: String = s.chars().filter(|c| *c != '(' && *c != ')').collect();
    for fixed in ["E6ad", "E6sc", "D4ad"] {
        if t == fixed {
            return (t, None);
        }
    }
    let pos = t.find(|c: char| c.is_ascii_digit()).unwrap_or(t.len());
    let (fam, num) = t.split_at(pos);
    if matches!(fam, "E" | "F" | "G" | "D") {
        return (t.clone(), None);
    }
    (fam.to_string(), num.parse().ok())
}

fn atom(s: &str) -> Result<Preset> {
    let (fam, n) = split_family(s);
    single(&fam, n, s)
}

fn power(p: Preset, r: usize, name: &str) -> Result<Preset> {
    let h = p.datum.clone();
    let base = BasedRootDatum::product(&vec![h.clone(); r]);
    let mut out = Preset::new(name, base, format!("{r} copies of {}", p.name)).with_trivial();
    out.push_action("cycle", product_action(&h, r, 1)?);
    if let (2, Some(theta)) = (r, &p.involution) {
        out.push_action("swap-twist", swap_twist_action(&h, theta)?);
    }
    Ok(out)
}

fn product(parts: Vec<Preset>, name: &str) -> Result<Preset> {
    let bases: Vec<BasedRootDatum> = parts.iter().map(|p| p.datum.clone()).collect();
    let base = BasedRootDatum::product(&bases);
    let mut out = Preset::new(name, base.clone(), "direct product").with_trivial();
    if parts.iter().all(|p| p.involution.is_some()) {
        let n = base.rank();
        let mut d = LatticeMap::zero(n, n);
        let mut off = 0;
        for p in &parts {
            let b = p.involution.as_ref().expect("checked");
            d.set_block(off, off, b);
            off += b.codomain_rank();
        }
        out = out.with_involution(d)?;
    }
    // SL(n) × GL(1) → GL(n) by multiplication
    if let [a, b] = parts.as_slice() {
        let (fa, na) = split_family(&a.name);
        if fa == "SL" && b.name == "GL1" {
            let n = na.expect("SL has a parameter");
            let g = gl(n);
            let mut rows: Vec<Vec<i64>> = g.simple().iter().map(|&s| g.datum().coroot(s).to_vec()).collect();
            rows.push(vec![1; n]);
            let iso = Isogeny::new(base.datum().clone(), g.datum().clone(), LatticeMap::from_rows(&rows, n).expect("square"))?;
            out.isogenies.push(("to-GL".into(), iso));
        }
    }
    Ok(out)
}

pub fn preset(name: &str) -> Result<Preset> {
    let name = name.trim();
    if let Some((h, r)) = name.rsplit_once('^') {
        let r: usize = r.parse().map_err(|_| CatalogError::UnknownPreset(name.into()))?;
        if r == 0 {
            return Err(CatalogError::UnknownPreset(name.into()));
        }
        return power(preset(h)?, r, name);
    }
    let parts: Vec<&str> = name.split('x').collect();
    if parts.len() > 1 {
        let ps = parts.iter().map(|p| atom(p)).collect::<Result<Vec<_>>>()?;
        return product(ps, name);
    }
    atom(name)
}

/// `(preset, action)` pairs covered by the acceptance checks.
pub fn catalog_actions() -> Vec<(&'static str, &'static str)> {
    vec![
        ("GL2", "pinned-involution"),
        ("GL2", "outer-SO"),
        ("GL3", "pinned-involution"),
        ("GL4", "pinned-involution"),
        ("GL4", "outer-SO"),
        ("GL6", "pinned-involution"),
        ("GL6", "outer-SO"),
        ("SL3", "pinned-involution"),
        ("SL5", "pinned-involution"),
        ("PGL4", "pinned-involution"),
        ("SO8", "pinned-involution"),
        ("Spin8", "pinned-involution"),
        ("E6ad", "pinned-involution"),
        ("E6ad", "C4-twist"),
        ("E6sc", "pinned-involution"),
        ("D4", "triality"),
        ("D4", "S3"),
        ("D4", "twisted-triality"),
        ("D4ad", "triality"),
        ("GL2^2", "cycle"),
        ("GL2^3", "cycle"),
        ("GL3^2", "swap-twist"),
        ("SL4xGL1", "pinned-involution"),
        ("F4", "trivial"),
        ("G2", "trivial"),
        ("Sp4", "trivial"),
    ]
}

/// Expected folded types.
pub fn golden_fold_table() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("GL2", "pinned-involution", "C1"),
        ("GL4", "pinned-involution", "C2"),
        ("GL6", "pinned-involution", "C3"),
        ("GL2", "outer-SO", "T"),
        ("GL4", "outer-SO", "D2"),
        ("GL6", "outer-SO", "D3"),
        ("SL3", "pinned-involution", "B1"),
        ("SL5", "pinned-involution", "B2"),
        ("GL3", "pinned-involution", "B1"),
        ("SO8", "pinned-involution", "B3"),
        ("Spin8", "pinned-involution", "B3"),
        ("E6ad", "pinned-involution", "F4"),
        ("E6sc", "pinned-involution", "F4"),
        ("E6ad", "C4-twist", "C4"),
        ("D4", "triality", "G2"),
        ("D4ad", "triality", "G2"),
        ("D4", "S3", "G2"),
        ("D4", "twisted-triality", "A2"),
        ("GL2^3", "cycle", "A1"),
        ("F4", "trivial", "F4"),
    ]
}

/// Lifting chains named by their fixed groups.
pub fn lifting_chains() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("GL4", "outer-SO", "SO(4) inside GL(4) through Sp(4)"),
        ("E6ad", "C4-twist", "PSp(8) inside E6 through F4"),
        ("D4", "twisted-triality", "PGL(3) inside Spin(8) through G2"),
    ]
}

pub fn cartan(label: &str) -> CartanType {
    label.parse().expect("golden labels parse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folding::fold;
    use crate::root_datum::find_isomorphism;

    #[test]
    fn presets_validate() {
        for name in [
            "GL1", "GL4", "SL2", "SL4", "PGL3", "Sp4", "Sp6", "SO3", "SO4", "SO5", "SO8", "Spin5", "Spin8", "Spin7",
            "E6ad", "E6sc", "F4", "G2", "D4", "D4ad", "GL3^2", "SL3xGL1", "GL(4)",
        ] {
            let p = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(p.datum.datum().validate().is_valid(), "{name}");
            for (an, a) in &p.actions {
                assert!(a.validate().is_valid(), "{name}/{an}: {}", a.validate());
            }
        }
        assert!(preset("XY3").is_err());
        assert!(preset("Sp3").is_err());
    }

    #[test]
    fn types_of_presets() {
        for (name, ty) in [("Sp6", "C3"), ("SO7", "B3"), ("SO8", "D4"), ("Spin7", "B3"), ("E6sc", "E6"), ("G2", "G2")] {
            assert!(preset(name).unwrap().datum.cartan_type().same_semisimple_type(&cartan(ty)), "{name}");
        }
        assert!(preset("Sp4").unwrap().datum.datum().dual().same_datum(so(5).datum()));
    }

    #[test]
    fn golden_folds() {
        for (p, a, ty) in golden_fold_table() {
            let f = fold(preset(p).unwrap().action(a).unwrap()).unwrap();
            assert!(f.cartan_type().same_semisimple_type(&cartan(ty)), "{p}/{a}: got {}", f.cartan_type());
        }
    }

    #[test]
    fn twisted_fixed_groups_are_adjoint() {
        let f = fold(preset("E6ad").unwrap().action("C4-twist").unwrap()).unwrap();
        assert!(find_isomorphism(f.fixed(), &from_cartan(Family::C, 4, false)).is_some());
        let f = fold(preset("D4").unwrap().action("twisted-triality").unwrap()).unwrap();
        assert!(find_isomorphism(f.fixed(), &pgl(3)).is_some());
    }

    #[test]
    fn isogenies_exist() {
        let p = preset("SL3").unwrap();
        let iso = p.isogeny("to-PGL").unwrap();
        assert_eq!(iso.target, *pgl(3).datum());
        assert_eq!(iso.degree(), BigInt::from(3));
        assert_eq!(preset("Spin8").unwrap().isogeny("to-SO").unwrap().degree(), BigInt::from(2));
        assert_eq!(preset("SL4xGL1").unwrap().isogeny("to-GL").unwrap().degree(), BigInt::from(4));
        assert_eq!(preset("GL4").unwrap().isogeny("to-center-quotient").unwrap().degree(), BigInt::from(2));
        assert_eq!(preset("E6sc").unwrap().isogeny("to-adjoint").unwrap().degree(), BigInt::from(3));
    }
}

