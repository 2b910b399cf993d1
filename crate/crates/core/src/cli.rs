//! Batch command-line interface: JSON job configs in, tables or JSON out.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog::{golden_fold_table, preset, CatalogError};
use crate::classes::{
    enumerate_stable_classes_in, levi_for_element, verify_levi_factorization, verify_normal_subgroup_composition,
    verify_pinning_factorization, verify_product_conorm, verify_trivial_action, CheckReport, ClassError,
    ConormContext, FrobeniusStructure,
};
use crate::duality::{build_conorm, verify_isogeny_square, DualityError, Isogeny};
use crate::folding::{dual_length_comparison, fold, restricted_root_comparison, FoldError};
use crate::gamma::{FiniteGroup, GammaAction, GammaError};
use crate::lattice::{LatticeError, LatticeMap, TorsionVector};
use crate::root_datum::{BasedRootDatum, RootDatumError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Class(#[from] ClassError),
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

impl CliError {
    fn invalid(path: &str, e: impl std::fmt::Display) -> Self {
        CliError::Invalid { path: path.to_string(), message: e.to_string() }
    }

    /// Input problems exit with 2, failed computations with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Invalid { .. } | CliError::Catalog(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSpec {
    pub num: Vec<i64>,
    pub den: i64,
}

impl TorsionSpec {
    fn to_vector(&self) -> TorsionVector {
        TorsionVector::from_i64(&self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct DatumSpec {
    pub rank: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AbstractGroup {
    Cyclic(usize),
    Symmetric3,
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct GeneratorSpec {
    pub element: usize,
    /// Row-major matrix on the character lattice.
    pub diagram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<TorsionSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct ActionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<AbstractGroup>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct FrobeniusSpec {
    pub q: u64,
    /// Defaults to the identity (split form).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isogeny: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<TorsionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_values: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<FrobeniusSpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: Options,
}

fn is_default(o: &Options) -> bool {
    *o == Options::default()
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Budget {
    Small,
    Full,
}

impl Budget {
    fn q_values(self) -> Vec<u64> {
        match self {
            Budget::Small => vec![2, 3],
            Budget::Full => vec![2, 3, 5],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Product,
    Trivial,
    NormalSubgroup,
    Isogeny,
    Pinning,
    Levi,
    RootInclusion,
    LongRoots,
}

#[derive(Debug, Parser)]
#[command(name = "conorm", about = "Fold root data under finite groups and map stable classes by the conorm")]
pub struct Cli {
    #[arg(long, global = true)]
    pub config: Option<String>,
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub action: Option<String>,
    #[arg(long, global = true)]
    pub q: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value = "full")]
    pub budget: Budget,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root datum of the fixed-point group.
    Fold,
    /// Norm and conorm matrices.
    Conorm,
    /// Stable semisimple classes of the dual of the (fixed) group.
    Classes,
    /// Stable classes of G^* with their conorm images.
    Lift,
    /// Run one of the factorization checks.
    Verify {
        #[arg(value_enum)]
        which: Which,
    },
    /// List presets and their actions.
    Presets,
    /// Print the normalized config.
    Config,
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Job {
    config: JobConfig,
    format: Format,
    budget: Budget,
    q: Option<u64>,
}

impl Job {
    fn base(&self) -> Result<BasedRootDatum> {
        let g = self.config.group.as_ref().ok_or_else(|| CliError::Usage("no group given (--preset)".into()))?;
        match (&g.preset, &g.datum) {
            (Some(p), None) => Ok(preset(p)?.datum),
            (None, Some(d)) => {
                BasedRootDatum::from_simple(d.rank, &d.simple_roots, &d.simple_coroots).map_err(|e| CliError::invalid("group.datum", e))
            }
            _ => Err(CliError::invalid("group", "exactly one of `preset` and `datum` is required")),
        }
    }

    fn action(&self) -> Result<Option<GammaAction>> {
        let Some(a) = &self.config.action else { return Ok(None) };
        if let Some(name) = &a.preset {
            let g = self.config.group.as_ref().and_then(|g| g.preset.as_ref()).ok_or_else(|| {
                CliError::invalid("action.preset", "a preset action needs a preset group")
            })?;
            return Ok(Some(preset(g)?.action(name)?.clone()));
        }
        let base = self.base()?;
        let n = base.rank();
        let group = match &a.group {
            Some(AbstractGroup::Cyclic(k)) => FiniteGroup::cyclic(*k),
            Some(AbstractGroup::Symmetric3) => FiniteGroup::symmetric3(),
            Some(AbstractGroup::Table(t)) => {
                FiniteGroup::new(t.clone(), None).map_err(|e| CliError::invalid("action.group.table", e))?
            }
            None => return Err(CliError::invalid("action", "either `preset` or `group` is required")),
        };
        let mut gens = Vec::new();
        for (i, g) in a.generators.iter().enumerate() {
            let path = format!("action.generators[{i}]");
            let d = LatticeMap::from_rows(&g.diagram, n).map_err(|e| CliError::invalid(&format!("{path}.diagram"), e))?;
            if g.diagram.len() != n {
                return Err(CliError::invalid(&format!("{path}.diagram"), format!("expected {n} rows")));
            }
            let t = match &g.twist {
                Some(t) if t.num.len() != n || t.den <= 0 => {
                    return Err(CliError::invalid(&format!("{path}.twist"), "wrong length or non-positive denominator"))
                }
                Some(t) => t.to_vector(),
                None => TorsionVector::zero(n),
            };
            if g.element >= group.size() {
                return Err(CliError::invalid(&format!("{path}.element"), "not an element of the group"));
            }
            gens.push((g.element, d, t));
        }
        let act = GammaAction::from_generators(group, base, &gens).map_err(|e| CliError::invalid("action", e))?;
        let rep = act.validate();
        if !rep.is_valid() {
            return Err(CliError::invalid("action", rep));
        }
        Ok(Some(act))
    }

    fn require_action(&self) -> Result<GammaAction> {
        self.action()?.ok_or_else(|| CliError::Usage("no action given (--action)".into()))
    }

    fn q_single(&self) -> Result<u64> {
        self.q
            .or_else(|| self.config.frobenius.as_ref().map(|f| f.q))
            .ok_or_else(|| CliError::Usage("no field size given (--q)".into()))
    }

    fn q_values(&self) -> Vec<u64> {
        if let Some(q) = self.q {
            return vec![q];
        }
        self.config.options.q_values.clone().unwrap_or_else(|| self.budget.q_values())
    }

    /// Frobenius on the dual datum; `tau` from the config acts on `rank`
    /// coordinates.
    fn frobenius(&self, rank: usize) -> Result<FrobeniusStructure> {
        let q = self.q_single()?;
        match self.config.frobenius.as_ref().and_then(|f| f.tau.as_ref()) {
            None => Ok(FrobeniusStructure::split(q, rank)?),
            Some(rows) => {
                let tau = LatticeMap::from_rows(rows, rank).map_err(|e| CliError::invalid("frobenius.tau", e))?;
                FrobeniusStructure::new(q, tau).map_err(|e| CliError::invalid("frobenius", e))
            }
        }
    }
}

fn matrix_json(m: &LatticeMap) -> Value {
    json!(m.to_i64_rows().unwrap_or_default())
}

fn torsion_json(t: &TorsionVector) -> Value {
    let num: Vec<String> = t.numerators().iter().map(|x| x.to_string()).collect();
    json!({ "num": num, "den": t.denominator().to_string() })
}

fn matrix_table(m: &LatticeMap) -> String {
    let rows = m.to_i64_rows().unwrap_or_default();
    let mut s = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:>3}")).collect();
        let _ = writeln!(s, "  [{}]", cells.join(" "));
    }
    s
}

fn preset_names(job: &Job) -> (String, String) {
    let g = job.config.group.as_ref().and_then(|g| g.preset.clone()).unwrap_or_else(|| "datum".into());
    let a = job.config.action.as_ref().and_then(|a| a.preset.clone()).unwrap_or_else(|| "explicit".into());
    (g, a)
}

fn cmd_fold(job: &Job) -> Result<(i32, String)> {
    let a = job.require_action()?;
    let f = fold(&a)?;
    let computed = f.cartan_type();
    let (g, an) = preset_names(job);
    let expected = golden_fold_table().into_iter().find(|(p, x, _)| *p == g && *x == an).map(|(_, _, t)| t);
    let label = match expected {
        Some(t) if t != computed.label() => format!("{t} (={})", computed.label().replace('x', "×")),
        _ => computed.label(),
    };
    let fd = f.fixed().datum();
    if job.format == Format::Json {
        let roots: Vec<Value> = (0..fd.num_roots())
            .map(|i| {
                let p = f.provenance(i);
                json!({ "root": fd.root(i), "coroot": fd.coroot(i), "sources": p.sources, "multiplier": p.multiplier })
            })
            .collect();
        let v = json!({
            "group": g, "action": an, "source_type": a.base().cartan_type().label(), "type": computed.label(),
            "rank": fd.rank(), "restriction": matrix_json(f.restriction()), "roots": roots,
        });
        return Ok((EXIT_PASS, serde_json::to_string_pretty(&v).expect("json")));
    }
    let mut s = String::new();
    let _ = writeln!(s, "{g}/{an}: type {label}");
    let _ = writeln!(s, "source type {}, fixed torus rank {}, {} roots", a.base().cartan_type().label(), fd.rank(), fd.num_roots());
    let _ = writeln!(s, "restriction:\n{}", matrix_table(f.restriction()));
    for i in f.fixed().positive_roots() {
        let p = f.provenance(i);
        let _ = writeln!(s, "  {:?}  from {:?}  multiplier {}", fd.root(i), p.sources, p.multiplier);
    }
    Ok((EXIT_PASS, s))
}

fn cmd_conorm(job: &Job) -> Result<(i32, String)> {
    let a = job.require_action()?;
    let cd = build_conorm(&a)?;
    let adjoint = cd.norm.check_adjoint();
    let well = cd.norm.check_well_defined();
    let code = if adjoint && well { EXIT_PASS } else { EXIT_FAIL };
    if job.format == Format::Json {
        let v = json!({
            "conorm": matrix_json(&cd.conorm_matrix), "norm": matrix_json(&cd.norm.norm_on_cochar),
            "adjoint": adjoint, "well_defined": well,
        });
        return Ok((code, serde_json::to_string_pretty(&v).expect("json")));
    }
    let mut s = String::new();
    let _ = writeln!(s, "conorm X^*(T) -> X^*(T~):\n{}", matrix_table(&cd.conorm_matrix));
    let _ = writeln!(s, "norm on X_*(T~):\n{}", matrix_table(&cd.norm.norm_on_cochar));
    let _ = writeln!(s, "adjoint: {adjoint}\nwell defined: {well}");
    Ok((code, s))
}

fn class_space(job: &Job) -> Result<(Option<ConormContext>, crate::classes::OrbitSpace)> {
    match job.action()? {
        Some(a) => {
            let ctx = ConormContext::new(&a)?;
            let small = ctx.small.clone();
            Ok((Some(ctx), small))
        }
        None => Ok((None, crate::classes::OrbitSpace::new(&job.base()?.dual()))),
    }
}

fn cmd_classes(job: &Job) -> Result<(i32, String)> {
    let (_, space) = class_space(job)?;
    let frob = job.frobenius(space.rank())?;
    let classes = enumerate_stable_classes_in(&space, &frob)?;
    if job.format == Format::Json {
        let rows: Vec<Value> = classes
            .iter()
            .map(|c| json!({ "representative": torsion_json(&c.class.representative.value), "orbit_size": c.class.orbit_size }))
            .collect();
        let v = json!({ "q": frob.q, "count": classes.len(), "classes": rows });
        return Ok((EXIT_PASS, serde_json::to_string_pretty(&v).expect("json")));
    }
    let mut s = String::new();
    let _ = writeln!(s, "{} stable classes for q = {}", classes.len(), frob.q);
    let _ = writeln!(s, "{:>5}  {:<28} {:>6}", "#", "representative", "orbit");
    for (i, c) in classes.iter().enumerate() {
        let _ = writeln!(s, "{:>5}  {:<28} {:>6}", i + 1, c.class.to_string(), c.class.orbit_size);
    }
    Ok((EXIT_PASS, s))
}

fn cmd_lift(job: &Job) -> Result<(i32, String)> {
    let a = job.require_action()?;
    let ctx = ConormContext::new(&a)?;
    let big = job.frobenius(ctx.big.rank())?;
    let small = ctx.descend_frobenius(&big)?;
    let classes = enumerate_stable_classes_in(&ctx.small, &small)?;
    let mut rows = Vec::new();
    for c in &classes {
        rows.push((c.clone(), ctx.lift_stable_class(c, &small, &big)?));
    }
    if job.format == Format::Json {
        let v: Vec<Value> = rows
            .iter()
            .map(|(c, l)| {
                json!({ "class": torsion_json(&c.class.representative.value), "image": torsion_json(&l.class.representative.value) })
            })
            .collect();
        let v = json!({ "q": big.q, "count": rows.len(), "lifts": v });
        return Ok((EXIT_PASS, serde_json::to_string_pretty(&v).expect("json")));
    }
    let mut s = String::new();
    let _ = writeln!(s, "{} stable classes for q = {}", rows.len(), big.q);
    for (c, l) in &rows {
        let _ = writeln!(s, "  {:<28} -> {}", c.class.to_string(), l.class);
    }
    Ok((EXIT_PASS, s))
}

/// Points whose centralizer has semisimple rank one, up to three of them.
fn default_levi_points(a: &GammaAction) -> Result<Vec<TorsionVector>> {
    let ctx = ConormContext::new(a)?;
    let d = ctx.small.datum().clone();
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for den in 3..=7i64 {
        let r = d.rank() as u32;
        for k in 0..den.pow(r) {
            let num: Vec<i64> = (0..r).map(|i| (k / den.pow(i)) % den).collect();
            let x = TorsionVector::from_i64(&num, den);
            let c = ctx.small.canonicalize(&x)?;
            if seen.contains(&c) {
                continue;
            }
            seen.push(c.clone());
            let l = levi_for_element(&d, &c.representative.value)?;
            if l.proper && l.centralizer.len() == 2 {
                out.push(c.representative.value.clone());
                if out.len() == 3 {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

fn default_subgroup(a: &GammaAction) -> Result<Vec<usize>> {
    let g = a.group();
    let squares: Vec<usize> = (0..g.size()).map(|x| g.mul(x, x)).collect();
    let h = g.generated(&squares);
    if h.len() == g.size() || !g.is_normal(&h) {
        return Err(CliError::Usage("no default normal subgroup; set options.subgroup".into()));
    }
    Ok(h)
}

fn cmd_verify(job: &Job, which: Which) -> Result<(i32, CheckReport)> {
    let qs = job.q_values();
    let rep = match which {
        Which::Product => {
            let r = job.config.options.r.unwrap_or(2);
            let m = job.config.options.m.unwrap_or(1);
            verify_product_conorm(r, m, &job.base()?)?
        }
        Which::Trivial => verify_trivial_action(&job.base()?, job.config.options.m.unwrap_or(2), &qs)?,
        Which::NormalSubgroup => {
            let a = job.require_action()?;
            let h = match &job.config.options.subgroup {
                Some(h) => h.clone(),
                None => default_subgroup(&a)?,
            };
            verify_normal_subgroup_composition(&a, &h, &qs)?
        }
        Which::Isogeny => {
            let a = job.require_action()?;
            let name = job.config.group.as_ref().and_then(|g| g.preset.clone()).ok_or_else(|| {
                CliError::Usage("isogeny checks need a preset group".into())
            })?;
            let p = preset(&name)?;
            let iso: Isogeny = match &job.config.options.isogeny {
                Some(i) => p.isogeny(i)?.clone(),
                None => p
                    .isogenies
                    .first()
                    .map(|(_, i)| i.clone())
                    .ok_or_else(|| CliError::Usage(format!("preset {name} has no isogenies")))?,
            };
            let sq = verify_isogeny_square(&a, &iso)?;
            let mut rep = CheckReport { name: "isogeny square".into(), ..Default::default() };
            rep.checks.push(("conorm commutes with the isogeny".into(), sq.holds));
            if !sq.holds {
                rep.witnesses.push(format!("{} ≠ {}", sq.lhs, sq.rhs));
            }
            rep
        }
        Which::Pinning => verify_pinning_factorization(&job.require_action()?, &qs)?,
        Which::Levi => {
            let a = job.require_action()?;
            let points: Vec<TorsionVector> = if job.config.options.points.is_empty() {
                default_levi_points(&a)?
            } else {
                job.config.options.points.iter().map(|p| p.to_vector()).collect()
            };
            let mut rep = CheckReport { name: "Levi factorization".into(), ..Default::default() };
            for p in points {
                let r = verify_levi_factorization(&a, &p)?;
                rep.checks.push((format!("{p}"), r.passed()));
                rep.witnesses.extend(r.witnesses);
                rep.classes_checked += r.classes_checked;
            }
            rep
        }
        Which::RootInclusion => {
            let r = restricted_root_comparison(&job.require_action()?)?;
            let mut rep = CheckReport { name: "restricted root inclusion".into(), ..Default::default() };
            if r.root_inclusion_hypothesis.holds() {
                rep.checks.push(("Φ ⊆ underline Φ".into(), r.phi_in_underline));
            } else {
                rep.checks.push((format!("hypothesis {}", r.root_inclusion_hypothesis), true));
            }
            if r.cyclic_faithful_hypothesis.holds() {
                rep.checks.push(("short roots of underline Φ lie in Φ".into(), r.underline_short_in_phi));
            }
            rep.checks.push(("rational averages agree".into(), r.averages_agree));
            rep
        }
        Which::LongRoots => {
            let r = dual_length_comparison(&job.require_action()?)?;
            let mut rep = CheckReport { name: "long roots of the dual".into(), ..Default::default() };
            rep.checks.push(("long roots of underline Φ^* lie in Φ^*".into(), r.long_in_phi));
            rep.checks.push(("Φ^* ⊆ underline Φ^*".into(), r.phi_in_underline));
            rep
        }
    };
    Ok((if rep.passed() { EXIT_PASS } else { EXIT_FAIL }, rep))
}

fn report_json(r: &CheckReport) -> Value {
    let checks: Vec<Value> = r.checks.iter().map(|(w, ok)| json!({ "check": w, "ok": ok })).collect();
    json!({
        "name": r.name, "passed": r.passed(), "checks": checks,
        "classes_checked": r.classes_checked, "witnesses": r.witnesses,
    })
}

fn cmd_presets(format: Format) -> String {
    let names = [
        "GL4", "SL3", "PGL3", "Sp4", "SO5", "SO8", "Spin8", "E6ad", "E6sc", "F4", "G2", "D4", "D4ad", "GL2^2", "GL3^2",
        "SL4xGL1",
    ];
    let presets: Vec<_> = names.iter().filter_map(|n| preset(n).ok()).collect();
    if format == Format::Json {
        let v: Vec<Value> = presets
            .iter()
            .map(|p| {
                json!({
                    "name": p.name, "type": p.datum.cartan_type().label(), "actions": p.action_names(),
                    "isogenies": p.isogenies.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(), "doc": p.doc,
                })
            })
            .collect();
        return serde_json::to_string_pretty(&v).expect("json");
    }
    let mut s = String::from("Families: GL<n>, SL<n>, PGL<n>, Sp<2n>, SO<n>, Spin<n>; products AxB; powers H^r\n");
    for p in presets {
        let isos: Vec<&str> = p.isogenies.iter().map(|(n, _)| n.as_str()).collect();
        let _ = writeln!(s, "{:<10} {:<8} actions: {}", p.name, p.datum.cartan_type().label(), p.action_names().join(", "));
        if !isos.is_empty() {
            let _ = writeln!(s, "{:<19} isogenies: {}", "", isos.join(", "));
        }
    }
    s
}

fn load_job(cli: &Cli) -> Result<Job> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
            JobConfig::parse(&text)?
        }
        None => JobConfig::default(),
    };
    if let Some(p) = &cli.preset {
        config.group = Some(GroupSpec { preset: Some(p.clone()), datum: None });
    }
    if let Some(a) = &cli.action {
        config.action = Some(ActionSpec { preset: Some(a.clone()), group: None, generators: vec![] });
    }
    Ok(Job { config, format: cli.format, budget: cli.budget, q: cli.q })
}

fn execute(cli: &Cli) -> Result<(i32, String)> {
    if let Command::Presets = cli.command {
        return Ok((EXIT_PASS, cmd_presets(cli.format)));
    }
    let job = load_job(cli)?;
    match &cli.command {
        Command::Fold => cmd_fold(&job),
        Command::Conorm => cmd_conorm(&job),
        Command::Classes => cmd_classes(&job),
        Command::Lift => cmd_lift(&job),
        Command::Config => Ok((EXIT_PASS, job.config.to_json())),
        Command::Verify { which } => {
            let (code, rep) = cmd_verify(&job, *which)?;
            let out = match job.format {
                Format::Json => serde_json::to_string_pretty(&report_json(&rep)).expect("json"),
                Format::Table => rep.to_string(),
            };
            Ok((code, out))
        }
        Command::Presets => unreachable!("handled above"),
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok((code, mut stdout)) => {
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run(std::iter::once("conorm").chain(args.iter().copied()))
    }

    #[test]
    fn fold_outer_so() {
        let o = go(&["fold", "--preset", "GL4", "--action", "outer-SO"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.contains("type D2 (=A1×A1)"), "{}", o.stdout);
    }

    #[test]
    fn classes_gl2() {
        let o = go(&["classes", "--preset", "GL2", "--q", "3", "--format", "json"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["count"], 6);
        let o = go(&["classes", "--preset", "GL2", "--q", "3"]);
        assert_eq!(o.stdout.lines().filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit())).count(), 7);
    }

    #[test]
    fn verify_pinning_passes() {
        let o = go(&["verify", "pinning", "--preset", "GL4", "--action", "outer-SO", "--budget", "small"]);
        assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
        assert!(o.stdout.contains("PASS"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(go(&["fold"]).code, EXIT_USAGE);
        assert_eq!(go(&["fold", "--preset", "XX"]).code, EXIT_USAGE);
        assert_eq!(go(&["bogus"]).code, EXIT_USAGE);
        assert_eq!(go(&["classes", "--preset", "GL2"]).code, EXIT_USAGE);
        assert_eq!(go(&["fold", "--preset", "GL4", "--action", "nope"]).code, EXIT_USAGE);
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{
            "group": {"datum": {"rank": 2, "simple_roots": [[1, -1]], "simple_coroots": [[1, -1]]}},
            "action": {"group": {"cyclic": 2}, "generators": [{"element": 1, "diagram": [[0, -1], [-1, 0]]}]},
            "frobenius": {"q": 3},
            "options": {"q_values": [2, 3]}
        }"#;
        let c = JobConfig::parse(text).unwrap();
        let once = c.to_json();
        let twice = JobConfig::parse(&once).unwrap().to_json();
        assert_eq!(once, twice);
        assert_eq!(JobConfig::parse(&once).unwrap(), c);
    }

    #[test]
    fn parse_errors_are_positioned() {
        let e = JobConfig::parse("{\"group\": {\"preset\": 3}}").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        let e = JobConfig::parse("{\"grup\": {}}").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }

    #[test]
    fn explicit_action_from_config() {
        let dir = std::env::temp_dir().join(format!("conorm-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("job.json");
        std::fs::write(
            &path,
            r#"{"group": {"preset": "GL2"},
                "action": {"group": {"cyclic": 2}, "generators": [{"element": 1, "diagram": [[0, -1], [-1, 0]]}]}}"#,
        )
        .unwrap();
        let o = go(&["fold", "--config", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["rank"], 1);
        let bad = dir.join("bad.json");
        std::fs::write(
            &bad,
            r#"{"group": {"preset": "GL2"},
                "action": {"group": {"cyclic": 2}, "generators": [{"element": 1, "diagram": [[0, 1], [1, 1]]}]}}"#,
        )
        .unwrap();
        let o = go(&["fold", "--config", bad.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("action"), "{}", o.stderr);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn deterministic_json() {
        let a = go(&["lift", "--preset", "GL4", "--action", "outer-SO", "--q", "3", "--format", "json"]);
        let b = go(&["lift", "--preset", "GL4", "--action", "outer-SO", "--q", "3", "--format", "json"]);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a, b);
    }
}
