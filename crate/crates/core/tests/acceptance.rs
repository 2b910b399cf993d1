//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use conorm::catalog::{cartan, catalog_actions, gl, golden_fold_table, pgl, preset, sl, so, sp, spin};
use conorm::chevalley::{check_scalar_consistency, StructureConstants};
use conorm::classes::{
    enumerate_stable_classes, verify_levi_factorization, verify_normal_subgroup_composition,
    verify_pinning_factorization, verify_product_conorm, verify_trivial_action, ConormContext, FrobeniusStructure,
};
use conorm::duality::verify_isogeny_square;
use conorm::folding::{dual_length_comparison, fold, restricted_root_comparison};
use conorm::lattice::{Phase, TorsionVector};
use conorm::root_datum::BasedRootDatum;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C1_LIMIT: Duration = Duration::from_secs(5);
const C3_LIMIT: Duration = Duration::from_secs(5);
const C4_LIMIT: Duration = Duration::from_secs(60);
const C5_LIMIT: Duration = Duration::from_secs(30);
const C7_LIMIT: Duration = Duration::from_secs(60);
const C8_LIMIT: Duration = Duration::from_secs(10);
const C9_LIMIT: Duration = Duration::from_secs(30);

const C6_POINTS: usize = 100;
const C6_MAX_DEN: i64 = 24;
const C6_PRIME: i64 = 7;
const C6_SEED: u64 = 0x5eed_c0de;

struct Outcome {
    ok: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (bool, String) {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if let Some(l) = limit {
        if took > l {
            out.ok = false;
            out.detail = format!("{} (over the {:?} limit)", out.detail, l);
        }
    }
    (out.ok, format!("{} [{:.2?}]", out.detail, took))
}

fn c1_golden_folds() -> Outcome {
    let mut bad = Vec::new();
    let table = golden_fold_table();
    for (g, a, expected) in &table {
        let p = preset(g).unwrap();
        let got = fold(p.action(a).unwrap()).unwrap().cartan_type();
        if !got.same_semisimple_type(&cartan(expected)) {
            bad.push(format!("{g}/{a}: {got} ≠ {expected}"));
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{} folds, mismatches {:?}", table.len(), bad) }
}

fn c2_highest_root() -> Outcome {
    let mut bad = Vec::new();
    for g in ["PGL3", "SL3"] {
        let p = preset(g).unwrap();
        let a = p.action("pinned-involution").unwrap();
        let base = a.base();
        let (s0, s1) = (base.simple()[0], base.simple()[1]);
        let top = base.datum().sum_index(s0, s1).unwrap();
        if a.root_space_scalar(1, top) != Phase::half() {
            bad.push(format!("{g}: scalar {}", a.root_space_scalar(1, top)));
        }
        if a.root_survives(top) {
            bad.push(format!("{g}: highest root survives"));
        }
        let f = fold(a).unwrap();
        let fd = f.fixed().datum();
        let beta = f.restrict(base.datum().root(s0));
        let two_beta: Vec<i64> = beta.iter().map(|x| 2 * x).collect();
        if fd.num_roots() != 2 || fd.index_of(&beta).is_none() || fd.index_of(&two_beta).is_some() {
            bad.push(format!("{g}: fold roots {:?}", fd.roots()));
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("PGL3 and SL3, failures {bad:?}") }
}

fn c3_restricted_roots() -> Outcome {
    let mut bad = Vec::new();
    let mut cyclic = 0;
    for (g, a) in catalog_actions() {
        let act = preset(g).unwrap().action(a).unwrap().clone();
        let r = restricted_root_comparison(&act).unwrap();
        if r.root_inclusion_hypothesis.holds() && !r.phi_in_underline {
            bad.push(format!("{g}/{a}: Φ not in underline Φ"));
        }
        if !r.averages_agree {
            bad.push(format!("{g}/{a}: averages disagree"));
        }
        if r.cyclic_faithful_hypothesis.holds() {
            cyclic += 1;
            if !r.underline_short_in_phi {
                bad.push(format!("{g}/{a}: short root missing"));
            }
            if !dual_length_comparison(&act).unwrap().sandwich_holds() {
                bad.push(format!("{g}/{a}: dual sandwich fails"));
            }
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: format!("{} actions ({cyclic} cyclic-faithful), failures {bad:?}", catalog_actions().len()),
    }
}

fn c4_pinning() -> Outcome {
    let p = preset("GL4").unwrap();
    let rep = verify_pinning_factorization(p.action("outer-SO").unwrap(), &[2, 3, 5]).unwrap();
    Outcome {
        ok: rep.passed(),
        detail: format!("GL4 outer-SO, q in [2,3,5], {} classes, witnesses {:?}", rep.classes_checked, rep.witnesses),
    }
}

fn c5_compositions() -> Outcome {
    let mut bad = Vec::new();
    let mut note = |name: &str, ok: bool| {
        if !ok {
            bad.push(name.to_string());
        }
    };
    note("product GL2^2", verify_product_conorm(2, 1, &gl(2)).unwrap().passed());
    note("product SL2^3", verify_product_conorm(3, 1, &sl(2)).unwrap().passed());
    note("trivial GL3", verify_trivial_action(&gl(3), 2, &[2, 3]).unwrap().passed());
    note("trivial Sp4", verify_trivial_action(&sp(4), 3, &[3]).unwrap().passed());
    let g32 = preset("GL3^2").unwrap();
    let rep = verify_normal_subgroup_composition(g32.action("swap-twist").unwrap(), &[0, 2], &[2, 3]).unwrap();
    note("normal subgroup GL3^2", rep.passed());
    let sl2 = preset("SL2").unwrap();
    let sq = verify_isogeny_square(sl2.action("trivial").unwrap(), sl2.isogeny("to-PGL").unwrap()).unwrap();
    note("isogeny SL2 to PGL2", sq.holds);
    let p = preset("SL4xGL1").unwrap();
    let sq = verify_isogeny_square(p.action("pinned-involution").unwrap(), p.isogeny("to-GL").unwrap()).unwrap();
    note("isogeny SL4xGL1 to GL4", sq.holds);
    Outcome { ok: bad.is_empty(), detail: format!("7 checks, failures {bad:?}") }
}

fn c6_well_defined() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(C6_SEED);
    let dens: Vec<i64> = (1..=C6_MAX_DEN).filter(|d| d.gcd(&C6_PRIME) == 1).collect();
    let mut failures = Vec::new();
    let mut total = 0;
    for (g, a) in catalog_actions() {
        let act = preset(g).unwrap().action(a).unwrap().clone();
        let ctx = ConormContext::new(&act).unwrap();
        let r = ctx.small.rank();
        for _ in 0..C6_POINTS {
            let den = dens[rng.gen_range(0..dens.len())];
            let num: Vec<i64> = (0..r).map(|_| rng.gen_range(0..den)).collect();
            let s = TorsionVector::from_i64(&num, den);
            total += 1;
            if !ctx.check_well_defined(&s).unwrap() {
                failures.push(format!("{g}/{a} at {s}"));
            }
        }
    }
    Outcome { ok: failures.is_empty(), detail: format!("{total} points, failures {failures:?}") }
}

/// Stable multisets of size `n` in ℤ/N under x ↦ qx, N = lcm(q^d − 1).
fn gl_oracle(n: usize, q: i64) -> BTreeSet<Vec<i64>> {
    let big_n = (1..=n as u32).fold(1i64, |acc, d| acc.lcm(&(q.pow(d) - 1)));
    let mut seen = vec![false; big_n as usize];
    let mut orbits: Vec<Vec<i64>> = Vec::new();
    for x in 0..big_n {
        if seen[x as usize] {
            continue;
        }
        let mut orb = vec![x];
        seen[x as usize] = true;
        let mut y = (x * q) % big_n;
        while y != x {
            seen[y as usize] = true;
            orb.push(y);
            y = (y * q) % big_n;
        }
        if orb.len() <= n {
            orbits.push(orb);
        }
    }
    fn go(orbits: &[Vec<i64>], from: usize, left: usize, acc: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
        if left == 0 {
            let mut m = acc.clone();
            m.sort();
            out.insert(m);
            return;
        }
        for i in from..orbits.len() {
            if orbits[i].len() <= left {
                acc.extend(&orbits[i]);
                go(orbits, i, left - orbits[i].len(), acc, out);
                acc.truncate(acc.len() - orbits[i].len());
            }
        }
    }
    let mut out = BTreeSet::new();
    go(&orbits, 0, n, &mut Vec::new(), &mut out);
    out.into_iter().map(|m| m.into_iter().map(|x| x * 1_000_000 / big_n).collect()).collect()
}

fn c7_gl_oracle() -> Outcome {
    let mut bad = Vec::new();
    let mut counts = BTreeMap::new();
    for n in 1..=3usize {
        for q in [2i64, 3, 4, 5] {
            let base: BasedRootDatum = gl(n);
            let frob = FrobeniusStructure::split(q as u64, n).unwrap();
            let classes = enumerate_stable_classes(&base, &frob).unwrap();
            // eigenvalue multisets scaled to a common grid for comparison
            let ours: BTreeSet<Vec<i64>> = classes
                .iter()
                .map(|c| {
                    let v = &c.class.representative.value;
                    let den = v.denominator().to_i64().unwrap();
                    let mut m: Vec<i64> =
                        v.numerators().iter().map(|x| x.to_i64().unwrap().rem_euclid(den) * 1_000_000 / den).collect();
                    m.sort();
                    m
                })
                .collect();
            let oracle = gl_oracle(n, q);
            let expected = q.pow(n as u32 - 1) * (q - 1);
            counts.insert((n, q), classes.len());
            if ours != oracle || classes.len() as i64 != expected {
                bad.push(format!("GL{n} q={q}: {} vs oracle {}", classes.len(), oracle.len()));
            }
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("{} cases, failures {bad:?}", counts.len()) }
}

fn c8_levi() -> Outcome {
    let a = preset("GL4").unwrap().action("swap-of-blocks").unwrap().clone();
    let points = [
        TorsionVector::from_i64(&[0, 1], 3),
        TorsionVector::from_i64(&[1, 1], 3),
        TorsionVector::from_i64(&[0, 1], 4),
    ];
    let mut bad = Vec::new();
    let mut classes = 0;
    for s in &points {
        let rep = verify_levi_factorization(&a, s).unwrap();
        classes += rep.classes_checked;
        if !rep.passed() {
            bad.push(format!("{s}: {:?}", rep.witnesses));
        }
    }
    Outcome { ok: bad.is_empty(), detail: format!("3 subregular points, {classes} classes, failures {bad:?}") }
}

fn c9_structure_constants() -> Outcome {
    let mut bases: Vec<(String, BasedRootDatum)> = Vec::new();
    for n in 2..=7 {
        bases.push((format!("GL{n}"), gl(n)));
        bases.push((format!("SL{n}"), sl(n)));
        bases.push((format!("PGL{n}"), pgl(n)));
    }
    for n in 2..=6 {
        bases.push((format!("Sp{}", 2 * n), sp(2 * n)));
        bases.push((format!("SO{}", 2 * n + 1), so(2 * n + 1)));
    }
    for n in 4..=6 {
        bases.push((format!("SO{}", 2 * n), so(2 * n)));
        bases.push((format!("Spin{}", 2 * n), spin(2 * n)));
    }
    for name in ["G2", "F4", "E6ad", "E6sc", "D4ad"] {
        bases.push((name.to_string(), preset(name).unwrap().datum));
    }
    let mut bad = Vec::new();
    for (name, b) in &bases {
        let sc = StructureConstants::build(b);
        if let Err(e) = sc.check_integrity().and_then(|_| sc.check_jacobi()) {
            bad.push(format!("{name}: {e}"));
        }
    }
    let mut scalar_checks = 0;
    for (g, a) in catalog_actions() {
        let act = preset(g).unwrap().action(a).unwrap().clone();
        let roots = act.base().datum().num_roots();
        for el in 0..act.group().size() {
            let scalars: Vec<Phase> = (0..roots).map(|r| act.root_space_scalar(el, r)).collect();
            scalar_checks += 1;
            if let Err(e) = check_scalar_consistency(act.structure_constants(), act.diagram(el), &scalars) {
                bad.push(format!("{g}/{a} element {el}: {e}"));
            }
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: format!("{} data, {scalar_checks} scalar systems, failures {bad:?}", bases.len()),
    }
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("C1 golden fold table", Some(C1_LIMIT), c1_golden_folds),
        ("C2 highest root of the A2 involution", None, c2_highest_root),
        ("C3 restricted root inclusions", Some(C3_LIMIT), c3_restricted_roots),
        ("C4 pinning factorization", Some(C4_LIMIT), c4_pinning),
        ("C5 product, trivial, normal subgroup, isogeny", Some(C5_LIMIT), c5_compositions),
        ("C6 conorm well defined on classes", None, c6_well_defined),
        ("C7 GL class counts against multisets", Some(C7_LIMIT), c7_gl_oracle),
        ("C8 Levi factorization", Some(C8_LIMIT), c8_levi),
        ("C9 structure constants and scalars", Some(C9_LIMIT), c9_structure_constants),
    ];
    let mut failed = Vec::new();
    for (name, limit, f) in criteria {
        let (ok, detail) = timed(limit, f);
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
