//! The ten acceptance criteria, one test each. Every test prints a single
//! `criterion N PASS|FAIL ...` line before asserting.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use xjoin_core::graphs::{automorphism_group, cayley_graph, is_isomorphism, Graph};
use xjoin_core::groups::FiniteGroup;
use xjoin_core::gwp::{build_scaffold, ScaffoldMode};
use xjoin_core::perms::{group_isomorphic, Perm};
use xjoin_core::scenario::ScenarioFile;
use xjoin_core::synth::{
    build_w, certify_vertex_transitive, hypotheses_of, synthesize_cayley, verify_aut_containment,
    CayleyScenario, SynthMode,
};
use xjoin_core::xjoin::generalized_xjoin;
use xjoin_core::{Caps, Exec};

fn verdict(n: u32, title: &str, ok: bool, detail: &str, took: Duration) {
    println!(
        "criterion {n:>2} {} {title}: {detail} [{:.3} ms]",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64() * 1e3
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn scenario(name: &str) -> ScenarioFile {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    ScenarioFile::load(&path).unwrap()
}

fn cayley(name: &str) -> CayleyScenario {
    match scenario(name) {
        ScenarioFile::Cayley(c) => c.to_scenario(Caps::default()).unwrap(),
        ScenarioFile::Xjoin(_) => panic!("{name} is not a cayley scenario"),
    }
}

fn strip(label: &str) -> String {
    label.rsplit(':').next().unwrap().to_string()
}

fn names(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn criterion_01_two_block_xjoin_golden() {
    let ScenarioFile::Xjoin(file) = scenario("two_block_xjoin.json") else { panic!() };
    let inp = file.to_input().unwrap();
    let mut best = Duration::MAX;
    let mut w = None;
    for _ in 0..25 {
        let t = Instant::now();
        let built = generalized_xjoin(&inp, file.collapse_allowed).unwrap();
        best = best.min(t.elapsed());
        w = Some(built);
    }
    let w = w.unwrap();
    let got: BTreeSet<(String, String)> = w
        .label_edges()
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (strip(&a), strip(&b));
            (a.clone().min(b.clone()), a.max(b))
        })
        .collect();
    let want: BTreeSet<(String, String)> = [
        "ab", "cd", "ef", "eg", "fg", "ae", "be", "ce", "de", "cf", "cg", "df", "dg", "af", "ag",
        "bf", "bg",
    ]
    .iter()
    .map(|p| (p[..1].to_string(), p[1..].to_string()))
    .collect();
    let ok = w.vertex_count() == 7 && got == want && best < Duration::from_millis(1);
    verdict(
        1,
        "two-block X-join golden",
        ok,
        &format!("{} vertices, {} edges, exact match {}", w.vertex_count(), got.len(), got == want),
        best,
    );
}

#[test]
fn criterion_02_d6_over_c3sq_end_to_end() {
    let sc = cayley("d6_over_c3sq.json");
    assert_eq!(sc.mode, SynthMode::Search);
    let t = Instant::now();
    let cert = synthesize_cayley(&sc, Exec::default()).unwrap();
    let took = t.elapsed();
    let d6xc3 = FiniteGroup::direct_product(&[
        FiniteGroup::dihedral(6).unwrap(),
        FiniteGroup::cyclic(3),
    ])
    .unwrap();
    let iso = group_isomorphic(cert.r.group(), &d6xc3).unwrap().is_some();
    let regular = cert.r.to_perm_group(1000).unwrap().is_regular();
    let s_r: BTreeSet<String> = cert.connection_names().into_iter().collect();
    let want = names(&[
        "bar(x)", "bar(x2)", "hat(b)", "hat(b2)", "bar(y)", "hat(b)bar(y)", "hat(b2)bar(y)",
    ]);
    let edge_exact = is_isomorphism(&cert.w, &cert.cayley, &cert.witness);
    let ok = cert.w.vertex_count() == 18
        && cert.r.order() == 18
        && regular
        && iso
        && s_r == want
        && edge_exact
        && took < Duration::from_secs(5);
    verdict(
        2,
        "D6 over C3^2 end-to-end",
        ok,
        &format!(
            "|V(W)| = {}, |R| = {}, R = D6xC3 {iso}, |S_R| = {}, S_R = {s_r:?}, W = Cay(R,S_R) {edge_exact}",
            cert.w.vertex_count(),
            cert.r.order(),
            s_r.len()
        ),
        took,
    );
}

#[test]
fn criterion_03_q8_fibers_end_to_end() {
    let sc = cayley("q8_fibers.json");
    assert_eq!(sc.mode, SynthMode::Theorem);
    let t = Instant::now();
    let cert = synthesize_cayley(&sc, Exec::default()).unwrap();
    let took = t.elapsed();
    let s = &cert.scaffold;
    // J ā ∪ J b̄ ∪ J c̄, named from the factors
    let mut want = BTreeSet::new();
    for x in ["a", "b", "c"] {
        for &l in s.kernel().members() {
            let hat = if l == s.fiber().identity() {
                String::new()
            } else {
                format!("hat({})", s.fiber().name(l))
            };
            want.insert(format!("{hat}bar({x})"));
        }
    }
    let s_r: BTreeSet<String> = cert.connection_names().into_iter().collect();
    let regular = cert.r.to_perm_group(1000).unwrap().is_regular();
    let flags = cert.hypotheses.flags();
    let expected_flags = [true, true, true, true, false];
    let mark = |b: bool| if b { "Y" } else { "N" };
    let shown = |f: [bool; 5]| f.iter().map(|&b| mark(b)).collect::<Vec<_>>().join("");
    let structural = cert.w.vertex_count() == 16
        && cert.r.order() == 16
        && regular
        && s_r.len() == 6
        && s_r == want
        && took < Duration::from_secs(5);
    let ok = structural && flags == expected_flags;
    verdict(
        3,
        "Q8 fibers end-to-end",
        ok,
        &format!(
            "|V(W)| = {}, |R| = {} regular {regular}, S_R = {s_r:?} (structure ok: {structural}); \
             hypotheses (1)-(5) = {} but the stated expectation is {} \
             (Q8 has no Klein-four subgroup, so (4) cannot hold)",
            cert.w.vertex_count(),
            cert.r.order(),
            shown(flags),
            shown(expected_flags)
        ),
        took,
    );
}

#[test]
fn criterion_04_split_conditions_agree() {
    let t = Instant::now();
    let family = common::scaffold_family();
    let mut failures = Vec::new();
    let mut counts = [0usize; 2];
    for case in &family {
        let res = catch_unwind(AssertUnwindSafe(|| case.scaffold.lemma23_check()));
        match res {
            Ok(Some(r)) if r.consistent() => counts[r.fbar_is_hom as usize] += 1,
            Ok(other) => failures.push(format!("{}: {other:?}", case.name)),
            Err(_) => failures.push(format!("{}: conditions disagree", case.name)),
        }
    }
    let ok = family.len() >= 50 && failures.is_empty();
    verdict(
        4,
        "split conditions agree",
        ok,
        &format!(
            "{} scaffolds, {} split / {} non-split, disagreements {failures:?}",
            family.len(),
            counts[1],
            counts[0]
        ),
        t.elapsed(),
    );
}

#[test]
fn criterion_05_blocks_and_transitivity() {
    let t = Instant::now();
    let family = common::scaffold_family();
    let bad: Vec<&str> = family
        .iter()
        .filter(|c| !(c.scaffold.blocks_permuted() && c.scaffold.jf_transitive()))
        .map(|c| c.name.as_str())
        .collect();
    verdict(
        5,
        "blocks permuted, JF transitive",
        family.len() >= 50 && bad.is_empty(),
        &format!("{} scaffolds, failures {bad:?}", family.len()),
        t.elapsed(),
    );
}

#[test]
fn criterion_06_aut_containment() {
    let t = Instant::now();
    let family = common::cayley_family();
    let mut bad = Vec::new();
    for case in &family {
        match build_w(&case.scenario) {
            Ok((w, s)) => {
                if !verify_aut_containment(&w, &s) || !certify_vertex_transitive(&w, &s) {
                    bad.push(case.name.clone());
                }
            }
            Err(e) => bad.push(format!("{}: {e}", case.name)),
        }
    }
    verdict(
        6,
        "Aut containment and vertex transitivity",
        !family.is_empty() && bad.is_empty(),
        &format!("{} scenarios, failures {bad:?}", family.len()),
        t.elapsed(),
    );
}

#[test]
fn criterion_07_theorem_mode_regular() {
    let t = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    let scaffolds = common::scaffold_family();
    let scenarios = common::cayley_family();
    // None when (1)+(2)+(3) do not all hold
    let check = |sc: &xjoin_core::gwp::Scaffold| -> Option<bool> {
        let h = hypotheses_of(sc);
        if !(h.product_with_centralizer && h.kernel_centralizer_product && h.direct_complement) {
            return None;
        }
        let f = sc.base().clone();
        let th = sc.with_choice({
            let (reps, t, _) = sc.theorem_choices().unwrap();
            sc.choice_from_transversal(&reps, &t)
        });
        Some(
            th.and_then(|th| th.regular_candidate(Exec::default()))
                .map(|r| {
                    r.order() == sc.kernel().order() * f.order()
                        && r.to_perm_group(100_000).unwrap().is_regular()
                })
                .unwrap_or(false),
        )
    };
    for c in &scaffolds {
        if let Some(ok) = check(&c.scaffold) {
            checked += 1;
            if !ok {
                bad.push(c.name.clone());
            }
        }
    }
    for c in &scenarios {
        let s = build_scaffold(
            c.scenario.base.clone(),
            &c.scenario.block_generators,
            c.scenario.fiber.clone(),
            &c.scenario.theta,
            ScaffoldMode::Canonical,
        )
        .unwrap();
        if let Some(ok) = check(&s) {
            checked += 1;
            if !ok {
                bad.push(c.name.clone());
            }
            let sc = c.scenario.clone().with_mode(SynthMode::Theorem);
            if synthesize_cayley(&sc, Exec::default()).is_err() {
                bad.push(format!("{} (theorem-mode certificate)", c.name));
            }
        }
    }
    verdict(
        7,
        "theorem-mode regular subgroup",
        checked > 0 && bad.is_empty(),
        &format!("{checked} instances meet (1)+(2)+(3), failures {bad:?}"),
        t.elapsed(),
    );
}

#[test]
fn criterion_08_g_joins() {
    let t = Instant::now();
    let family = common::g_join_family();
    let mut bad = Vec::new();
    let mut trivial = 0;
    for case in &family {
        let sc = case.scenario.clone().with_mode(SynthMode::Theorem);
        match synthesize_cayley(&sc, Exec::default()) {
            Ok(cert) => {
                if sc.fiber.order() == 1 {
                    trivial += 1;
                    let g = cayley_graph(&sc.base, &sc.base_connection).unwrap();
                    let labels: Vec<String> = cert
                        .w
                        .labels()
                        .iter()
                        .map(|l| l.split(':').next().unwrap().to_string())
                        .collect();
                    if cert.w.relabelled(labels).unwrap() != g {
                        bad.push(format!("{}: not edge-identical to Cay(A,S_A)", case.name));
                    }
                }
            }
            Err(e) => bad.push(format!("{}: {e}", case.name)),
        }
    }
    verdict(
        8,
        "G-joins",
        !family.is_empty() && trivial > 0 && bad.is_empty(),
        &format!("{} G-joins ({trivial} with trivial fibers), failures {bad:?}", family.len()),
        t.elapsed(),
    );
}

fn relabelling(w: &Graph, swaps: &[(&str, &str)]) -> Perm {
    let mut image: Vec<usize> = (0..w.vertex_count()).collect();
    for (v, img) in image.iter_mut().enumerate() {
        let l = strip(w.label(v));
        for &(a, b) in swaps {
            let other = if l == a { Some(b) } else if l == b { Some(a) } else { None };
            if let Some(o) = other {
                *img = (0..w.vertex_count()).find(|&u| strip(w.label(u)) == o).unwrap();
            }
        }
    }
    Perm::from_images(image).unwrap()
}

#[test]
fn criterion_09_oracle_cross_checks() {
    let t = Instant::now();
    let caps = Caps::default();
    let mut checked = 0;
    let mut skipped = 0;
    let mut bad = Vec::new();
    for case in common::cayley_family() {
        if checked >= 15 {
            break;
        }
        let (w, s) = build_w(&case.scenario).unwrap();
        if w.vertex_count() > 20 || w.vertex_count() < 4 {
            continue;
        }
        let Ok(aut) = automorphism_group(&w, caps.aut_vertices, caps.closure) else {
            skipped += 1;
            continue;
        };
        let gwp = s.gwp_group(caps.closure).unwrap();
        checked += 1;
        if !gwp.elements().iter().all(|p| aut.contains(p)) {
            bad.push(case.name.clone());
        }
    }
    let ScenarioFile::Xjoin(file) = scenario("two_block_xjoin.json") else { panic!() };
    let w = generalized_xjoin(&file.to_input().unwrap(), true).unwrap();
    let aut = automorphism_group(&w, caps.aut_vertices, caps.closure).unwrap();
    let swaps: Vec<Perm> = [("a", "b"), ("c", "d"), ("f", "g")]
        .iter()
        .map(|&p| relabelling(&w, &[p]))
        .collect();
    let members = swaps.iter().all(|p| !p.is_identity() && aut.contains(p));
    verdict(
        9,
        "oracle cross-checks",
        checked >= 10 && bad.is_empty() && members,
        &format!(
            "{checked} instances <= 20 vertices ({skipped} over the closure cap), \
             failures {bad:?}; two-block X-join |Aut(W)| = {}, swaps a-b, c-d, f-g members {members}",
            aut.order()
        ),
        t.elapsed(),
    );
}

#[test]
fn criterion_10_obstructions_in_k() {
    let t = Instant::now();
    let family = common::scaffold_family();
    let mut pairs = 0;
    let mut nontrivial = 0;
    let mut bad = Vec::new();
    for case in &family {
        let s = &case.scaffold;
        for f1 in s.base().elements() {
            for f2 in s.base().elements() {
                pairs += 1;
                let obs = catch_unwind(AssertUnwindSafe(|| s.obstruction(f1, f2)));
                match obs.ok().and_then(|p| s.kernel_factors(&p).map(|k| (p, k))) {
                    Some((p, _)) => nontrivial += usize::from(!p.is_identity()),
                    None => bad.push(format!("{} ({f1},{f2})", case.name)),
                }
            }
        }
    }
    verdict(
        10,
        "obstructions lie in K",
        bad.is_empty() && nontrivial > 0,
        &format!(
            "{pairs} pairs over {} scaffolds, {nontrivial} non-trivial, failures {bad:?}",
            family.len()
        ),
        t.elapsed(),
    );
}
