//! Deterministic families of small scaffolds and Cayley scenarios.

#![allow(dead_code)]

use std::collections::BTreeSet;

use xjoin_core::groups::{FiniteGroup, Subgroup};
use xjoin_core::gwp::{build_scaffold, Scaffold, ScaffoldMode};
use xjoin_core::synth::CayleyScenario;

pub fn named(name: &str, g: FiniteGroup) -> (String, FiniteGroup) {
    (name.to_string(), g)
}

fn product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup {
    FiniteGroup::direct_product(&[a, b]).unwrap()
}

fn c(n: usize) -> FiniteGroup {
    FiniteGroup::cyclic(n)
}

fn d(n: usize) -> FiniteGroup {
    FiniteGroup::dihedral(n).unwrap()
}

fn ea(p: usize, k: usize) -> FiniteGroup {
    FiniteGroup::elementary_abelian(p, k).unwrap()
}

/// Groups of order at most `max`.
pub fn groups_up_to(max: usize) -> Vec<(String, FiniteGroup)> {
    let all = vec![
        named("C2", c(2)),
        named("C3", c(3)),
        named("C4", c(4)),
        named("C2^2", ea(2, 2)),
        named("C5", c(5)),
        named("C6", c(6)),
        named("D6", d(6)),
        named("C8", c(8)),
        named("C2xC4", product(c(2), c(4))),
        named("C2^3", ea(2, 3)),
        named("D8", d(8)),
        named("Q8", FiniteGroup::quaternion8()),
        named("C9", c(9)),
        named("C3^2", ea(3, 2)),
        named("D10", d(10)),
        named("C12", c(12)),
        named("C2xC6", product(c(2), c(6))),
        named("D12", d(12)),
        named("C4^2", product(c(4), c(4))),
        named("Q8xC2", product(FiniteGroup::quaternion8(), c(2))),
        named("D8xC2", product(d(8), c(2))),
        named("C2^4", ea(2, 4)),
        named("D16", d(16)),
    ];
    all.into_iter().filter(|(_, g)| g.order() <= max).collect()
}

/// Distinct subgroups generated by at most two elements, with generators.
pub fn subgroups(g: &FiniteGroup) -> Vec<(Vec<usize>, Subgroup)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |gens: Vec<usize>, out: &mut Vec<(Vec<usize>, Subgroup)>| {
        let s = g.subgroup_generated(&gens);
        if seen.insert(s.members().to_vec()) {
            out.push((gens, s));
        }
    };
    push(vec![], &mut out);
    for a in g.elements().skip(1) {
        push(vec![a], &mut out);
    }
    for a in g.elements().skip(1) {
        for b in g.elements().skip(a + 1) {
            push(vec![a, b], &mut out);
        }
    }
    out
}

/// Up to `limit` epimorphisms `m → h ≤ f`, as generator images.
pub fn epimorphisms(
    m: &FiniteGroup,
    f: &FiniteGroup,
    h: &Subgroup,
    limit: usize,
) -> Vec<Vec<(usize, usize)>> {
    if !m.order().is_multiple_of(h.order()) {
        return Vec::new();
    }
    let gens = m.small_generating_set();
    let options: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let ord = m.element_order(g);
            h.members()
                .iter()
                .copied()
                .filter(|&x| ord.is_multiple_of(f.element_order(x)))
                .collect()
        })
        .collect();
    let mut found = Vec::new();
    let mut idx = vec![0usize; gens.len()];
    let mut tries = 0;
    if options.iter().any(Vec::is_empty) {
        return found;
    }
    loop {
        tries += 1;
        let images: Vec<(usize, usize)> =
            gens.iter().zip(&idx).zip(&options).map(|((&g, &i), o)| (g, o[i])).collect();
        if let Ok(hom) = xjoin_core::groups::GroupHom::from_images(m, f, &images) {
            if hom.image() == h.members() {
                found.push(images);
                if found.len() == limit {
                    return found;
                }
            }
        }
        // odometer, last digit fastest
        let mut k = idx.len();
        loop {
            if k == 0 || tries > 4000 {
                return found;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub struct ScaffoldCase {
    pub name: String,
    pub scaffold: Scaffold,
}

/// Scaffolds with `|F| ≤ 12`, `|M| ≤ 16`, `|Y| ≤ 96`: canonical choices,
/// theorem choices where they exist, and a "largest preimage" variant.
pub fn scaffold_family() -> Vec<ScaffoldCase> {
    let bases = groups_up_to(12);
    let fibers = groups_up_to(16);
    let mut out = Vec::new();
    for (fname, f) in &bases {
        for (h_gens, h) in subgroups(f).into_iter().take(5) {
            for (mname, m) in &fibers {
                let points = (f.order() / h.order()) * m.order();
                if points > 96 {
                    continue;
                }
                for theta in epimorphisms(m, f, &h, 1) {
                    let name = format!("{fname}/{}|{mname}", h.order());
                    let canonical =
                        build_scaffold(f.clone(), &h_gens, m.clone(), &theta, ScaffoldMode::Canonical)
                            .unwrap();
                    let mut largest = canonical.transversal().unwrap();
                    let pre = canonical.theta().preimages();
                    for (hh, t) in largest.iter_mut() {
                        if *hh != f.identity() {
                            *t = *pre[hh].last().unwrap();
                        }
                    }
                    let variant = canonical
                        .with_choice(canonical.choice_from_transversal(canonical.reps(), &largest))
                        .unwrap();
                    if let Ok(th) =
                        build_scaffold(f.clone(), &h_gens, m.clone(), &theta, ScaffoldMode::Theorem)
                    {
                        out.push(ScaffoldCase {
                            name: format!("{name} theorem"),
                            scaffold: th,
                        });
                    }
                    out.push(ScaffoldCase {
                        name: format!("{name} canonical"),
                        scaffold: canonical,
                    });
                    out.push(ScaffoldCase {
                        name: format!("{name} largest"),
                        scaffold: variant,
                    });
                }
            }
        }
    }
    out
}

pub struct ScenarioCase {
    pub name: String,
    pub scenario: CayleyScenario,
}

/// Symmetric generating-style connection sets of `a`, identity-free.
fn connection_sets(a: &FiniteGroup) -> Vec<Vec<usize>> {
    let close = |s: Vec<usize>| -> Vec<usize> {
        let set: BTreeSet<usize> =
            s.iter().flat_map(|&x| [x, a.inv(x)]).filter(|&x| x != a.identity()).collect();
        set.into_iter().collect()
    };
    let gens = a.small_generating_set();
    let mut sets = vec![close(gens.clone())];
    let with_last: Vec<usize> = gens.iter().copied().chain([a.order() - 1]).collect();
    let alt = close(with_last);
    if !sets.contains(&alt) {
        sets.push(alt);
    }
    sets
}

/// Cayley scenarios with `|A| ≤ 8`, `|C| ≤ 9`.
///
/// `S_C` is either the full preimage of `(S_A ∩ H) ∪ {e}` or the symmetric
/// closure of one preimage per element of `S_A ∩ H`; both make `θ` a graph
/// epimorphism onto `G[H]`.
pub fn cayley_family() -> Vec<ScenarioCase> {
    let bases = groups_up_to(8);
    let fibers = groups_up_to(9);
    let mut out = Vec::new();
    for (aname, a) in &bases {
        for s_a in connection_sets(a) {
            for (h_gens, h) in subgroups(a).into_iter().take(4) {
                for (cname, cg) in &fibers {
                    if (a.order() / h.order()) * cg.order() > 48 {
                        continue;
                    }
                    for theta in epimorphisms(cg, a, &h, 1) {
                        let hom = xjoin_core::groups::GroupHom::from_images(cg, a, &theta).unwrap();
                        let in_h: BTreeSet<usize> =
                            s_a.iter().copied().filter(|&x| h.contains(x)).collect();
                        let full: Vec<usize> = cg
                            .elements()
                            .filter(|&x| {
                                x != cg.identity()
                                    && (in_h.contains(&hom.apply(x)) || hom.apply(x) == a.identity())
                            })
                            .collect();
                        let pre = hom.preimages();
                        let sparse: BTreeSet<usize> = in_h
                            .iter()
                            .flat_map(|x| {
                                let p = pre[x][0];
                                [p, cg.inv(p)]
                            })
                            .collect();
                        for (tag, s_c) in [("full", full), ("sparse", sparse.into_iter().collect())] {
                            out.push(ScenarioCase {
                                name: format!("{aname}{s_a:?}/{}|{cname} {tag}", h.order()),
                                scenario: CayleyScenario::new(
                                    a.clone(),
                                    s_a.clone(),
                                    h_gens.clone(),
                                    cg.clone(),
                                    s_c,
                                    theta.clone(),
                                ),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// G-join scenarios: trivial `H`, any fiber.
pub fn g_join_family() -> Vec<ScenarioCase> {
    let mut out = Vec::new();
    for (aname, a) in groups_up_to(8) {
        for s_a in connection_sets(&a) {
            for (cname, cg) in groups_up_to(6) {
                for s_c in connection_sets(&cg) {
                    out.push(ScenarioCase {
                        name: format!("{aname}{s_a:?}[{cname}{s_c:?}]"),
                        scenario: CayleyScenario::g_join(a.clone(), s_a.clone(), cg.clone(), s_c),
                    });
                }
            }
            out.push(ScenarioCase {
                name: format!("{aname}{s_a:?}[C1]"),
                scenario: CayleyScenario::g_join(a.clone(), s_a.clone(), FiniteGroup::cyclic(1), vec![]),
            });
        }
    }
    out
}
