//! Generalized wreath product `F ∘_λ {M_X}` over a regular base group.
//!
//! `F` acts on itself by right multiplication and the blocks are the right
//! cosets `H·r` of a subgroup `H`. Every block carries a copy of one fiber
//! group `M` (the isomorphisms between copies are identities), so a point of
//! `Y` is a pair `(block, m)` stored as `block·|M| + m`.
//!
//! A lift `f̄` is fixed by a [`LiftChoice`]: coset representatives (identity
//! first) and, for every `f` and source block `b`, an element `c` of `M` with
//! `θ(c) = h`, where `reps[b]·f = h·reps[b']`. Then `(b, y)·f̄ = (b', y·c)`.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groups::{
    canonical_transversal, find_transversal, FiniteGroup, GroupHom, Subgroup, Transversal,
    TransversalMode,
};
use crate::perms::{orbits_of, PartitionOfPoints, Perm, PermGroup};

/// Per-(element, block) choices defining the lifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftChoice {
    /// Right coset representatives of `H`, identity first.
    pub reps: Vec<usize>,
    /// `table[f][b]`: the element of `M` applied to block `b` by `f̄`.
    pub table: Vec<Vec<usize>>,
}

/// How the lift choices of a scaffold are obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaffoldMode {
    /// Smallest-index coset representatives and preimages.
    Canonical,
    /// Representatives inside a centralizing complement and a transversal
    /// centralizing the kernel; fails if the hypotheses do not allow it.
    Theorem,
    /// Caller-supplied representatives and a single transversal.
    Explicit {
        reps: Vec<usize>,
        transversal: Transversal,
    },
    /// Caller-supplied full choice table.
    Table(LiftChoice),
}

/// Where the choices of a built scaffold came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceOrigin {
    Canonical,
    Theorem,
    Explicit,
    Search,
}

/// Which alternative of the regularity theorem supplied the choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremBranch {
    /// `F = H × F₁`; representatives taken in `F₁`.
    DirectComplement,
    /// `M = K × T` with `T` a subgroup centralizing `K`.
    DirectProductFiber,
}

#[derive(Debug, Clone)]
pub struct Scaffold {
    base: FiniteGroup,
    stabilizer: Subgroup,
    fiber: FiniteGroup,
    theta: GroupHom,
    kernel: Subgroup,
    kernel_gens: Vec<usize>,
    choice: LiftChoice,
    origin: ChoiceOrigin,
    branch: Option<TheoremBranch>,
    /// `decomp[g] = (b, h)` with `g = h·reps[b]`.
    decomp: Vec<(usize, usize)>,
    /// `transitions[f][b] = (h, b')` with `reps[b]·f = h·reps[b']`.
    transitions: Vec<Vec<(usize, usize)>>,
    lifts: Vec<Perm>,
}

/// The three equivalent conditions of the splitting lemma, evaluated
/// independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma23Report {
    pub fbar_is_hom: bool,
    pub t_is_group: bool,
    pub split: bool,
}

impl Lemma23Report {
    pub fn consistent(&self) -> bool {
        self.fbar_is_hom == self.t_is_group && self.t_is_group == self.split
    }
}

/// `R = J·F̄` once verified to be a regular group.
///
/// Element `i` is the unique `r` with `e·r = i`, where `e` is point 0, so the
/// labelling `r ↦ e·r` is the identity on indices.
#[derive(Debug, Clone)]
pub struct RegularSubgroup {
    elements: Vec<Perm>,
    /// `(ℓ, f)` with element `= ℓ̂·f̄`.
    factors: Vec<(usize, usize)>,
    group: FiniteGroup,
}

impl RegularSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn factors(&self) -> &[(usize, usize)] {
        &self.factors
    }

    /// The abstract group, `i·j` = element `i` then element `j`.
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn name(&self, i: usize) -> &str {
        self.group.name(i)
    }

    /// The element taking point 0 to `point`.
    pub fn element_at(&self, point: usize) -> &Perm {
        &self.elements[point]
    }

    pub fn to_perm_group(&self, cap: usize) -> Result<PermGroup> {
        let degree = self.elements.first().map_or(0, Perm::degree);
        let gens: Vec<Perm> = self
            .group
            .small_generating_set()
            .into_iter()
            .map(|i| self.elements[i].clone())
            .collect();
        PermGroup::closure(degree, &gens, cap)
    }
}

/// Outcome of [`lift_search`].
#[derive(Debug, Clone)]
pub struct LiftSearch {
    pub found: Option<(Scaffold, RegularSubgroup)>,
    pub evaluated: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaffoldReport {
    pub base_order: usize,
    pub stabilizer_order: usize,
    pub fiber_order: usize,
    pub kernel_order: usize,
    pub blocks: usize,
    pub points: usize,
    pub mode: ChoiceOrigin,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_branch: Option<TheoremBranch>,
    pub reps: Vec<String>,
    /// One map `h ↦ t_h` per block; a single entry when all blocks agree.
    pub transversals: Vec<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma23: Option<Lemma23Report>,
}

/// Builds the scaffold for `θ: M → H ≤ F` given by generator images
/// `(m, f)`.
pub fn build_scaffold(
    base: FiniteGroup,
    h_gens: &[usize],
    fiber: FiniteGroup,
    theta_images: &[(usize, usize)],
    mode: ScaffoldMode,
) -> Result<Scaffold> {
    let stabilizer = base.subgroup_generated(h_gens);
    let theta = GroupHom::from_images(&fiber, &base, theta_images).map_err(|e| match e {
        Error::InvalidInput(_) => e,
        other => Error::ThetaNotEpimorphism(other.to_string()),
    })?;
    if theta.image() != stabilizer.members() {
        return Err(Error::ThetaNotEpimorphism(format!(
            "image has {} elements, H has {}",
            theta.image().len(),
            stabilizer.order()
        )));
    }
    let kernel = theta.kernel();
    let kernel_gens = subgroup_generators(&fiber, &kernel);
    let mut s = Scaffold {
        base,
        stabilizer,
        fiber,
        theta,
        kernel,
        kernel_gens,
        choice: LiftChoice {
            reps: Vec::new(),
            table: Vec::new(),
        },
        origin: ChoiceOrigin::Canonical,
        branch: None,
        decomp: Vec::new(),
        transitions: Vec::new(),
        lifts: Vec::new(),
    };
    let (choice, origin) = match mode {
        ScaffoldMode::Canonical => {
            let reps = s.base.right_coset_reps(&s.stabilizer);
            let t = canonical_transversal(&s.theta);
            (s.choice_from_transversal(&reps, &t), ChoiceOrigin::Canonical)
        }
        ScaffoldMode::Theorem => {
            let (reps, t, branch) = s.theorem_choices()?;
            s.branch = Some(branch);
            (s.choice_from_transversal(&reps, &t), ChoiceOrigin::Theorem)
        }
        ScaffoldMode::Explicit { reps, transversal } => {
            s.base.check_coset_reps(&s.stabilizer, &reps)?;
            s.check_transversal(&transversal)?;
            (s.choice_from_transversal(&reps, &transversal), ChoiceOrigin::Explicit)
        }
        ScaffoldMode::Table(choice) => (choice, ChoiceOrigin::Explicit),
    };
    s.install(choice, origin)?;
    Ok(s)
}

/// Greedy generators of a subgroup, in index order.
fn subgroup_generators(g: &FiniteGroup, sub: &Subgroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut current = g.trivial();
    for &x in sub.members() {
        if !current.contains(x) {
            gens.push(x);
            current = g.subgroup_generated(&gens);
        }
    }
    gens
}

impl Scaffold {
    /// Same group data, different lift choices.
    pub fn with_choice(&self, choice: LiftChoice) -> Result<Scaffold> {
        let mut s = self.clone();
        s.branch = None;
        s.install(choice, ChoiceOrigin::Explicit)?;
        Ok(s)
    }

    fn install(&mut self, choice: LiftChoice, origin: ChoiceOrigin) -> Result<()> {
        let (f, h) = (&self.base, &self.stabilizer);
        f.check_coset_reps(h, &choice.reps)?;
        let decomp = f.coset_decomposition(h, &choice.reps);
        let transitions: Vec<Vec<(usize, usize)>> = f
            .elements()
            .map(|g| {
                choice
                    .reps
                    .iter()
                    .map(|&r| {
                        let (b2, hh) = decomp[f.mul(r, g)];
                        (hh, b2)
                    })
                    .collect()
            })
            .collect();
        let nb = choice.reps.len();
        if choice.table.len() != f.order() || choice.table.iter().any(|row| row.len() != nb) {
            return Err(Error::InvalidInput(format!(
                "lift table must be {} x {nb}",
                f.order()
            )));
        }
        for g in f.elements() {
            for (b, &(hh, _)) in transitions[g].iter().enumerate() {
                let c = choice.table[g][b];
                if c >= self.fiber.order() || self.theta.apply(c) != hh {
                    return Err(Error::InvalidInput(format!(
                        "lift of {} on block {b} must map onto {}",
                        f.name(g),
                        f.name(hh)
                    )));
                }
                if g == f.identity() && c != self.fiber.identity() {
                    return Err(Error::InvalidInput(
                        "the identity must lift to the identity".into(),
                    ));
                }
            }
        }
        let n = self.fiber.order();
        let lifts = f
            .elements()
            .map(|g| {
                let mut image = vec![0; nb * n];
                for b in 0..nb {
                    let (_, b2) = transitions[g][b];
                    let c = choice.table[g][b];
                    for y in 0..n {
                        image[b * n + y] = b2 * n + self.fiber.mul(y, c);
                    }
                }
                Perm::from_images_unchecked(image)
            })
            .collect();
        self.decomp = decomp;
        self.transitions = transitions;
        self.lifts = lifts;
        self.choice = choice;
        self.origin = origin;
        Ok(())
    }

    /// Lift table from representatives and per-block transversals.
    pub fn choice_from_block_transversals(&self, reps: &[usize], ts: &[Transversal]) -> LiftChoice {
        let f = &self.base;
        let decomp = f.coset_decomposition(&self.stabilizer, reps);
        let table = f
            .elements()
            .map(|g| {
                reps.iter()
                    .enumerate()
                    .map(|(b, &r)| ts[b][&decomp[f.mul(r, g)].1])
                    .collect()
            })
            .collect();
        LiftChoice {
            reps: reps.to_vec(),
            table,
        }
    }

    pub fn choice_from_transversal(&self, reps: &[usize], t: &Transversal) -> LiftChoice {
        self.choice_from_block_transversals(reps, &vec![t.clone(); reps.len()])
    }

    fn check_transversal(&self, t: &Transversal) -> Result<()> {
        let keys: Vec<usize> = t.keys().copied().collect();
        if keys != self.stabilizer.members() {
            return Err(Error::InvalidInput("transversal must cover H exactly".into()));
        }
        for (&h, &c) in t {
            if c >= self.fiber.order() || self.theta.apply(c) != h {
                return Err(Error::InvalidInput(format!(
                    "t_{} does not map onto {}",
                    self.base.name(h),
                    self.base.name(h)
                )));
            }
        }
        if t[&self.base.identity()] != self.fiber.identity() {
            return Err(Error::InvalidInput("t of the identity must be the identity".into()));
        }
        Ok(())
    }

    /// Representatives and transversal as prescribed by the regularity
    /// theorem, or the first hypothesis that rules them out.
    pub fn theorem_choices(&self) -> Result<(Vec<usize>, Transversal, TheoremBranch)> {
        let (f, h, m) = (&self.base, &self.stabilizer, &self.fiber);
        let cent_f = f.centralizer(h);
        if !f.is_product_of(h, &cent_f) {
            return Err(Error::TheoremChoicesUnavailable(
                "hypothesis (1) F = H·C_F(H) fails".into(),
            ));
        }
        let Some(t) = find_transversal(m, f, &self.theta, TransversalMode::Centralizing) else {
            return Err(Error::TheoremChoicesUnavailable(
                "hypothesis (2) M = K·C_M(K) fails: no transversal centralizes the kernel".into(),
            ));
        };
        let canonical = f.right_coset_reps(h);
        if let Some(f1) = f.direct_complement(h) {
            let reps = canonical
                .iter()
                .map(|&r| {
                    *f1.members()
                        .iter()
                        .find(|&&x| h.contains(f.mul(x, f.inv(r))))
                        .expect("a complement meets every coset")
                })
                .collect();
            return Ok((reps, t, TheoremBranch::DirectComplement));
        }
        if let Some(t5) = find_transversal(m, f, &self.theta, TransversalMode::CentralizingSubgroup)
        {
            let reps = canonical
                .iter()
                .map(|&r| {
                    *cent_f
                        .members()
                        .iter()
                        .find(|&&x| h.contains(f.mul(x, f.inv(r))))
                        .expect("F = H·C_F(H)")
                })
                .collect();
            return Ok((reps, t5, TheoremBranch::DirectProductFiber));
        }
        Err(Error::TheoremChoicesUnavailable(
            "neither (3) F = H × F1 nor (5) M = K × H holds".into(),
        ))
    }

    pub fn base(&self) -> &FiniteGroup {
        &self.base
    }

    pub fn stabilizer(&self) -> &Subgroup {
        &self.stabilizer
    }

    pub fn fiber(&self) -> &FiniteGroup {
        &self.fiber
    }

    pub fn theta(&self) -> &GroupHom {
        &self.theta
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn kernel_generators(&self) -> &[usize] {
        &self.kernel_gens
    }

    pub fn choice(&self) -> &LiftChoice {
        &self.choice
    }

    pub fn reps(&self) -> &[usize] {
        &self.choice.reps
    }

    pub fn origin(&self) -> ChoiceOrigin {
        self.origin
    }

    pub fn theorem_branch(&self) -> Option<TheoremBranch> {
        self.branch
    }

    pub fn block_count(&self) -> usize {
        self.choice.reps.len()
    }

    pub fn point_count(&self) -> usize {
        self.block_count() * self.fiber.order()
    }

    pub fn point(&self, block: usize, m: usize) -> usize {
        block * self.fiber.order() + m
    }

    pub fn point_block(&self, p: usize) -> usize {
        p / self.fiber.order()
    }

    pub fn point_element(&self, p: usize) -> usize {
        p % self.fiber.order()
    }

    /// Block label: the name of its representative.
    pub fn block_label(&self, b: usize) -> &str {
        self.base.name(self.choice.reps[b])
    }

    /// `λ(y·ā_b) = θ(y)·a_b`, an element of `F`.
    pub fn lambda(&self, p: usize) -> usize {
        let (b, y) = (self.point_block(p), self.point_element(p));
        self.base.mul(self.theta.apply(y), self.choice.reps[b])
    }

    /// `(b, h)` with `g = h·reps[b]`.
    pub fn coset_of(&self, g: usize) -> (usize, usize) {
        self.decomp[g]
    }

    /// `(h, b')` with `reps[b]·f = h·reps[b']`.
    pub fn transition(&self, f: usize, b: usize) -> (usize, usize) {
        self.transitions[f][b]
    }

    pub fn fiber_partition(&self) -> PartitionOfPoints {
        let n = self.fiber.order();
        let blocks = (0..self.block_count())
            .map(|b| (b * n..(b + 1) * n).collect())
            .collect();
        PartitionOfPoints::new(self.point_count(), blocks).expect("blocks tile Y")
    }

    pub fn lift(&self, f: usize) -> &Perm {
        &self.lifts[f]
    }

    pub fn lifts(&self) -> &[Perm] {
        &self.lifts
    }

    /// Right multiplication by `k` on block `b` only.
    pub fn kernel_on_block(&self, b: usize, k: usize) -> Perm {
        let n = self.fiber.order();
        let mut image: Vec<usize> = (0..self.point_count()).collect();
        for y in 0..n {
            image[b * n + y] = b * n + self.fiber.mul(y, k);
        }
        Perm::from_images_unchecked(image)
    }

    /// `ℓ̂`: right multiplication by `ℓ` on every block at once.
    pub fn diagonal(&self, l: usize) -> Perm {
        let n = self.fiber.order();
        let image = (0..self.point_count())
            .map(|p| (p / n) * n + self.fiber.mul(p % n, l))
            .collect();
        Perm::from_images_unchecked(image)
    }

    pub fn base_group_generators(&self) -> Vec<Perm> {
        (0..self.block_count())
            .flat_map(|b| self.kernel_gens.iter().map(move |&k| (b, k)))
            .map(|(b, k)| self.kernel_on_block(b, k))
            .collect()
    }

    pub fn diagonal_generators(&self) -> Vec<Perm> {
        self.kernel_gens.iter().map(|&l| self.diagonal(l)).collect()
    }

    /// `K = ∏ K_X`, of order `|K_X|^{|Σ|}`.
    pub fn base_group_k(&self, cap: usize) -> Result<PermGroup> {
        let order = (self.kernel.order() as u128).checked_pow(self.block_count() as u32);
        if order.is_none_or(|o| o > cap as u128) {
            return Err(Error::ClosureCapExceeded { cap });
        }
        PermGroup::closure(self.point_count(), &self.base_group_generators(), cap)
    }

    pub fn diagonal_j(&self, cap: usize) -> Result<PermGroup> {
        PermGroup::closure(self.point_count(), &self.diagonal_generators(), cap)
    }

    /// `⟨K, F̄⟩`.
    pub fn gwp_group(&self, cap: usize) -> Result<PermGroup> {
        let mut gens = self.base_group_generators();
        gens.extend(self.base.generators().iter().map(|&f| self.lifts[f].clone()));
        PermGroup::closure(self.point_count(), &gens, cap)
    }

    /// Per-block kernel factors if `p ∈ K`: `p` fixes every block and acts on
    /// block `b` as right multiplication by some `k_b ∈ K_X`.
    pub fn kernel_factors(&self, p: &Perm) -> Option<Vec<usize>> {
        let (n, id) = (self.fiber.order(), self.fiber.identity());
        (0..self.block_count())
            .map(|b| {
                let img = p.apply(b * n + id);
                if img / n != b {
                    return None;
                }
                let k = img % n;
                let ok = self.kernel.contains(k)
                    && (0..n).all(|y| p.apply(b * n + y) == b * n + self.fiber.mul(y, k));
                ok.then_some(k)
            })
            .collect()
    }

    pub fn is_in_base_group(&self, p: &Perm) -> bool {
        p.degree() == self.point_count() && self.kernel_factors(p).is_some()
    }

    /// `ℓ` if `p = ℓ̂ ∈ J`.
    pub fn diagonal_factor(&self, p: &Perm) -> Option<usize> {
        let ks = self.kernel_factors(p)?;
        ks.iter().all(|&k| k == ks[0]).then(|| ks[0])
    }

    /// The transversal used on each block, if the table is of that shape.
    pub fn block_transversals(&self) -> Option<Vec<Transversal>> {
        (0..self.block_count())
            .map(|b| {
                let mut t = Transversal::new();
                for g in self.base.elements() {
                    let (hh, _) = self.transitions[g][b];
                    let c = self.choice.table[g][b];
                    if *t.entry(hh).or_insert(c) != c {
                        return None;
                    }
                }
                Some(t)
            })
            .collect()
    }

    /// The single transversal `T_H`, when every block uses the same one.
    pub fn transversal(&self) -> Option<Transversal> {
        let ts = self.block_transversals()?;
        ts.iter().all(|t| *t == ts[0]).then(|| ts[0].clone())
    }

    /// The splitting lemma's three conditions; `None` when the lifts do not
    /// come from a single transversal.
    pub fn lemma23_check(&self) -> Option<Lemma23Report> {
        let t = self.transversal()?;
        let (f, m) = (&self.base, &self.fiber);
        let fbar_is_hom = f.elements().all(|a| {
            f.elements()
                .all(|b| self.lifts[f.mul(a, b)] == self.lifts[a].then(&self.lifts[b]))
        });
        let values: Vec<usize> = t.values().copied().collect();
        let t_is_group = values
            .iter()
            .all(|&a| values.iter().all(|&b| values.contains(&m.mul(a, b))));
        // M = K ⋊ T: T a subgroup meeting K trivially with K·T = M
        let split = match m.subgroup(&values) {
            Ok(tg) => {
                tg.intersection(&self.kernel).is_trivial() && m.is_product_of(&self.kernel, &tg)
            }
            Err(_) => false,
        };
        let report = Lemma23Report {
            fbar_is_hom,
            t_is_group,
            split,
        };
        assert!(report.consistent(), "splitting conditions disagree: {report:?}");
        Some(report)
    }

    /// `f̄₁·f̄₂·(f₁f₂)̄⁻¹`, which always lies in `K`.
    pub fn obstruction(&self, f1: usize, f2: usize) -> Perm {
        let p = self.lifts[f1]
            .then(&self.lifts[f2])
            .then(&self.lifts[self.base.mul(f1, f2)].inverse());
        assert!(self.is_in_base_group(&p), "obstruction outside K");
        p
    }

    /// Every lift maps each block onto a block.
    pub fn blocks_permuted(&self) -> bool {
        let part = self.fiber_partition();
        self.lifts.iter().all(|l| part.is_preserved_by(l))
    }

    /// `⟨J, F̄⟩` has a single orbit on `Y`.
    pub fn jf_transitive(&self) -> bool {
        let mut gens = self.diagonal_generators();
        gens.extend(self.lifts.iter().cloned());
        orbits_of(self.point_count(), &gens).len() == 1
    }

    /// `k^{f̄} ∈ K` for every generator `k` of `K` and every lift.
    pub fn k_normalized_by_lifts(&self) -> bool {
        let gens = self.base_group_generators();
        self.lifts
            .iter()
            .all(|l| gens.iter().all(|k| self.is_in_base_group(&k.conjugate_by(l))))
    }

    /// `R = J·F̄`, verified closed and regular.
    pub fn regular_candidate(&self, exec: Exec) -> Result<RegularSubgroup> {
        let (kernel, base) = (&self.kernel, &self.base);
        let mut factors = Vec::with_capacity(kernel.order() * base.order());
        let mut set = HashSet::new();
        let mut elements = Vec::new();
        for &l in kernel.members() {
            let lhat = self.diagonal(l);
            for f in base.elements() {
                let r = lhat.then(&self.lifts[f]);
                if set.insert(r.clone()) {
                    elements.push(r);
                    factors.push((l, f));
                }
            }
        }
        let closed = exec.all(elements.len(), |i| {
            elements.iter().all(|b| set.contains(&elements[i].then(b)))
        });
        if !closed {
            return Err(Error::NotClosed);
        }
        let n = self.point_count();
        if elements.len() != n {
            return Err(Error::NotRegular);
        }
        let mut by_point: Vec<Option<usize>> = vec![None; n];
        for (i, r) in elements.iter().enumerate() {
            let slot = &mut by_point[r.apply(0)];
            if slot.is_some() {
                return Err(Error::NotRegular);
            }
            *slot = Some(i);
        }
        let order: Vec<usize> = by_point.into_iter().map(|i| i.expect("transitive")).collect();
        let elements: Vec<Perm> = order.iter().map(|&i| elements[i].clone()).collect();
        let factors: Vec<(usize, usize)> = order.iter().map(|&i| factors[i]).collect();
        let names = factors.iter().map(|&(l, f)| self.r_name(l, f)).collect();
        let table = (0..n)
            .map(|i| elements.iter().map(|rj| rj.apply(i)).collect())
            .collect();
        let group = FiniteGroup::from_table_with(names, table, n.max(1), exec)?;
        debug_assert_eq!(group.identity(), 0);
        Ok(RegularSubgroup {
            elements,
            factors,
            group,
        })
    }

    fn r_name(&self, l: usize, f: usize) -> String {
        let hat = (l != self.fiber.identity()).then(|| format!("hat({})", self.fiber.name(l)));
        let bar = (f != self.base.identity()).then(|| format!("bar({})", self.base.name(f)));
        match (hat, bar) {
            (None, None) => "1".into(),
            (h, b) => format!("{}{}", h.unwrap_or_default(), b.unwrap_or_default()),
        }
    }

    pub fn report(&self) -> ScaffoldReport {
        let names = |t: &Transversal| {
            t.iter()
                .map(|(&h, &c)| (self.base.name(h).to_string(), self.fiber.name(c).to_string()))
                .collect()
        };
        let transversals = match (self.transversal(), self.block_transversals()) {
            (Some(t), _) => vec![names(&t)],
            (None, Some(ts)) => ts.iter().map(names).collect(),
            (None, None) => Vec::new(),
        };
        ScaffoldReport {
            base_order: self.base.order(),
            stabilizer_order: self.stabilizer.order(),
            fiber_order: self.fiber.order(),
            kernel_order: self.kernel.order(),
            blocks: self.block_count(),
            points: self.point_count(),
            mode: self.origin,
            theorem_branch: self.branch,
            reps: self.choice.reps.iter().map(|&r| self.base.name(r).to_string()).collect(),
            transversals,
            lemma23: self.lemma23_check(),
        }
    }
}

/// Candidate lift choices in search order.
///
/// Digits, most significant first: the representative of each non-trivial
/// coset (among its members in index order), then for every block and every
/// non-identity `h` the preimage `t_h` (among `θ⁻¹(h)` in index order).
struct SearchSpace {
    cosets: Vec<Vec<usize>>,
    hs: Vec<usize>,
    preimages: Vec<Vec<usize>>,
    radices: Vec<usize>,
    blocks: usize,
}

impl SearchSpace {
    fn new(s: &Scaffold) -> SearchSpace {
        let (f, h) = (&s.base, &s.stabilizer);
        let canonical = f.right_coset_reps(h);
        let cosets: Vec<Vec<usize>> = canonical[1..]
            .iter()
            .map(|&r| {
                let mut c: Vec<usize> = h.members().iter().map(|&x| f.mul(x, r)).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let pre = s.theta.preimages();
        let hs: Vec<usize> = h.members().iter().copied().filter(|&x| x != f.identity()).collect();
        let preimages: Vec<Vec<usize>> = hs.iter().map(|x| pre[x].clone()).collect();
        let blocks = canonical.len();
        let mut radices: Vec<usize> = cosets.iter().map(Vec::len).collect();
        for _ in 0..blocks {
            radices.extend(preimages.iter().map(Vec::len));
        }
        SearchSpace {
            cosets,
            hs,
            preimages,
            radices,
            blocks,
        }
    }

    /// Total size, saturating at `limit`.
    fn size(&self, limit: usize) -> usize {
        self.radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .map_or(limit, |n| n.min(limit))
    }

    fn decode(&self, s: &Scaffold, mut index: usize) -> LiftChoice {
        let mut digits = vec![0; self.radices.len()];
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = index % r;
            index /= r;
        }
        let mut it = digits.into_iter();
        let mut reps = vec![s.base.identity()];
        for c in &self.cosets {
            reps.push(c[it.next().expect("digit")]);
        }
        let ts: Vec<Transversal> = (0..self.blocks)
            .map(|_| {
                let mut t = Transversal::from([(s.base.identity(), s.fiber.identity())]);
                for (k, &h) in self.hs.iter().enumerate() {
                    t.insert(h, self.preimages[k][it.next().expect("digit")]);
                }
                t
            })
            .collect();
        s.choice_from_block_transversals(&reps, &ts)
    }
}

const SEARCH_BATCH: usize = 256;

/// Looks for lift choices making `J·F̄` a regular group.
///
/// Tries the scaffold's own choice, then the theorem choice, then the
/// enumeration of [`SearchSpace`]; the first success in that order wins
/// regardless of `exec`. At most `budget` candidates are evaluated.
pub fn lift_search(s: &Scaffold, budget: usize, exec: Exec) -> LiftSearch {
    let mut evaluated = 0;
    let mut firsts = vec![(s.clone(), s.origin)];
    if let Ok((reps, t, _)) = s.theorem_choices() {
        let choice = s.choice_from_transversal(&reps, &t);
        if choice != s.choice {
            if let Ok(mut th) = s.with_choice(choice) {
                th.origin = ChoiceOrigin::Theorem;
                firsts.push((th, ChoiceOrigin::Theorem));
            }
        }
    }
    for (cand, origin) in firsts {
        if evaluated >= budget {
            return LiftSearch {
                found: None,
                evaluated,
            };
        }
        evaluated += 1;
        if let Ok(r) = cand.regular_candidate(exec) {
            let mut cand = cand;
            cand.origin = origin;
            return LiftSearch {
                found: Some((cand, r)),
                evaluated,
            };
        }
    }

    let space = SearchSpace::new(s);
    let total = space.size(budget - evaluated);
    let mut start = 0;
    while start < total {
        let len = SEARCH_BATCH.min(total - start);
        let hit = exec.find_map_first(len, |i| {
            let cand = s.with_choice(space.decode(s, start + i)).ok()?;
            let r = cand.regular_candidate(Exec::Sequential).ok()?;
            Some((cand, r))
        });
        if let Some((i, (mut cand, r))) = hit {
            cand.origin = ChoiceOrigin::Search;
            return LiftSearch {
                found: Some((cand, r)),
                evaluated: evaluated + i + 1,
            };
        }
        start += len;
    }
    LiftSearch {
        found: None,
        evaluated: evaluated + total,
    }
}
