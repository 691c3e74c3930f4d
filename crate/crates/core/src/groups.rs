//! Finite groups stored as full multiplication tables.
//!
//! Elements are indices `0..n`; `mul(a, b)` is the index of `a·b`. All the
//! machinery here (subgroups, cosets, centralizers, homomorphisms,
//! transversals, complements) works by exhaustive enumeration, which is the
//! intended regime: orders stay below a few hundred.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

pub const DEFAULT_ORDER_CAP: usize = 512;

/// Declarative description of a group, as read from scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Table {
        names: Vec<String>,
        table: Vec<Vec<usize>>,
    },
    Cyclic {
        order: usize,
        /// Name of the generator; elements are `e, g, g2, ...`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gen: Option<String>,
    },
    /// `⟨x, y | xⁿ = y² = 1, xy = yxⁿ⁻¹⟩` with `order = 2n`.
    Dihedral { order: usize },
    Quaternion8,
    ElementaryAbelian {
        p: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gens: Option<Vec<String>>,
    },
    Product { factors: Vec<GroupSpec> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[i][j]` = index of `eᵢ·eⱼ`).
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        Self::from_table_with(names, table, DEFAULT_ORDER_CAP, Exec::default())
    }

    pub fn from_table_with(
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        cap: usize,
        exec: Exec,
    ) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 {
            return Err(Error::TableNotGroup("empty table".into()));
        }
        if n > cap {
            return Err(Error::OrderCapExceeded { order: n, cap });
        }
        if names.len() != n {
            return Err(Error::TableNotGroup(format!(
                "{} names for a table with {n} rows",
                names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::TableNotGroup(format!("duplicate element name `{name}`")));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::TableNotGroup(format!("row {i} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::TableNotGroup(format!("row {i} contains out-of-range entry {bad}")));
            }
            flat.extend_from_slice(row);
        }
        let (identity, inverse) = check_group_axioms(&names, &flat, n, exec)?;
        let mut g = FiniteGroup {
            names,
            table: flat,
            identity,
            inverse,
            generators: Vec::new(),
        };
        g.generators = g.small_generating_set();
        Ok(g)
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<FiniteGroup> {
        Self::from_spec_with(spec, DEFAULT_ORDER_CAP)
    }

    pub fn from_spec_with(spec: &GroupSpec, cap: usize) -> Result<FiniteGroup> {
        let (names, table, gens) = spec_table(spec, cap)?;
        let mut g = Self::from_table_with(names, table, cap, Exec::default())?;
        if let Some(gens) = gens {
            g.generators = gens;
        }
        Ok(g)
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        Self::from_spec(&GroupSpec::Cyclic { order: n, gen: None }).expect("cyclic group")
    }

    pub fn cyclic_named(n: usize, gen: &str) -> FiniteGroup {
        Self::from_spec(&GroupSpec::Cyclic {
            order: n,
            gen: Some(gen.to_string()),
        })
        .expect("cyclic group")
    }

    /// Dihedral group of the given (even) order.
    pub fn dihedral(order: usize) -> Result<FiniteGroup> {
        Self::from_spec(&GroupSpec::Dihedral { order })
    }

    pub fn quaternion8() -> FiniteGroup {
        Self::from_spec(&GroupSpec::Quaternion8).expect("quaternion group")
    }

    pub fn elementary_abelian(p: usize, k: usize) -> Result<FiniteGroup> {
        Self::from_spec(&GroupSpec::ElementaryAbelian { p, k, gens: None })
    }

    pub fn direct_product(factors: &[FiniteGroup]) -> Result<FiniteGroup> {
        let (names, table, gens) = product_table(factors, DEFAULT_ORDER_CAP)?;
        let mut g = Self::from_table(names, table)?;
        g.generators = gens;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Like [`index_of`](Self::index_of) but reports the unknown name.
    pub fn element(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown group element `{name}`")))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    /// Named generators (for presentations) or a greedy generating set.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order()).map(<[usize]>::to_vec).collect()
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
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

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| (a + 1..self.order()).all(|b| self.commute(a, b)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_members(self.order(), self.elements())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_members(self.order(), [self.identity])
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        let n = self.order();
        let mut mask = vec![false; n];
        mask[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        Subgroup::from_mask(mask)
    }

    /// Checks that `members` is a subgroup.
    pub fn subgroup(&self, members: &[usize]) -> Result<Subgroup> {
        if let Some(&bad) = members.iter().find(|&&m| m >= self.order()) {
            return Err(Error::InvalidInput(format!("element index {bad} out of range")));
        }
        let s = Subgroup::from_members(self.order(), members.iter().copied());
        let closed = s.contains(self.identity)
            && s.members()
                .iter()
                .all(|&a| s.members().iter().all(|&b| s.contains(self.mul(a, b))));
        if closed {
            Ok(s)
        } else {
            Err(Error::InvalidInput("element set is not a subgroup".into()))
        }
    }

    pub fn centralizer_of(&self, set: &[usize]) -> Subgroup {
        Subgroup::from_members(
            self.order(),
            self.elements().filter(|&g| set.iter().all(|&s| self.commute(g, s))),
        )
    }

    pub fn centralizer(&self, s: &Subgroup) -> Subgroup {
        self.centralizer_of(s.members())
    }

    pub fn center(&self) -> Subgroup {
        self.centralizer_of(&self.elements().collect::<Vec<_>>())
    }

    /// `{a·b : a ∈ A, b ∈ B}` as a membership mask.
    pub fn product_set(&self, a: &Subgroup, b: &Subgroup) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        for &x in a.members() {
            for &y in b.members() {
                mask[self.mul(x, y)] = true;
            }
        }
        mask
    }

    /// `A·B = G`?
    pub fn is_product_of(&self, a: &Subgroup, b: &Subgroup) -> bool {
        self.product_set(a, b).iter().all(|&x| x)
    }

    /// One representative per right coset `Hg`: identity first, then the
    /// smallest element index of each remaining coset.
    pub fn right_coset_reps(&self, h: &Subgroup) -> Vec<usize> {
        let mut covered = vec![false; self.order()];
        let mut reps = Vec::with_capacity(self.order() / h.order());
        let mut take = |g: usize, covered: &mut Vec<bool>| {
            for &x in h.members() {
                covered[self.mul(x, g)] = true;
            }
            reps.push(g);
        };
        take(self.identity, &mut covered);
        for g in self.elements() {
            if !covered[g] {
                take(g, &mut covered);
            }
        }
        reps
    }

    /// Validates a caller-supplied representative list: the first entry must
    /// lie in `H` and each right coset must be hit exactly once.
    pub fn check_coset_reps(&self, h: &Subgroup, reps: &[usize]) -> Result<()> {
        let expected = self.order() / h.order();
        if reps.len() != expected {
            return Err(Error::InvalidReps(format!(
                "{} representatives for {expected} cosets",
                reps.len()
            )));
        }
        if let Some(&bad) = reps.iter().find(|&&r| r >= self.order()) {
            return Err(Error::InvalidReps(format!("index {bad} out of range")));
        }
        if reps[0] != self.identity {
            return Err(Error::InvalidReps(
                "the representative of H itself must be the identity".into(),
            ));
        }
        let mut covered = vec![false; self.order()];
        for &r in reps {
            if covered[r] {
                return Err(Error::InvalidReps(format!(
                    "{} lies in an already represented coset",
                    self.name(r)
                )));
            }
            for &x in h.members() {
                covered[self.mul(x, r)] = true;
            }
        }
        Ok(())
    }

    /// For each element `g`, the pair `(b, h)` with `g = h·reps[b]`.
    pub fn coset_decomposition(&self, h: &Subgroup, reps: &[usize]) -> Vec<(usize, usize)> {
        let mut out = vec![(usize::MAX, usize::MAX); self.order()];
        for (b, &r) in reps.iter().enumerate() {
            for &x in h.members() {
                out[self.mul(x, r)] = (b, x);
            }
        }
        debug_assert!(out.iter().all(|&(b, _)| b != usize::MAX));
        out
    }

    /// A subgroup `F₁` with `H ∩ F₁ = 1`, `H·F₁ = G` and `[H, F₁] = 1`.
    ///
    /// Searches subgroups generated by at most three elements of
    /// `C_G(H) \ H` in lexicographic order; returns the first hit.
    pub fn direct_complement(&self, h: &Subgroup) -> Option<Subgroup> {
        if h.order() == self.order() {
            return Some(self.trivial());
        }
        if h.is_trivial() {
            return Some(self.whole());
        }
        let target = self.order() / h.order();
        let cent = self.centralizer(h);
        let candidates: Vec<usize> = cent
            .members()
            .iter()
            .copied()
            .filter(|&g| !h.contains(g))
            .collect();
        let viable = |s: &Subgroup| {
            target.is_multiple_of(s.order()) && s.members().iter().all(|&x| x == self.identity || !h.contains(x))
        };
        let mut seen = HashSet::new();
        // depth-first in lexicographic order of generator tuples
        fn dfs(
            g: &FiniteGroup,
            gens: &mut Vec<usize>,
            start: usize,
            candidates: &[usize],
            target: usize,
            viable: &dyn Fn(&Subgroup) -> bool,
            seen: &mut HashSet<Vec<usize>>,
        ) -> Option<Subgroup> {
            if gens.len() == 3 {
                return None;
            }
            for idx in start..candidates.len() {
                gens.push(candidates[idx]);
                let s = g.subgroup_generated(gens);
                if viable(&s) && seen.insert(s.members().to_vec()) {
                    if s.order() == target {
                        return Some(s);
                    }
                    if let Some(found) = dfs(g, gens, idx + 1, candidates, target, viable, seen) {
                        return Some(found);
                    }
                }
                gens.pop();
            }
            None
        }
        let found = dfs(self, &mut Vec::new(), 0, &candidates, target, &viable, &mut seen)?;
        debug_assert!(found
            .members()
            .iter()
            .all(|&f| h.members().iter().all(|&x| self.commute(f, x))));
        Some(found)
    }

    /// Greedy generating set, preferring elements of large order.
    pub fn small_generating_set(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = self.elements().collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut current = self.trivial();
        for a in by_order {
            if current.order() == self.order() {
                break;
            }
            if !current.contains(a) {
                gens.push(a);
                current = self.subgroup_generated(&gens);
            }
        }
        gens
    }

    fn order_profile(&self) -> BTreeMap<usize, usize> {
        let mut prof = BTreeMap::new();
        for a in self.elements() {
            *prof.entry(self.element_order(a)).or_insert(0) += 1;
        }
        prof
    }

    /// An isomorphism `self → other` as an image list, if one exists.
    ///
    /// Generators are mapped to candidates of equal element order; partial
    /// assignments are extended by closure and pruned on conflict or loss of
    /// injectivity. The result is verified exhaustively before returning.
    pub fn isomorphism(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        if self.order() != other.order() || self.order_profile() != other.order_profile() {
            return None;
        }
        let gens = self.small_generating_set();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let ord = self.element_order(g);
                other.elements().filter(|&c| other.element_order(c) == ord).collect()
            })
            .collect();
        let mut images = Vec::with_capacity(gens.len());
        let map = self.iso_backtrack(other, &gens, &candidates, &mut images)?;
        let verified = self.elements().all(|a| {
            self.elements()
                .all(|b| map[self.mul(a, b)] == other.mul(map[a], map[b]))
        });
        assert!(verified, "isomorphism search produced a non-homomorphism");
        Some(map)
    }

    fn iso_backtrack(
        &self,
        other: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        let partial = extend_partial(self, other, &gens[..images.len()], images)?;
        if images.len() == gens.len() {
            return partial.into_iter().collect::<Option<Vec<usize>>>();
        }
        for &c in &candidates[images.len()] {
            images.push(c);
            if let Some(map) = self.iso_backtrack(other, gens, candidates, images) {
                return Some(map);
            }
            images.pop();
        }
        None
    }
}

/// Closure of `gens ↦ images` over `⟨gens⟩`, rejecting conflicts and
/// non-injective assignments.
fn extend_partial(
    dom: &FiniteGroup,
    cod: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<Option<usize>>> {
    let mut map = vec![None; dom.order()];
    let mut used = vec![false; cod.order()];
    map[dom.identity] = Some(cod.identity);
    used[cod.identity] = true;
    let mut queue = VecDeque::from([dom.identity]);
    while let Some(x) = queue.pop_front() {
        let fx = map[x].expect("visited");
        for (&s, &t) in gens.iter().zip(images) {
            let y = dom.mul(x, s);
            let fy = cod.mul(fx, t);
            match map[y] {
                Some(existing) if existing != fy => return None,
                Some(_) => {}
                None => {
                    if used[fy] {
                        return None;
                    }
                    used[fy] = true;
                    map[y] = Some(fy);
                    queue.push_back(y);
                }
            }
        }
    }
    Some(map)
}

fn check_group_axioms(
    names: &[String],
    t: &[usize],
    n: usize,
    exec: Exec,
) -> Result<(usize, Vec<usize>)> {
    let at = |a: usize, b: usize| t[a * n + b];
    for i in 0..n {
        let mut row = vec![false; n];
        let mut col = vec![false; n];
        for j in 0..n {
            row[at(i, j)] = true;
            col[at(j, i)] = true;
        }
        if !row.iter().all(|&x| x) {
            return Err(Error::TableNotGroup(format!("row of `{}` is not a permutation", names[i])));
        }
        if !col.iter().all(|&x| x) {
            return Err(Error::TableNotGroup(format!(
                "column of `{}` is not a permutation",
                names[i]
            )));
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|i| at(e, i) == i && at(i, e) == i))
        .ok_or_else(|| Error::TableNotGroup("no two-sided identity".into()))?;
    let mut inverse = vec![0; n];
    for i in 0..n {
        let j = (0..n).find(|&j| at(i, j) == identity).expect("latin square row");
        if at(j, i) != identity {
            return Err(Error::TableNotGroup(format!("`{}` has no two-sided inverse", names[i])));
        }
        inverse[i] = j;
    }
    let assoc_row = |a: usize| {
        (0..n).all(|b| (0..n).all(|c| at(at(a, b), c) == at(a, at(b, c))))
    };
    if !exec.all(n, assoc_row) {
        let a = exec.find_first(n, |a| !assoc_row(a)).expect("failing row");
        let (b, c) = (0..n)
            .flat_map(|b| (0..n).map(move |c| (b, c)))
            .find(|&(b, c)| at(at(a, b), c) != at(a, at(b, c)))
            .expect("failing pair");
        return Err(Error::TableNotGroup(format!(
            "associativity fails for ({}, {}, {})",
            names[a], names[b], names[c]
        )));
    }
    Ok((identity, inverse))
}

type Built = (Vec<String>, Vec<Vec<usize>>, Option<Vec<usize>>);

fn spec_table(spec: &GroupSpec, cap: usize) -> Result<Built> {
    let too_big = |order: usize| {
        if order > cap {
            Err(Error::OrderCapExceeded { order, cap })
        } else {
            Ok(())
        }
    };
    match spec {
        GroupSpec::Table { names, table } => Ok((names.clone(), table.clone(), None)),
        GroupSpec::Cyclic { order, gen } => {
            let n = *order;
            if n == 0 {
                return Err(Error::InvalidInput("cyclic group of order 0".into()));
            }
            too_big(n)?;
            let g = gen.as_deref().unwrap_or("g");
            let names = (0..n).map(|i| power_name(g, i)).collect();
            let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
            Ok((names, table, Some(if n > 1 { vec![1] } else { vec![] })))
        }
        GroupSpec::Dihedral { order } => {
            if *order < 2 || order % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "dihedral order must be even and positive, got {order}"
                )));
            }
            too_big(*order)?;
            let n = order / 2;
            // index = j·n + i  ↔  xⁱ yʲ
            let names = (0..2)
                .flat_map(|j| (0..n).map(move |i| (i, j)))
                .map(|(i, j)| match (i, j) {
                    (0, 0) => "e".to_string(),
                    (i, 0) => power_name("x", i),
                    (0, _) => "y".to_string(),
                    (i, _) => format!("{}y", power_name("x", i)),
                })
                .collect();
            let table = (0..2 * n)
                .map(|p| {
                    let (a, b) = (p % n, p / n);
                    (0..2 * n)
                        .map(|q| {
                            let (c, d) = (q % n, q / n);
                            // yᵇ xᶜ = x^{±c} yᵇ since y x y⁻¹ = x⁻¹
                            let c = if b == 1 { (n - c) % n } else { c };
                            ((b + d) % 2) * n + (a + c) % n
                        })
                        .collect()
                })
                .collect();
            let gens = if n > 1 { vec![1, n] } else { vec![n] };
            Ok((names, table, Some(gens)))
        }
        GroupSpec::Quaternion8 => {
            // index = 2·unit + sign, unit ∈ {1, i, j, k}
            let units = ["1", "i", "j", "k"];
            let names = (0..8)
                .map(|x| {
                    let (u, s) = (x / 2, x % 2);
                    if s == 0 {
                        units[u].to_string()
                    } else {
                        format!("-{}", units[u])
                    }
                })
                .collect();
            // unit products: (sign, unit)
            let unit_mul = |u: usize, v: usize| -> (usize, usize) {
                match (u, v) {
                    (0, v) => (0, v),
                    (u, 0) => (0, u),
                    (u, v) if u == v => (1, 0),
                    (1, 2) => (0, 3),
                    (2, 3) => (0, 1),
                    (3, 1) => (0, 2),
                    (2, 1) => (1, 3),
                    (3, 2) => (1, 1),
                    (1, 3) => (1, 2),
                    _ => unreachable!(),
                }
            };
            let table = (0..8)
                .map(|x| {
                    (0..8)
                        .map(|y| {
                            let (s, w) = unit_mul(x / 2, y / 2);
                            2 * w + (s + x % 2 + y % 2) % 2
                        })
                        .collect()
                })
                .collect();
            Ok((names, table, Some(vec![2, 4])))
        }
        GroupSpec::ElementaryAbelian { p, k, gens } => {
            let (p, k) = (*p, *k);
            if p < 2 || !(2..p).all(|d| p % d != 0) {
                return Err(Error::InvalidInput(format!("{p} is not a prime")));
            }
            let order = p.checked_pow(k as u32).filter(|&o| o <= cap).ok_or(
                Error::OrderCapExceeded {
                    order: p.saturating_pow(k as u32),
                    cap,
                },
            )?;
            let gen_names: Vec<String> = match gens {
                Some(g) if g.len() == k => g.clone(),
                Some(g) => {
                    return Err(Error::InvalidInput(format!(
                        "{} generator names for rank {k}",
                        g.len()
                    )))
                }
                None => (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect(),
            };
            let digits = |mut x: usize| {
                (0..k)
                    .map(|_| {
                        let d = x % p;
                        x /= p;
                        d
                    })
                    .collect::<Vec<_>>()
            };
            let names = (0..order)
                .map(|x| {
                    let s: String = digits(x)
                        .iter()
                        .zip(&gen_names)
                        .filter(|(&d, _)| d > 0)
                        .map(|(&d, g)| power_name(g, d))
                        .collect();
                    if s.is_empty() {
                        "e".to_string()
                    } else {
                        s
                    }
                })
                .collect();
            let table = (0..order)
                .map(|x| {
                    let dx = digits(x);
                    (0..order)
                        .map(|y| {
                            let dy = digits(y);
                            (0..k).rev().fold(0, |acc, i| acc * p + (dx[i] + dy[i]) % p)
                        })
                        .collect()
                })
                .collect();
            let gen_idx = (0..k).map(|i| p.pow(i as u32)).collect();
            Ok((names, table, Some(gen_idx)))
        }
        GroupSpec::Product { factors } => {
            let groups = factors
                .iter()
                .map(|f| FiniteGroup::from_spec_with(f, cap))
                .collect::<Result<Vec<_>>>()?;
            let (names, table, gens) = product_table(&groups, cap)?;
            Ok((names, table, Some(gens)))
        }
    }
}

fn power_name(g: &str, i: usize) -> String {
    match i {
        0 => "e".to_string(),
        1 => g.to_string(),
        _ => format!("{g}{i}"),
    }
}

type ProductTable = (Vec<String>, Vec<Vec<usize>>, Vec<usize>);

/// Direct product; element index is mixed-radix with the first factor fastest.
fn product_table(
    factors: &[FiniteGroup],
    cap: usize,
) -> Result<ProductTable> {
    let order = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.order()))
        .unwrap_or(usize::MAX);
    if order > cap {
        return Err(Error::OrderCapExceeded { order, cap });
    }
    let split = |mut x: usize| {
        factors
            .iter()
            .map(|f| {
                let d = x % f.order();
                x /= f.order();
                d
            })
            .collect::<Vec<_>>()
    };
    let join = |parts: &[usize]| {
        factors
            .iter()
            .zip(parts)
            .rev()
            .fold(0, |acc, (f, &d)| acc * f.order() + d)
    };
    let mut names: Vec<String> = (0..order)
        .map(|x| {
            let s: String = split(x)
                .iter()
                .zip(factors)
                .filter(|(&d, f)| d != f.identity())
                .map(|(&d, f)| f.name(d).to_string())
                .collect();
            if s.is_empty() {
                "e".to_string()
            } else {
                s
            }
        })
        .collect();
    if names.iter().collect::<BTreeSet<_>>().len() != order {
        names = (0..order)
            .map(|x| {
                let parts: Vec<&str> = split(x)
                    .iter()
                    .zip(factors)
                    .map(|(&d, f)| f.name(d))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
    }
    let table = (0..order)
        .map(|x| {
            let px = split(x);
            (0..order)
                .map(|y| {
                    let py = split(y);
                    let prod: Vec<usize> = factors
                        .iter()
                        .enumerate()
                        .map(|(i, f)| f.mul(px[i], py[i]))
                        .collect();
                    join(&prod)
                })
                .collect()
        })
        .collect();
    let mut gens = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        for &g in f.generators() {
            let mut parts: Vec<usize> = factors.iter().map(FiniteGroup::identity).collect();
            parts[i] = g;
            gens.push(join(&parts));
        }
    }
    Ok((names, table, gens))
}

/// Subset of a finite group closed under its operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl Subgroup {
    fn from_mask(mask: Vec<bool>) -> Subgroup {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Subgroup { members, mask }
    }

    fn from_members(parent_order: usize, members: impl IntoIterator<Item = usize>) -> Subgroup {
        let mut mask = vec![false; parent_order];
        for m in members {
            mask[m] = true;
        }
        Self::from_mask(mask)
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Sorted element indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, g: usize) -> bool {
        self.mask.get(g).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn parent_order(&self) -> usize {
        self.mask.len()
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Self::from_members(
            self.parent_order(),
            self.members.iter().copied().filter(|&g| other.contains(g)),
        )
    }
}

/// A homomorphism between two [`FiniteGroup`]s, stored as an image list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    map: Vec<usize>,
    dom_identity: usize,
    cod_identity: usize,
    cod_order: usize,
}

impl GroupHom {
    /// The unique homomorphism extending `gen_images` (pairs of domain and
    /// codomain indices), built by closure and then verified on all pairs.
    pub fn from_images(
        dom: &FiniteGroup,
        cod: &FiniteGroup,
        gen_images: &[(usize, usize)],
    ) -> Result<GroupHom> {
        for &(g, h) in gen_images {
            if g >= dom.order() || h >= cod.order() {
                return Err(Error::InvalidInput("generator image index out of range".into()));
            }
        }
        let mut map = vec![usize::MAX; dom.order()];
        map[dom.identity()] = cod.identity();
        let mut queue = VecDeque::from([dom.identity()]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &(s, t) in gen_images {
                let y = dom.mul(x, s);
                let fy = cod.mul(map[x], t);
                if map[y] == usize::MAX {
                    map[y] = fy;
                    reached += 1;
                    queue.push_back(y);
                } else if map[y] != fy {
                    return Err(Error::NotAHomomorphism {
                        a: dom.name(x).to_string(),
                        b: dom.name(s).to_string(),
                    });
                }
            }
        }
        if reached < dom.order() {
            return Err(Error::GeneratorsInsufficient {
                reached,
                order: dom.order(),
            });
        }
        let hom = GroupHom {
            map,
            dom_identity: dom.identity(),
            cod_identity: cod.identity(),
            cod_order: cod.order(),
        };
        if let Some((a, b)) = hom.first_violation(dom, cod) {
            return Err(Error::NotAHomomorphism {
                a: dom.name(a).to_string(),
                b: dom.name(b).to_string(),
            });
        }
        Ok(hom)
    }

    /// Name-based variant of [`from_images`](Self::from_images).
    pub fn from_named_images(
        dom: &FiniteGroup,
        cod: &FiniteGroup,
        gen_images: &[(&str, &str)],
    ) -> Result<GroupHom> {
        let pairs = gen_images
            .iter()
            .map(|(a, b)| Ok((dom.element(a)?, cod.element(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(dom, cod, &pairs)
    }

    pub fn identity(g: &FiniteGroup) -> GroupHom {
        GroupHom {
            map: g.elements().collect(),
            dom_identity: g.identity(),
            cod_identity: g.identity(),
            cod_order: g.order(),
        }
    }

    /// First pair `(a, b)` with `map(ab) ≠ map(a)map(b)`.
    pub fn first_violation(&self, dom: &FiniteGroup, cod: &FiniteGroup) -> Option<(usize, usize)> {
        dom.elements()
            .flat_map(|a| dom.elements().map(move |b| (a, b)))
            .find(|&(a, b)| self.map[dom.mul(a, b)] != cod.mul(self.map[a], self.map[b]))
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    /// Sorted distinct image elements.
    pub fn image(&self) -> Vec<usize> {
        self.map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.cod_order
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.map.len()
    }

    pub fn kernel(&self) -> Subgroup {
        Subgroup::from_members(
            self.map.len(),
            self.map
                .iter()
                .enumerate()
                .filter_map(|(g, &img)| (img == self.cod_identity).then_some(g)),
        )
    }

    /// For each image element, its preimages in index order.
    pub fn preimages(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (g, &img) in self.map.iter().enumerate() {
            out.entry(img).or_default().push(g);
        }
        out
    }

    pub fn domain_identity(&self) -> usize {
        self.dom_identity
    }

    pub fn codomain_identity(&self) -> usize {
        self.cod_identity
    }
}

/// Chosen preimages `h ↦ t_h` over the image of a homomorphism, with
/// `t_identity = identity`.
pub type Transversal = BTreeMap<usize, usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransversalMode {
    /// Every `t_h` commutes with the kernel.
    Centralizing,
    /// The transversal is itself a subgroup.
    Subgroup,
    /// Both of the above.
    CentralizingSubgroup,
}

/// Smallest-index preimages.
pub fn canonical_transversal(theta: &GroupHom) -> Transversal {
    theta
        .preimages()
        .into_iter()
        .map(|(h, pre)| {
            let t = if h == theta.codomain_identity() {
                theta.domain_identity()
            } else {
                pre[0]
            };
            (h, t)
        })
        .collect()
}

/// A transversal with the properties requested by `mode`, if one exists.
///
/// `m` is the domain of `theta` and `cod` its codomain.
pub fn find_transversal(
    m: &FiniteGroup,
    cod: &FiniteGroup,
    theta: &GroupHom,
    mode: TransversalMode,
) -> Option<Transversal> {
    let kernel = theta.kernel();
    let cent = m.centralizer(&kernel);
    let centralizing = mode != TransversalMode::Subgroup;
    let mut pre = theta.preimages();
    if centralizing {
        for list in pre.values_mut() {
            list.retain(|&x| cent.contains(x));
        }
    }
    if mode == TransversalMode::Centralizing {
        let mut t = Transversal::new();
        for (h, list) in pre {
            let choice = if h == cod.identity() {
                m.identity()
            } else {
                *list.first()?
            };
            t.insert(h, choice);
        }
        return Some(t);
    }
    let mut assign = Transversal::new();
    assign.insert(cod.identity(), m.identity());
    let order: Vec<usize> = pre.keys().copied().collect();
    subgroup_transversal_search(m, cod, &pre, &order, assign)
}

fn subgroup_transversal_search(
    m: &FiniteGroup,
    cod: &FiniteGroup,
    pre: &BTreeMap<usize, Vec<usize>>,
    order: &[usize],
    assign: Transversal,
) -> Option<Transversal> {
    let Some(&h) = order.iter().find(|h| !assign.contains_key(h)) else {
        return Some(assign);
    };
    for &c in &pre[&h] {
        let mut next = assign.clone();
        next.insert(h, c);
        if propagate_products(m, cod, &mut next) {
            if let Some(done) = subgroup_transversal_search(m, cod, pre, order, next) {
                return Some(done);
            }
        }
    }
    None
}

/// Forces `t_{h₁h₂} = t_{h₁}t_{h₂}`; false on conflict.
fn propagate_products(m: &FiniteGroup, cod: &FiniteGroup, assign: &mut Transversal) -> bool {
    loop {
        let pairs: Vec<(usize, usize)> = assign.iter().map(|(&h, &t)| (h, t)).collect();
        let mut changed = false;
        for &(h1, t1) in &pairs {
            for &(h2, t2) in &pairs {
                let h = cod.mul(h1, h2);
                let t = m.mul(t1, t2);
                match assign.get(&h) {
                    Some(&existing) if existing != t => return false,
                    Some(_) => {}
                    None => {
                        assign.insert(h, t);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Whether the transversal values form a subgroup of `m`.
pub fn transversal_is_subgroup(m: &FiniteGroup, t: &Transversal) -> bool {
    let vals: HashSet<usize> = t.values().copied().collect();
    vals.iter().all(|&a| vals.iter().all(|&b| vals.contains(&m.mul(a, b))))
}
