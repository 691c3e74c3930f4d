//! Finite simple undirected graphs with stable vertex labels, Cayley graphs,
//! and brute-force isomorphism / automorphism oracles.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::perms::{orbits_of, Perm, PermGroup};

pub const DEFAULT_ISO_CAP: usize = 64;
pub const DEFAULT_AUT_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

/// On-disk form: `{"vertices": [...labels...], "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let n = labels.len();
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate vertex label `{dup}`")));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("loop at vertex `{}`", labels[u])));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        let mut matrix = vec![false; n * n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
            matrix[u * n + v] = true;
            matrix[v * n + u] = true;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            labels,
            edges: set.into_iter().collect(),
            adj,
            matrix,
        })
    }

    /// Vertices labelled `0..n`.
    pub fn unlabelled(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn edgeless(n: usize) -> Graph {
        Self::unlabelled(n, []).expect("edgeless graph")
    }

    pub fn path(n: usize) -> Graph {
        Self::unlabelled(n, (1..n).map(|i| (i - 1, i))).expect("path graph")
    }

    pub fn cycle(n: usize) -> Graph {
        Self::unlabelled(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle graph")
    }

    pub fn complete(n: usize) -> Graph {
        Self::unlabelled(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("complete graph")
    }

    pub fn from_json(json: &GraphJson) -> Result<Graph> {
        Self::new(json.vertices.clone(), json.edges.iter().map(|&[u, v]| (u, v)))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.labels.clone(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edges as `(min, max)` index pairs in sorted order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.vertex_count() + v]
    }

    /// The common degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Edge set as unordered label pairs, for label-level comparisons.
    pub fn label_edges(&self) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (self.labels[u].clone(), self.labels[v].clone());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    /// `G[X]`: vertices in the order given, original labels kept.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        let edges = (0..vertices.len()).flat_map(|i| {
            (i + 1..vertices.len())
                .filter(move |&j| self.has_edge(vertices[i], vertices[j]))
                .map(move |j| (i, j))
        });
        Graph::new(labels, edges).expect("induced subgraph of a valid graph")
    }

    /// Same graph with new labels.
    pub fn relabelled(&self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.vertex_count() {
            return Err(Error::InvalidInput("label count mismatch".into()));
        }
        Graph::new(labels, self.edges.iter().copied())
    }

    /// `p` preserves adjacency (and hence non-adjacency, being a bijection).
    pub fn is_automorphism(&self, p: &Perm) -> bool {
        self.first_broken_edge(p).is_none()
    }

    /// An edge whose image under `p` is not an edge.
    pub fn first_broken_edge(&self, p: &Perm) -> Option<(usize, usize)> {
        if p.degree() != self.vertex_count() {
            return self.edges.first().copied().or(Some((0, 0)));
        }
        self.edges
            .iter()
            .copied()
            .find(|&(u, v)| !self.has_edge(p.apply(u), p.apply(v)))
    }

    /// DOT text with vertices and edges sorted by label.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {} {{", dot_id(name));
        let mut labels: Vec<&String> = self.labels.iter().collect();
        labels.sort();
        for l in labels {
            let _ = writeln!(out, "  {};", dot_id(l));
        }
        for (a, b) in self.label_edges() {
            let _ = writeln!(out, "  {} -- {};", dot_id(&a), dot_id(&b));
        }
        out.push_str("}\n");
        out
    }

    /// One `label1 label2` line per edge, lexicographic.
    pub fn to_edge_list(&self) -> String {
        self.label_edges()
            .into_iter()
            .map(|(a, b)| format!("{a} {b}\n"))
            .collect()
    }
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// `Cay(A, S)`: vertex `a` adjacent to `b` iff `a·b⁻¹ ∈ S`.
pub fn cayley_graph(a: &FiniteGroup, s: &[usize]) -> Result<Graph> {
    let set: BTreeSet<usize> = s.iter().copied().collect();
    if set.iter().any(|&x| x >= a.order()) {
        return Err(Error::InvalidInput("connection set element out of range".into()));
    }
    if set.contains(&a.identity()) {
        return Err(Error::IdentityInConnectionSet);
    }
    if let Some(&x) = set.iter().find(|&&x| !set.contains(&a.inv(x))) {
        return Err(Error::AsymmetricConnectionSet(a.name(x).to_string()));
    }
    let edges: Vec<(usize, usize)> = a
        .elements()
        .flat_map(|u| {
            set.iter()
                .map(move |&x| (u, a.mul(a.inv(x), u)))
        })
        .collect();
    // (u, v) with v = x⁻¹u satisfies u·v⁻¹ = x
    Graph::new(a.names().to_vec(), edges)
}

/// Every domain edge lands on a codomain edge, or collapses onto one vertex
/// when `collapse_allowed`.
pub fn is_graph_homomorphism(dom: &Graph, cod: &Graph, map: &[usize], collapse_allowed: bool) -> bool {
    map.len() == dom.vertex_count()
        && map.iter().all(|&x| x < cod.vertex_count())
        && dom.edges().iter().all(|&(u, v)| {
            let (a, b) = (map[u], map[v]);
            if a == b {
                collapse_allowed
            } else {
                cod.has_edge(a, b)
            }
        })
}

/// Homomorphism that is onto the vertices and onto the edges of `cod`.
pub fn is_graph_epimorphism(dom: &Graph, cod: &Graph, map: &[usize], collapse_allowed: bool) -> bool {
    if !is_graph_homomorphism(dom, cod, map, collapse_allowed) {
        return false;
    }
    let hit: BTreeSet<usize> = map.iter().copied().collect();
    if hit.len() != cod.vertex_count() {
        return false;
    }
    let hit_edges: BTreeSet<(usize, usize)> = dom
        .edges()
        .iter()
        .map(|&(u, v)| (map[u].min(map[v]), map[u].max(map[v])))
        .collect();
    cod.edges().iter().all(|e| hit_edges.contains(e))
}

/// Whether `map` is an edge-exact bijection `g → h`.
pub fn is_isomorphism(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() || map.len() != g.vertex_count() {
        return false;
    }
    let distinct: BTreeSet<usize> = map.iter().copied().collect();
    distinct.len() == map.len()
        && map.iter().all(|&x| x < h.vertex_count())
        && g.edges().iter().all(|&(u, v)| h.has_edge(map[u], map[v]))
}

/// Joint colour refinement of `g` and `h`, so colours are comparable.
fn refine_colors(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let graphs = [g, h];
    let mut colors: Vec<Vec<usize>> = graphs
        .iter()
        .map(|gr| (0..gr.vertex_count()).map(|v| gr.degree(v)).collect())
        .collect();
    let mut classes = usize::MAX;
    loop {
        let mut palette = BTreeMap::new();
        let sigs: Vec<Vec<(usize, Vec<usize>)>> = graphs
            .iter()
            .zip(&colors)
            .map(|(gr, col)| {
                (0..gr.vertex_count())
                    .map(|v| {
                        let mut nb: Vec<usize> = gr.neighbors(v).iter().map(|&w| col[w]).collect();
                        nb.sort_unstable();
                        (col[v], nb)
                    })
                    .collect()
            })
            .collect();
        for sig in sigs.iter().flatten() {
            let next = palette.len();
            palette.entry(sig.clone()).or_insert(next);
        }
        colors = sigs
            .iter()
            .map(|s| s.iter().map(|sig| palette[sig]).collect())
            .collect();
        if palette.len() == classes {
            break;
        }
        classes = palette.len();
    }
    let h_colors = colors.pop().expect("two graphs");
    (colors.pop().expect("two graphs"), h_colors)
}

/// Backtracking matcher from `g` onto `h` with colour-class pruning.
struct Matcher<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
}

impl<'a> Matcher<'a> {
    fn new(g: &'a Graph, h: &'a Graph) -> Option<Matcher<'a>> {
        let n = g.vertex_count();
        if n != h.vertex_count() || g.edge_count() != h.edge_count() {
            return None;
        }
        let (cg, ch) = refine_colors(g, h);
        let mut class_g: BTreeMap<usize, usize> = BTreeMap::new();
        let mut class_h: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &c in &cg {
            *class_g.entry(c).or_default() += 1;
        }
        for (v, &c) in ch.iter().enumerate() {
            class_h.entry(c).or_default().push(v);
        }
        if class_g.len() != class_h.len()
            || class_g.iter().any(|(c, &k)| class_h.get(c).map_or(0, Vec::len) != k)
        {
            return None;
        }
        // greedy order: most already-placed neighbours, then rarest colour
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut links = vec![0usize; n];
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !placed[v])
                .min_by_key(|&v| (std::cmp::Reverse(links[v]), class_g[&cg[v]], v))
                .expect("unplaced vertex");
            placed[v] = true;
            order.push(v);
            for &w in g.neighbors(v) {
                links[w] += 1;
            }
        }
        let candidates = (0..n).map(|v| class_h[&cg[v]].clone()).collect();
        Some(Matcher { g, h, order, candidates })
    }

    /// Calls `visit` on each complete isomorphism; stops when it returns false.
    fn run(&self, first_image: Option<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let n = self.g.vertex_count();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.step(0, first_image, &mut map, &mut used, visit);
    }

    fn step(
        &self,
        depth: usize,
        first_image: Option<usize>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == self.order.len() {
            return visit(map);
        }
        let v = self.order[depth];
        for &w in &self.candidates[v] {
            if used[w] || (depth == 0 && first_image.is_some_and(|f| f != w)) {
                continue;
            }
            let consistent = self.order[..depth]
                .iter()
                .all(|&u| self.g.has_edge(u, v) == self.h.has_edge(map[u], w));
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            let keep_going = self.step(depth + 1, first_image, map, used, visit);
            used[w] = false;
            map[v] = usize::MAX;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::SizeCapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

/// An isomorphism `g → h` (image list), verified edge-exactly.
pub fn graph_isomorphic(g: &Graph, h: &Graph, cap: usize) -> Result<Option<Vec<usize>>> {
    check_cap("graph", g.vertex_count().max(h.vertex_count()), cap)?;
    let Some(matcher) = Matcher::new(g, h) else {
        return Ok(None);
    };
    let mut found = None;
    matcher.run(None, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    if let Some(m) = &found {
        assert!(is_isomorphism(g, h, m), "isomorphism search returned a bad witness");
    }
    Ok(found)
}

/// `Aut(G)`, enumerated exhaustively.
pub fn automorphism_group(g: &Graph, vertex_cap: usize, closure_cap: usize) -> Result<PermGroup> {
    check_cap("graph", g.vertex_count(), vertex_cap)?;
    let n = g.vertex_count();
    let matcher = Matcher::new(g, g).expect("a graph matches itself");
    let mut all = Vec::new();
    let mut overflow = false;
    matcher.run(None, &mut |m| {
        if all.len() == closure_cap {
            overflow = true;
            return false;
        }
        all.push(Perm::from_images_unchecked(m.to_vec()));
        true
    });
    if overflow {
        return Err(Error::ClosureCapExceeded { cap: closure_cap });
    }
    // greedy generating set, then closure (which must reproduce the same set)
    let mut gens: Vec<Perm> = Vec::new();
    let mut group = PermGroup::trivial(n);
    for p in &all {
        if !group.contains(p) {
            gens.push(p.clone());
            group = PermGroup::closure(n, &gens, closure_cap)?;
        }
    }
    debug_assert_eq!(group.order(), all.len());
    Ok(group)
}

/// Vertex-transitivity, via a witness subgroup if given, otherwise by
/// searching for automorphisms moving vertex 0 to every other vertex.
pub fn is_vertex_transitive(g: &Graph, witness: Option<&PermGroup>, vertex_cap: usize) -> Result<bool> {
    let n = g.vertex_count();
    if n <= 1 {
        return Ok(true);
    }
    if let Some(w) = witness {
        if let Some(bad) = w.generators().iter().find(|p| !g.is_automorphism(p)) {
            return Err(Error::InvalidInput(format!(
                "witness generator {:?} is not an automorphism",
                bad.images()
            )));
        }
        return Ok(w.is_transitive());
    }
    check_cap("graph", n, vertex_cap)?;
    if g.regular_degree().is_none() {
        return Ok(false);
    }
    let matcher = Matcher::new(g, g).expect("a graph matches itself");
    // the search always places `start` first, so grow the orbit of `start`
    let start = matcher.order[0];
    let mut found: Vec<Perm> = Vec::new();
    let mut reached = vec![start];
    for target in 0..n {
        if reached.contains(&target) {
            continue;
        }
        let mut hit = None;
        matcher.run(Some(target), &mut |m| {
            hit = Some(Perm::from_images_unchecked(m.to_vec()));
            false
        });
        let Some(p) = hit else {
            return Ok(false);
        };
        found.push(p);
        reached = orbits_of(n, &found)
            .into_iter()
            .find(|o| o.contains(&start))
            .expect("orbit of start");
    }
    Ok(true)
}
