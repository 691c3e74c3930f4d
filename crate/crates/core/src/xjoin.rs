//! The generalized X-join `G ∘_λ {B_X}` and its special cases.
//!
//! Vertices of the join are the disjoint union of the fiber vertex sets, in
//! block order, labelled `"<block>:<fiber vertex>"`. Two vertices are adjacent
//! when they are adjacent inside one fiber, or when they lie in different
//! blocks and their images under `λ` are adjacent in `G`.

use crate::error::{Error, Result};
use crate::graphs::{is_graph_epimorphism, Graph};
use crate::perms::PartitionOfPoints;

#[derive(Debug, Clone)]
pub struct XJoinInput {
    pub base: Graph,
    pub blocks: PartitionOfPoints,
    pub block_labels: Vec<String>,
    pub fibers: Vec<Graph>,
    /// `lambdas[b][y]` is the base vertex that fiber vertex `y` of block `b`
    /// maps to.
    pub lambdas: Vec<Vec<usize>>,
}

impl XJoinInput {
    /// Singleton blocks labelled by the base vertex labels.
    pub fn singleton_blocks(base: Graph, fibers: Vec<Graph>) -> Result<XJoinInput> {
        let n = base.vertex_count();
        if fibers.len() != n {
            return Err(Error::InvalidInput(format!("{} fibers for {n} vertices", fibers.len())));
        }
        let lambdas = fibers
            .iter()
            .enumerate()
            .map(|(x, f)| vec![x; f.vertex_count()])
            .collect();
        Ok(XJoinInput {
            blocks: PartitionOfPoints::singletons(n),
            block_labels: base.labels().to_vec(),
            base,
            fibers,
            lambdas,
        })
    }

    /// Offset of each fiber inside the joined vertex set.
    pub fn offsets(&self) -> Vec<usize> {
        self.fibers
            .iter()
            .scan(0, |acc, f| {
                let start = *acc;
                *acc += f.vertex_count();
                Some(start)
            })
            .collect()
    }

    /// The partition `{Y_X}` of the joined vertex set.
    pub fn fiber_partition(&self) -> PartitionOfPoints {
        let offsets = self.offsets();
        let total = self.fibers.iter().map(Graph::vertex_count).sum();
        let blocks = self
            .fibers
            .iter()
            .zip(&offsets)
            .map(|(f, &o)| (o..o + f.vertex_count()).collect())
            .collect();
        PartitionOfPoints::new(total, blocks).expect("fibers are disjoint and non-empty")
    }

    fn validate(&self, collapse_allowed: bool) -> Result<()> {
        let nb = self.blocks.blocks().len();
        if self.blocks.degree() != self.base.vertex_count() {
            return Err(Error::SigmaNotPartition(format!(
                "partition covers {} points, base graph has {} vertices",
                self.blocks.degree(),
                self.base.vertex_count()
            )));
        }
        if self.fibers.len() != nb || self.lambdas.len() != nb || self.block_labels.len() != nb {
            return Err(Error::InvalidInput(format!(
                "{nb} blocks but {} fibers, {} maps and {} labels",
                self.fibers.len(),
                self.lambdas.len(),
                self.block_labels.len()
            )));
        }
        for (b, block) in self.blocks.blocks().iter().enumerate() {
            let lambda = &self.lambdas[b];
            let label = &self.block_labels[b];
            if lambda.len() != self.fibers[b].vertex_count() {
                return Err(Error::InvalidInput(format!(
                    "map of block {label} has {} entries for {} fiber vertices",
                    lambda.len(),
                    self.fibers[b].vertex_count()
                )));
            }
            // λ_X in coordinates of G[X]
            let mut local = Vec::with_capacity(lambda.len());
            for &x in lambda {
                match block.iter().position(|&v| v == x) {
                    Some(i) => local.push(i),
                    None => return Err(Error::LambdaNotEpimorphism { block: label.clone() }),
                }
            }
            let induced = self.base.induced_subgraph(block);
            if !is_graph_epimorphism(&self.fibers[b], &induced, &local, collapse_allowed) {
                return Err(Error::LambdaNotEpimorphism { block: label.clone() });
            }
        }
        Ok(())
    }
}

/// Builds `G ∘_λ {B_X}` after checking that every `λ_X` is an epimorphism
/// onto `G[X]`.
pub fn generalized_xjoin(inp: &XJoinInput, collapse_allowed: bool) -> Result<Graph> {
    inp.validate(collapse_allowed)?;
    let offsets = inp.offsets();
    let labels: Vec<String> = inp
        .fibers
        .iter()
        .zip(&inp.block_labels)
        .flat_map(|(f, bl)| f.labels().iter().map(move |l| format!("{bl}:{l}")))
        .collect();

    // preimages λ⁻¹(x) as joined-vertex indices
    let mut preimage = vec![Vec::new(); inp.base.vertex_count()];
    for (b, lambda) in inp.lambdas.iter().enumerate() {
        for (y, &x) in lambda.iter().enumerate() {
            preimage[x].push(offsets[b] + y);
        }
    }

    let mut edges = Vec::new();
    for (f, &o) in inp.fibers.iter().zip(&offsets) {
        edges.extend(f.edges().iter().map(|&(u, v)| (o + u, o + v)));
    }
    for &(x, x2) in inp.base.edges() {
        if inp.blocks.block_of(x) == inp.blocks.block_of(x2) {
            continue;
        }
        for &y in &preimage[x] {
            for &y2 in &preimage[x2] {
                edges.push((y, y2));
            }
        }
    }
    Graph::new(labels, edges)
}

/// `G ∘ H` computed as an X-join with singleton blocks, and cross-checked
/// against [`lexicographic_product_direct`].
pub fn lexicographic_product(g: &Graph, h: &Graph) -> Graph {
    let inp = XJoinInput::singleton_blocks(g.clone(), vec![h.clone(); g.vertex_count()])
        .expect("one fiber per vertex");
    let joined = generalized_xjoin(&inp, true).expect("constant map onto a single vertex");
    let direct = lexicographic_product_direct(g, h);
    assert_eq!(joined, direct, "lexicographic product routes disagree");
    joined
}

/// `(g, h) ~ (g', h')` iff `g ~ g'`, or `g = g'` and `h ~ h'`.
pub fn lexicographic_product_direct(g: &Graph, h: &Graph) -> Graph {
    let m = h.vertex_count();
    let labels = g
        .labels()
        .iter()
        .flat_map(|a| h.labels().iter().map(move |b| format!("{a}:{b}")))
        .collect();
    let n = g.vertex_count() * m;
    let edges = (0..n).flat_map(|p| {
        (p + 1..n).filter_map(move |q| {
            let (g1, h1, g2, h2) = (p / m, p % m, q / m, q % m);
            (g.has_edge(g1, g2) || (g1 == g2 && h.has_edge(h1, h2))).then_some((p, q))
        })
    });
    Graph::new(labels, edges).expect("valid product")
}

/// The G-join `G[B_x]`: one fiber per vertex of `G`.
pub fn g_join(g: &Graph, fibers: Vec<Graph>) -> Result<Graph> {
    generalized_xjoin(&XJoinInput::singleton_blocks(g.clone(), fibers)?, true)
}

/// Neighbour counts into each block are constant on every block.
pub fn is_equitable(w: &Graph, p: &PartitionOfPoints) -> bool {
    let nb = p.blocks().len();
    let profile = |v: usize| {
        let mut counts = vec![0usize; nb];
        for &u in w.neighbors(v) {
            counts[p.block_of(u)] += 1;
        }
        counts
    };
    p.blocks().iter().all(|block| {
        let first = profile(block[0]);
        block[1..].iter().all(|&v| profile(v) == first)
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graphs::graph_isomorphic;

    fn labelled(labels: &[&str], edges: &[(&str, &str)]) -> Graph {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let idx = |l: &str| labels.iter().position(|x| x == l).unwrap();
        let e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
        Graph::new(labels, e).unwrap()
    }

    pub(crate) fn two_block_xjoin() -> XJoinInput {
        let base = labelled(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("2", "3"), ("3", "4"), ("4", "1"), ("2", "4")],
        );
        let bx = labelled(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]);
        let bx2 = labelled(&["e", "f", "g"], &[("e", "g"), ("g", "f"), ("e", "f")]);
        XJoinInput {
            base,
            blocks: PartitionOfPoints::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap(),
            block_labels: vec!["X".into(), "X'".into()],
            fibers: vec![bx, bx2],
            // a,b ↦ 1; c,d ↦ 3; e ↦ 2; f,g ↦ 4
            lambdas: vec![vec![0, 0, 2, 2], vec![1, 3, 3]],
        }
    }

    #[test]
    fn two_block_xjoin_edges() {
        let w = generalized_xjoin(&two_block_xjoin(), true).unwrap();
        assert_eq!(w.vertex_count(), 7);
        let stripped: BTreeSet<(String, String)> = w
            .label_edges()
            .into_iter()
            .map(|(a, b)| {
                let s = |x: &str| x.rsplit(':').next().unwrap().to_string();
                let (a, b) = (s(&a), s(&b));
                if a <= b { (a, b) } else { (b, a) }
            })
            .collect();
        let expected: BTreeSet<(String, String)> = [
            "ab", "cd", "ef", "eg", "fg", "ae", "be", "ce", "de", "cf", "cg", "df", "dg", "af",
            "ag", "bf", "bg",
        ]
        .iter()
        .map(|p| (p[..1].to_string(), p[1..].to_string()))
        .collect();
        assert_eq!(stripped, expected);
    }

    #[test]
    fn two_block_xjoin_needs_collapse() {
        assert!(matches!(
            generalized_xjoin(&two_block_xjoin(), false),
            Err(Error::LambdaNotEpimorphism { .. })
        ));
    }

    #[test]
    fn bad_inputs() {
        let mut inp = two_block_xjoin();
        inp.lambdas[0][0] = 1; // a ↦ 2, outside X
        assert!(matches!(generalized_xjoin(&inp, true), Err(Error::LambdaNotEpimorphism { .. })));
        let mut inp = two_block_xjoin();
        inp.blocks = PartitionOfPoints::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(matches!(generalized_xjoin(&inp, true), Err(Error::SigmaNotPartition(_))));
    }

    #[test]
    fn trivial_fibers_reproduce_base() {
        let g = Graph::cycle(5);
        let w = g_join(&g, vec![Graph::edgeless(1); 5]).unwrap();
        assert_eq!(w.edges(), g.edges());
    }

    #[test]
    fn lexicographic_products() {
        let g = Graph::path(4);
        assert!(graph_isomorphic(&lexicographic_product(&g, &Graph::edgeless(1)), &g, 64)
            .unwrap()
            .is_some());
        let k4 = lexicographic_product(&Graph::complete(2), &Graph::complete(2));
        assert!(graph_isomorphic(&k4, &Graph::complete(4), 64).unwrap().is_some());
        let c4 = lexicographic_product(&Graph::path(2), &Graph::edgeless(2));
        assert!(graph_isomorphic(&c4, &Graph::cycle(4), 64).unwrap().is_some());
    }

    #[test]
    fn equitable_partitions() {
        let p3 = Graph::path(3);
        assert!(is_equitable(&p3, &PartitionOfPoints::singletons(3)));
        assert!(is_equitable(&p3, &PartitionOfPoints::new(3, vec![vec![0, 2], vec![1]]).unwrap()));
        assert!(!is_equitable(&p3, &PartitionOfPoints::new(3, vec![vec![0, 1], vec![2]]).unwrap()));
    }
}
