//! From Cayley data to a verified Cayley certificate for the X-join.
//!
//! Given `G = Cay(A, S_A)`, the block system of right cosets of `H ≤ A`,
//! fibers `Cay(C, S_C)` and an epimorphism `θ: C → H`, the generalized
//! wreath product `A ∘_λ {C}` acts on the X-join `W`. When `J·Ā` can be made
//! regular, `W ≅ Cay(J·Ā, S_R)`; every step of that claim is checked here.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graphs::{cayley_graph, is_isomorphism, Graph};
use crate::groups::{find_transversal, FiniteGroup, Transversal, TransversalMode};
use crate::gwp::{
    build_scaffold, lift_search, RegularSubgroup, Scaffold, ScaffoldMode, ScaffoldReport,
};
use crate::perms::{orbits_of, PartitionOfPoints, Perm};
use crate::xjoin::{generalized_xjoin, XJoinInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    /// Smallest-index choices only.
    Canonical,
    /// The theorem's choices; hypothesis failure is an error.
    Theorem,
    /// Theorem and canonical choices first, then the lift search.
    #[default]
    Search,
}

#[derive(Debug, Clone)]
pub struct CayleyScenario {
    pub base: FiniteGroup,
    pub base_connection: Vec<usize>,
    pub block_generators: Vec<usize>,
    pub fiber: FiniteGroup,
    pub fiber_connection: Vec<usize>,
    /// Generator images `(c, a)` of `θ: C → H`.
    pub theta: Vec<(usize, usize)>,
    pub mode: SynthMode,
    /// Explicit representatives and transversal, overriding `mode`'s
    /// starting point.
    pub explicit: Option<(Vec<usize>, Transversal)>,
    pub collapse_allowed: bool,
    pub caps: Caps,
}

impl CayleyScenario {
    /// Scenario with default caps, search mode and collapsing allowed.
    pub fn new(
        base: FiniteGroup,
        base_connection: Vec<usize>,
        block_generators: Vec<usize>,
        fiber: FiniteGroup,
        fiber_connection: Vec<usize>,
        theta: Vec<(usize, usize)>,
    ) -> CayleyScenario {
        CayleyScenario {
            base,
            base_connection,
            block_generators,
            fiber,
            fiber_connection,
            theta,
            mode: SynthMode::Search,
            explicit: None,
            collapse_allowed: true,
            caps: Caps::default(),
        }
    }

    /// The G-join case: `H = {e}` and every fiber is `Cay(C, S_C)`.
    pub fn g_join(
        base: FiniteGroup,
        base_connection: Vec<usize>,
        fiber: FiniteGroup,
        fiber_connection: Vec<usize>,
    ) -> CayleyScenario {
        let e = base.identity();
        let theta = fiber.generators().iter().map(|&c| (c, e)).collect();
        Self::new(base, base_connection, Vec::new(), fiber, fiber_connection, theta)
    }

    pub fn with_mode(mut self, mode: SynthMode) -> CayleyScenario {
        self.mode = mode;
        self
    }

    fn scaffold(&self, mode: ScaffoldMode) -> Result<Scaffold> {
        build_scaffold(
            self.base.clone(),
            &self.block_generators,
            self.fiber.clone(),
            &self.theta,
            mode,
        )
    }

    /// The scaffold the pipeline starts from.
    pub fn initial_scaffold(&self) -> Result<Scaffold> {
        match (&self.explicit, self.mode) {
            (Some((reps, t)), _) => self.scaffold(ScaffoldMode::Explicit {
                reps: reps.clone(),
                transversal: t.clone(),
            }),
            (None, SynthMode::Theorem) => self.scaffold(ScaffoldMode::Theorem),
            (None, _) => self.scaffold(ScaffoldMode::Canonical),
        }
    }

    pub fn base_graph(&self) -> Result<Graph> {
        cayley_graph(&self.base, &self.base_connection)
    }

    pub fn fiber_graph(&self) -> Result<Graph> {
        cayley_graph(&self.fiber, &self.fiber_connection)
    }
}

/// The X-join input determined by a scenario and the lift choices of `s`:
/// blocks `H·a_X`, fibers `Cay(C, S_C)` and `λ(y·ā_X) = θ(y)·a_X`.
pub fn xjoin_input(sc: &CayleyScenario, s: &Scaffold) -> Result<XJoinInput> {
    let base = sc.base_graph()?;
    let fiber = sc.fiber_graph()?;
    let (a, h) = (s.base(), s.stabilizer());
    let blocks: Vec<Vec<usize>> = s
        .reps()
        .iter()
        .map(|&r| {
            let mut b: Vec<usize> = h.members().iter().map(|&x| a.mul(x, r)).collect();
            b.sort_unstable();
            b
        })
        .collect();
    let n = s.fiber().order();
    Ok(XJoinInput {
        blocks: PartitionOfPoints::new(a.order(), blocks)?,
        block_labels: (0..s.block_count()).map(|b| s.block_label(b).to_string()).collect(),
        fibers: vec![fiber; s.block_count()],
        lambdas: (0..s.block_count())
            .map(|b| (0..n).map(|y| s.lambda(s.point(b, y))).collect())
            .collect(),
        base,
    })
}

fn w_for(sc: &CayleyScenario, s: &Scaffold) -> Result<Graph> {
    generalized_xjoin(&xjoin_input(sc, s)?, sc.collapse_allowed)
}

/// `W` together with the scaffold whose points are its vertices.
pub fn build_w(sc: &CayleyScenario) -> Result<(Graph, Scaffold)> {
    let s = sc.initial_scaffold()?;
    Ok((w_for(sc, &s)?, s))
}

/// A generator of `⟨K, Ā⟩` that fails to preserve an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutViolation {
    pub generator: String,
    pub edge: (String, String),
}

fn check_generators<'a>(
    w: &Graph,
    gens: impl IntoIterator<Item = (String, &'a Perm)>,
) -> Option<AutViolation> {
    gens.into_iter().find_map(|(name, p)| {
        w.first_broken_edge(p).map(|(u, v)| AutViolation {
            generator: name,
            edge: (w.label(u).to_string(), w.label(v).to_string()),
        })
    })
}

/// Every generator of `K` and every lift preserves `E(W)`; the first failure
/// otherwise.
pub fn aut_containment_violation(w: &Graph, s: &Scaffold) -> Option<AutViolation> {
    let kgens: Vec<(String, Perm)> = (0..s.block_count())
        .flat_map(|b| s.kernel_generators().iter().map(move |&k| (b, k)))
        .map(|(b, k)| {
            let name = format!("k[{}]({})", s.block_label(b), s.fiber().name(k));
            (name, s.kernel_on_block(b, k))
        })
        .collect();
    check_generators(w, kgens.iter().map(|(n, p)| (n.clone(), p))).or_else(|| {
        check_generators(
            w,
            s.base()
                .elements()
                .map(|f| (format!("bar({})", s.base().name(f)), s.lift(f))),
        )
    })
}

pub fn verify_aut_containment(w: &Graph, s: &Scaffold) -> bool {
    aut_containment_violation(w, s).is_none()
}

/// `⟨J, Ā⟩` is transitive on `V(W)` and consists of automorphisms.
pub fn certify_vertex_transitive(w: &Graph, s: &Scaffold) -> bool {
    if w.vertex_count() <= 1 {
        return true;
    }
    let mut gens = s.diagonal_generators();
    gens.extend(s.lifts().iter().cloned());
    gens.iter().all(|g| w.is_automorphism(g)) && orbits_of(w.vertex_count(), &gens).len() == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    /// (1) `A = H·C_A(H)`.
    pub product_with_centralizer: bool,
    /// (2) `C = K·C_C(K)`.
    pub kernel_centralizer_product: bool,
    /// (3) `A = H × A₁` for some subgroup `A₁`.
    pub direct_complement: bool,
    /// (4) `C = K ⋊ T` for a subgroup transversal `T`.
    pub semidirect_fiber: bool,
    /// (5) `C = K × T` for a subgroup transversal `T` centralizing `K`.
    pub direct_fiber: bool,
    /// (1), (2) and (3) or (5).
    pub satisfied_direct: bool,
    /// (1), (2) and (3) or (4).
    pub satisfied_semidirect: bool,
}

impl HypothesisReport {
    pub fn flags(&self) -> [bool; 5] {
        [
            self.product_with_centralizer,
            self.kernel_centralizer_product,
            self.direct_complement,
            self.semidirect_fiber,
            self.direct_fiber,
        ]
    }
}

pub fn hypotheses_of(s: &Scaffold) -> HypothesisReport {
    let (a, h, c, theta) = (s.base(), s.stabilizer(), s.fiber(), s.theta());
    let k = s.kernel();
    let p1 = a.is_product_of(h, &a.centralizer(h));
    let p2 = c.is_product_of(k, &c.centralizer(k));
    debug_assert_eq!(
        p2,
        find_transversal(c, a, theta, TransversalMode::Centralizing).is_some()
    );
    let p3 = a.direct_complement(h).is_some();
    let p4 = find_transversal(c, a, theta, TransversalMode::Subgroup).is_some();
    let p5 = find_transversal(c, a, theta, TransversalMode::CentralizingSubgroup).is_some();
    HypothesisReport {
        product_with_centralizer: p1,
        kernel_centralizer_product: p2,
        direct_complement: p3,
        semidirect_fiber: p4,
        direct_fiber: p5,
        satisfied_direct: p1 && p2 && (p3 || p5),
        satisfied_semidirect: p1 && p2 && (p3 || p4),
    }
}

pub fn validate_hypotheses(sc: &CayleyScenario) -> Result<HypothesisReport> {
    Ok(hypotheses_of(&sc.scaffold(ScaffoldMode::Canonical)?))
}

#[derive(Debug, Clone)]
pub struct CayleyCertificate {
    pub w: Graph,
    pub scaffold: Scaffold,
    pub r: RegularSubgroup,
    /// `S_R` as element indices of `r`, ascending.
    pub connection: Vec<usize>,
    pub cayley: Graph,
    /// `witness[v]` is the vertex of `cayley` matched with vertex `v` of `W`.
    pub witness: Vec<usize>,
    pub hypotheses: HypothesisReport,
    pub evaluated: usize,
    pub vertex_transitive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub mode: SynthMode,
    pub base_order: usize,
    pub fiber_order: usize,
    pub vertices: usize,
    pub edges: usize,
    pub degree: Option<usize>,
    pub r_order: usize,
    pub hypotheses: HypothesisReport,
    pub scaffold: ScaffoldReport,
    pub connection_size: usize,
    pub connection_set: Vec<String>,
    /// Vertex of `W` to element of `R`.
    pub witness: BTreeMap<String, String>,
    pub candidates_evaluated: usize,
    pub aut_containment: bool,
    pub vertex_transitive: bool,
    /// Wall time; not part of the determinism contract.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl CayleyCertificate {
    pub fn connection_names(&self) -> Vec<String> {
        self.connection.iter().map(|&i| self.r.name(i).to_string()).collect()
    }

    pub fn report(&self, mode: SynthMode) -> CertificateReport {
        CertificateReport {
            mode,
            base_order: self.scaffold.base().order(),
            fiber_order: self.scaffold.fiber().order(),
            vertices: self.w.vertex_count(),
            edges: self.w.edge_count(),
            degree: self.w.regular_degree(),
            r_order: self.r.order(),
            hypotheses: self.hypotheses,
            scaffold: self.scaffold.report(),
            connection_size: self.connection.len(),
            connection_set: self.connection_names(),
            witness: self
                .witness
                .iter()
                .enumerate()
                .map(|(v, &c)| (self.w.label(v).to_string(), self.cayley.label(c).to_string()))
                .collect(),
            candidates_evaluated: self.evaluated,
            aut_containment: true,
            vertex_transitive: self.vertex_transitive,
            timing_ms: None,
        }
    }
}

/// Runs the whole pipeline and returns a certificate only if every check
/// passes.
pub fn synthesize_cayley(sc: &CayleyScenario, exec: Exec) -> Result<CayleyCertificate> {
    let start = sc.initial_scaffold()?;
    let hypotheses = hypotheses_of(&start);
    // W for the starting choices validates the fiber maps up front
    w_for(sc, &start)?;
    let (s, r, evaluated) = match sc.mode {
        SynthMode::Search => {
            let out = lift_search(&start, sc.caps.search_budget, exec);
            match out.found {
                Some((s, r)) => (s, r, out.evaluated),
                None => return Err(Error::SynthesisFailed { evaluated: out.evaluated }),
            }
        }
        SynthMode::Theorem => {
            let r = start.regular_candidate(exec).map_err(|e| {
                Error::VerificationFailed(format!("theorem choices give no regular group: {e}"))
            })?;
            (start, r, 1)
        }
        SynthMode::Canonical => match start.regular_candidate(exec) {
            Ok(r) => (start, r, 1),
            Err(Error::NotClosed | Error::NotRegular) => {
                return Err(Error::SynthesisFailed { evaluated: 1 })
            }
            Err(e) => return Err(e),
        },
    };
    certify(sc, s, r, hypotheses, evaluated)
}

fn certify(
    sc: &CayleyScenario,
    s: Scaffold,
    r: RegularSubgroup,
    hypotheses: HypothesisReport,
    evaluated: usize,
) -> Result<CayleyCertificate> {
    let fail = |msg: String| Err(Error::VerificationFailed(msg));
    let w = w_for(sc, &s)?;
    if let Some(v) = aut_containment_violation(&w, &s) {
        return fail(format!(
            "{} breaks edge {}-{}",
            v.generator, v.edge.0, v.edge.1
        ));
    }
    if let Some(bad) = r.elements().iter().find(|p| !w.is_automorphism(p)) {
        return fail(format!("element {:?} of R is not an automorphism", bad.images()));
    }

    // S_R from the neighbourhood of e = point 0 (element i of R sends e to i)
    let connection: Vec<usize> = w.neighbors(0).to_vec();
    let mut sorted = connection.clone();
    sorted.sort_unstable();

    // closed form: [S_C]* on the first block, [λ⁻¹(S_A ∩ H·a_X)]* elsewhere
    let s_a: BTreeSet<usize> = sc.base_connection.iter().copied().collect();
    let n = s.fiber().order();
    let mut closed: Vec<usize> = sc
        .fiber_connection
        .iter()
        .map(|&c| s.point(0, c))
        .collect();
    for b in 1..s.block_count() {
        closed.extend((0..n).map(|y| s.point(b, y)).filter(|&p| s_a.contains(&s.lambda(p))));
    }
    closed.sort_unstable();
    closed.dedup();
    if closed != sorted {
        return fail("connection set differs from the closed-form union".into());
    }
    if w.regular_degree() != Some(sorted.len()) {
        return fail(format!("W is not {}-regular", sorted.len()));
    }
    let g = r.group();
    if sorted.contains(&g.identity()) || sorted.iter().any(|&x| sorted.binary_search(&g.inv(x)).is_err())
    {
        return fail("connection set is not symmetric and identity-free".into());
    }

    let cayley = cayley_graph(g, &sorted)?;
    let witness: Vec<usize> = (0..w.vertex_count()).collect();
    if !is_isomorphism(&w, &cayley, &witness) {
        return fail("labelling r -> e.r is not an isomorphism onto Cay(R, S_R)".into());
    }
    let vertex_transitive = certify_vertex_transitive(&w, &s);
    if !vertex_transitive {
        return fail("<J, F> is not transitive on V(W)".into());
    }
    Ok(CayleyCertificate {
        w,
        scaffold: s,
        r,
        connection: sorted,
        cayley,
        witness,
        hypotheses,
        evaluated,
        vertex_transitive,
    })
}
