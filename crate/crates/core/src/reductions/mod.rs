//! Fold engine: neighborhood-containment folds with verifiable traces,
//! the implicit exponential graph K_m^B used to check fold certificates
//! without materializing edge sets, and the constant-map witnesses behind
//! the fold lemmas.

pub mod leveled;

pub use leveled::{
    double_mycielskian_base, folddouble_witness, folded_exponential_double,
    folded_exponential_single, foldgeneral_witness, for_each_neighbor, generalfold_witness,
    verify_leveled_certificate, BlockTable, BlockTag, DoubleStage, DoubleVertex, FoldedDouble,
    FoldedSingle, LeveledMap,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexMap};

// ---------------------------------------------------------------------------
// Fold traces
// ---------------------------------------------------------------------------

/// One reduction step: a fold removes `removed` with a dominating witness,
/// a prune removes an isolated vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStep {
    Fold { removed: String, witness: String },
    Prune { removed: String },
}

/// Ordered reduction certificate; replayable against the starting graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FoldTrace {
    pub steps: Vec<TraceStep>,
}

/// Wire form of a trace step: {"op": "fold"|"prune", "removed": .., "witness": ..|null}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStepJson {
    pub op: String,
    pub removed: String,
    pub witness: Option<String>,
}

impl FoldTrace {
    pub fn to_json_steps(&self) -> Vec<TraceStepJson> {
        self.steps
            .iter()
            .map(|s| match s {
                TraceStep::Fold { removed, witness } => TraceStepJson {
                    op: "fold".to_string(),
                    removed: removed.clone(),
                    witness: Some(witness.clone()),
                },
                TraceStep::Prune { removed } => TraceStepJson {
                    op: "prune".to_string(),
                    removed: removed.clone(),
                    witness: None,
                },
            })
            .collect()
    }

    /// Replay the trace on `start`, checking each fold's neighborhood
    /// containment and each prune's isolation in the then-current graph.
    /// Returns the final graph.
    pub fn replay(&self, start: &Graph) -> Result<Graph> {
        let mut g = start.clone();
        for step in &self.steps {
            let (removed, witness) = match step {
                TraceStep::Fold { removed, witness } => (removed, Some(witness)),
                TraceStep::Prune { removed } => (removed, None),
            };
            let r = g
                .index_of(removed)
                .ok_or_else(|| Error::InternalCheck(format!("trace removes unknown {removed:?}")))?;
            match witness {
                Some(w) => {
                    let wi = g.index_of(w).ok_or_else(|| {
                        Error::InternalCheck(format!("trace witness unknown {w:?}"))
                    })?;
                    if wi == r || !g.neighborhood(r).is_subset(g.neighborhood(wi)) {
                        return Err(Error::InternalCheck(format!(
                            "fold of {removed:?} onto {w:?} is not neighborhood-contained"
                        )));
                    }
                }
                None => {
                    if !g.neighborhood(r).is_empty() {
                        return Err(Error::InternalCheck(format!(
                            "prune of {removed:?} removes a non-isolated vertex"
                        )));
                    }
                }
            }
            let keep: Vec<usize> = (0..g.vertex_count()).filter(|&v| v != r).collect();
            g = g.induced(&keep);
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Fold search
// ---------------------------------------------------------------------------

/// Lexicographically smallest pair (u, v) with N(u) contained in N(v) and
/// u != v, or None when the graph is fold-irreducible.
pub fn find_fold(g: &Graph) -> Option<(usize, usize)> {
    let n = g.vertex_count();
    for u in 0..n {
        for v in 0..n {
            if u != v && g.neighborhood(u).is_subset(g.neighborhood(v)) {
                return Some((u, v));
            }
        }
    }
    None
}

/// Repeatedly apply the smallest fold until none exists. Deterministic by
/// the tie-break rule: smallest removed index, then smallest witness index.
///
/// The scan resumes below the last fold only where a neighborhood actually
/// shrank: removing w can create a new fold (u, v) only when u was adjacent
/// to w, so smaller indices need no re-checking. This keeps the cascade of
/// isolated-vertex folds on large exponential graphs near-linear.
pub fn fold_core(g: &Graph) -> (Graph, FoldTrace) {
    let mut trace = FoldTrace::default();
    let n = g.vertex_count();
    let mut adj = g.clone();
    let mut live = vec![true; n];
    let mut start = 0usize;
    loop {
        let mut fold: Option<(usize, usize)> = None;
        'outer: for u in start..n {
            if !live[u] {
                continue;
            }
            for v in 0..n {
                if v != u && live[v] && adj.neighborhood(u).is_subset(adj.neighborhood(v)) {
                    fold = Some((u, v));
                    break 'outer;
                }
            }
        }
        let Some((u, v)) = fold else { break };
        trace.steps.push(TraceStep::Fold {
            removed: adj.label(u).to_string(),
            witness: adj.label(v).to_string(),
        });
        live[u] = false;
        start = u;
        for w in adj.neighborhood(u).ones() {
            adj.remove_edge(u, w);
            if w < start {
                start = w;
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| live[v]).collect();
    (g.induced(&keep), trace)
}

/// Remove isolated vertices as a separate pass, recorded as prune steps.
pub fn prune_isolated(g: &Graph) -> (Graph, FoldTrace) {
    let mut trace = FoldTrace::default();
    let keep: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| {
            if g.neighborhood(v).is_empty() {
                trace.steps.push(TraceStep::Prune {
                    removed: g.label(v).to_string(),
                });
                false
            } else {
                true
            }
        })
        .collect();
    (g.induced(&keep), trace)
}

// ---------------------------------------------------------------------------
// Implicit exponential graphs
// ---------------------------------------------------------------------------

/// K_m^B over raw maps encoded as base-m digit strings, with adjacency
/// decided against the edges of `base` only; the vertex set of size
/// m^|V(B)| is never materialized.
pub struct ImplicitExp<'a> {
    pub base: &'a Graph,
    pub m: usize,
}

impl<'a> ImplicitExp<'a> {
    pub fn new(base: &'a Graph, m: usize) -> Self {
        ImplicitExp { base, m }
    }

    pub fn vertex_count(&self) -> Option<u128> {
        (self.m as u128).checked_pow(self.base.vertex_count() as u32)
    }

    /// Forbidden color mask per base vertex: g ~ f iff g(v) avoids
    /// f(N_B(v)) for every v.
    pub fn forbidden_masks(&self, f: &[u8]) -> Vec<u32> {
        (0..self.base.vertex_count())
            .map(|v| {
                let mut mask = 0u32;
                for u in self.base.neighborhood(v).iter_ones() {
                    mask |= 1 << f[u];
                }
                mask
            })
            .collect()
    }

    pub fn adjacent(&self, f: &[u8], g: &[u8]) -> bool {
        let masks = self.forbidden_masks(f);
        g.iter()
            .zip(&masks)
            .all(|(&c, &mask)| mask >> c & 1 == 0)
    }

    /// A loop at f marks a homomorphism B -> K_m.
    pub fn is_proper(&self, f: &[u8]) -> bool {
        self.adjacent(f, f)
    }
}

/// How strongly a certificate was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strength {
    Exhaustive,
    Sampled { seed: u64, k: u64 },
    Skipped { reason: String },
}

impl core::fmt::Display for Strength {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Strength::Exhaustive => write!(f, "exhaustive"),
            Strength::Sampled { seed, k } => write!(f, "sampled({seed},{k})"),
            Strength::Skipped { reason } => write!(f, "skipped({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub holds: bool,
    pub strength: Strength,
    pub checked: u64,
    /// A neighbor of f that is not a neighbor of f_tilde, when found.
    pub counterexample: Option<Vec<u8>>,
}

/// Check N(f) contained in N(f_tilde) inside the implicit exponential
/// graph. Below the vertex budget every map is enumerated; above it a
/// seeded sample of maps is tested for the implication g ~ f => g ~ f_tilde.
pub fn verify_fold_certificate(
    imp: &ImplicitExp<'_>,
    f: &[u8],
    f_tilde: &[u8],
    limits: &Limits,
) -> CertificateReport {
    let n = imp.base.vertex_count();
    let m = imp.m;
    let masks_f = imp.forbidden_masks(f);
    let masks_t = imp.forbidden_masks(f_tilde);
    let within_budget = imp
        .vertex_count()
        .is_some_and(|c| c <= limits.vertex_budget as u128);

    if within_budget {
        // odometer over all maps with an incremental violation count
        let total = imp.vertex_count().unwrap() as u64;
        let mut g = vec![0u8; n];
        let mut violations =
            masks_f.iter().filter(|&&mask| mask & 1 == 1).count() as i64;
        let mut checked = 0u64;
        for step in 0..total {
            if violations == 0 {
                checked += 1;
                let adj_t = g
                    .iter()
                    .zip(&masks_t)
                    .all(|(&c, &mask)| mask >> c & 1 == 0);
                if !adj_t {
                    return CertificateReport {
                        holds: false,
                        strength: Strength::Exhaustive,
                        checked,
                        counterexample: Some(g),
                    };
                }
            }
            if step + 1 == total {
                break;
            }
            for (pos, digit) in g.iter_mut().enumerate() {
                let old = *digit;
                violations -= (masks_f[pos] >> old & 1) as i64;
                let new = if old as usize + 1 == m { 0 } else { old + 1 };
                *digit = new;
                violations += (masks_f[pos] >> new & 1) as i64;
                if new != 0 {
                    break;
                }
            }
        }
        CertificateReport {
            holds: true,
            strength: Strength::Exhaustive,
            checked,
            counterexample: None,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
        let k = limits.min_cert_samples;
        let mut checked = 0u64;
        for _ in 0..k {
            let g: Vec<u8> = (0..n).map(|_| rng.gen_range(0..m) as u8).collect();
            let adj_f = g
                .iter()
                .zip(&masks_f)
                .all(|(&c, &mask)| mask >> c & 1 == 0);
            if adj_f {
                checked += 1;
                let adj_t = g
                    .iter()
                    .zip(&masks_t)
                    .all(|(&c, &mask)| mask >> c & 1 == 0);
                if !adj_t {
                    return CertificateReport {
                        holds: false,
                        strength: Strength::Sampled { seed: limits.seed, k },
                        checked,
                        counterexample: Some(g),
                    };
                }
            }
        }
        CertificateReport {
            holds: true,
            strength: Strength::Sampled { seed: limits.seed, k },
            checked,
            counterexample: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Constant-map fold witnesses
// ---------------------------------------------------------------------------

/// Witness for folding a map that repeats a color on an edge: when
/// f(v) = f(w) = a on an edge (v, w) of a connected graph with the
/// edge-pair property, the constant map at a dominates f. Returns that
/// constant map.
pub fn fold2_witness(
    f: &VertexMap,
    t: &Graph,
    m: usize,
    edge: (usize, usize),
) -> Result<VertexMap> {
    check_fold2_preconditions(f, t, m, edge)?;
    let a = f.apply(edge.0);
    VertexMap::new(t.vertex_count(), m, vec![a; t.vertex_count()])
}

/// The intermediate maps of the same fold: the constant region grows by one
/// breadth-first ring around v per step (rings taken in vertex-index
/// order), ending at the constant map.
pub fn fold2_chain(
    f: &VertexMap,
    t: &Graph,
    m: usize,
    edge: (usize, usize),
) -> Result<Vec<VertexMap>> {
    check_fold2_preconditions(f, t, m, edge)?;
    let n = t.vertex_count();
    let a = f.apply(edge.0);
    let mut dist = vec![usize::MAX; n];
    dist[edge.0] = 0;
    let mut frontier = vec![edge.0];
    let mut d = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for w in t.neighborhood(v).iter_ones() {
                if dist[w] == usize::MAX {
                    dist[w] = d + 1;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
        d += 1;
    }
    let ecc = dist.iter().copied().max().unwrap_or(0);
    let mut chain = Vec::new();
    for k in 1..=ecc {
        let table: Vec<usize> = (0..n)
            .map(|x| {
                if dist[x] <= k || x == edge.1 {
                    a
                } else {
                    f.apply(x)
                }
            })
            .collect();
        chain.push(VertexMap::new(n, m, table)?);
    }
    if chain.is_empty() {
        chain.push(VertexMap::new(n, m, vec![a; n])?);
    }
    Ok(chain)
}

fn check_fold2_preconditions(f: &VertexMap, t: &Graph, m: usize, edge: (usize, usize)) -> Result<()> {
    if f.domain_size != t.vertex_count() || f.codomain_size != m {
        return Err(Error::Precondition("map does not match the graph and color count".into()));
    }
    if !t.is_connected() {
        return Err(Error::Precondition("base graph must be connected".into()));
    }
    if !crate::coloring::property_p(t)?.holds {
        return Err(Error::Precondition("base graph lacks the edge-pair property".into()));
    }
    if !t.has_edge(edge.0, edge.1) || edge.0 == edge.1 {
        return Err(Error::Precondition("fold witness needs a proper edge".into()));
    }
    if f.apply(edge.0) != f.apply(edge.1) {
        return Err(Error::Precondition("map must repeat its color on the given edge".into()));
    }
    Ok(())
}
