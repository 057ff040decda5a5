/// Size and sampling budgets threaded through the pipelines.
///
/// All limits are deterministic (vertex counts, face counts, search steps),
/// so a run is reproducible given the same `Limits` and seed. The CLI maps
/// its wall-clock solver budget onto `solver_steps` at a fixed rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest exponential graph (or implicit map space) handled by full
    /// enumeration; beyond this, certificate checks fall back to sampling.
    pub vertex_budget: usize,
    /// Cap on the total number of simplicial faces enumerated per complex.
    pub face_budget: usize,
    /// Deterministic step budget for the chromatic / clique / homomorphism
    /// searches.
    pub solver_steps: u64,
    /// Cap for the exact isomorphism search.
    pub iso_vertex_cap: usize,
    /// Cap for the odd-hole / antihole scan.
    pub hole_vertex_cap: usize,
    /// Brute-force canonical forms are computed up to this many vertices;
    /// larger graphs fall back to exact labeled serialization.
    pub canonical_brute_cap: usize,
    /// Largest graph materialized with dense adjacency rows.
    pub dense_vertex_cap: usize,
    /// Seed for every sampling fallback; recorded in reports.
    pub seed: u64,
    /// Minimum number of sampled maps per fold certificate above budget.
    pub min_cert_samples: u64,
    /// Minimum number of sampled adjacent pairs for coloring verification
    /// above budget.
    pub min_edge_samples: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            vertex_budget: 300_000,
            face_budget: 2_000_000,
            solver_steps: 200_000_000,
            iso_vertex_cap: 16,
            hole_vertex_cap: 10,
            canonical_brute_cap: 10,
            dense_vertex_cap: 65_536,
            seed: 0,
            min_cert_samples: 10_000,
            min_edge_samples: 1_000_000,
        }
    }
}
