//! Exact chromatic number, clique bounds, homomorphism search, the
//! edge-pair property used by the fold lemmas, and brute-force
//! perfect-graph checks on small graphs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexMap};

/// How a coloring was checked for properness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    Exhaustive,
    Sampled { seed: u64, pairs: u64 },
}

/// Proper coloring with colors 0..k-1 (reported 1-based at the interfaces).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub graph_key: Option<Vec<u8>>,
    pub k: usize,
    pub colors: Vec<u8>,
    pub verified: Verification,
}

impl Coloring {
    /// Label/color pairs with 1-based colors, for the JSON interface.
    pub fn assignment_pairs(&self, labels: &[String]) -> Vec<(String, usize)> {
        labels
            .iter()
            .cloned()
            .zip(self.colors.iter().map(|&c| c as usize + 1))
            .collect()
    }
}

/// Independent properness validator: scans every edge.
pub fn validate_coloring(g: &Graph, colors: &[u8], k: usize) -> bool {
    if colors.len() != g.vertex_count() {
        return false;
    }
    if colors.iter().any(|&c| c as usize >= k) {
        return false;
    }
    g.edges().iter().all(|&(u, v)| u != v && colors[u] != colors[v])
}

/// Exact chromatic number, or the best-known bracket when the step budget
/// runs out first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChromaticOutcome {
    Exact { chi: usize, witness: Coloring },
    Bracket { lower: usize, upper: usize, witness: Option<Coloring> },
}

impl ChromaticOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            ChromaticOutcome::Exact { chi, .. } => Some(*chi),
            ChromaticOutcome::Bracket { .. } => None,
        }
    }
}

/// Branch-and-bound exact coloring: clique lower bound, greedy DSATUR upper
/// bound, then k-colorability decisions with unit propagation. Deterministic
/// given the limits; rejects graphs with loops.
pub fn chromatic_number(g: &Graph, limits: &Limits) -> Result<ChromaticOutcome> {
    if !g.is_simple() {
        return Err(Error::LoopedGraph);
    }
    let n = g.vertex_count();
    if n == 0 {
        return Ok(ChromaticOutcome::Exact {
            chi: 0,
            witness: coloring(0, Vec::new()),
        });
    }
    if g.edge_count() == 0 {
        return Ok(ChromaticOutcome::Exact {
            chi: 1,
            witness: coloring(1, vec![0; n]),
        });
    }
    if let Some(two) = is_bipartite(g) {
        return Ok(ChromaticOutcome::Exact {
            chi: 2,
            witness: coloring(2, two),
        });
    }

    let mut steps = 0u64;
    let greedy = dsatur_greedy(g);
    let upper = greedy.iter().map(|&c| c as usize + 1).max().unwrap_or(1);
    let mut lower = match max_clique_bounded(g, limits.solver_steps, &mut steps) {
        Ok((w, _)) => w,
        Err(Error::StepBudget { .. }) => 3, // non-bipartite with an edge
        Err(e) => return Err(e),
    };
    lower = lower.max(3); // bipartite was ruled out above

    let mut k = lower;
    while k < upper {
        match decide_k_colorable(g, k, limits.solver_steps, &mut steps) {
            Ok(Some(cols)) => {
                debug_assert!(validate_coloring(g, &cols, k));
                return Ok(ChromaticOutcome::Exact {
                    chi: k,
                    witness: coloring(k, cols),
                });
            }
            Ok(None) => {
                lower = k + 1;
                k += 1;
            }
            Err(Error::StepBudget { .. }) => {
                return Ok(ChromaticOutcome::Bracket {
                    lower,
                    upper,
                    witness: Some(coloring(upper, greedy)),
                });
            }
            Err(e) => return Err(e),
        }
    }
    debug_assert!(validate_coloring(g, &greedy, upper));
    Ok(ChromaticOutcome::Exact {
        chi: upper,
        witness: coloring(upper, greedy),
    })
}

fn coloring(k: usize, colors: Vec<u8>) -> Coloring {
    Coloring {
        graph_key: None,
        k,
        colors,
        verified: Verification::Exhaustive,
    }
}

/// Two-coloring by graph traversal; None when an odd cycle or a loop
/// exists.
pub fn is_bipartite(g: &Graph) -> Option<Vec<u8>> {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for w in g.neighborhood(v).iter_ones() {
                if w == v {
                    return None; // loop
                }
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

fn dsatur_greedy(g: &Graph) -> Vec<u8> {
    let n = g.vertex_count();
    let mut colors = vec![u8::MAX; n];
    for _ in 0..n {
        // pick the uncolored vertex with the most distinctly colored
        // neighbors, breaking ties by degree then index
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..n {
            if colors[v] != u8::MAX {
                continue;
            }
            let mut seen = 0u64;
            for w in g.neighborhood(v).iter_ones() {
                if colors[w] != u8::MAX {
                    seen |= 1 << colors[w];
                }
            }
            let sat = seen.count_ones() as usize;
            let key = (sat, g.degree(v), n - v);
            if best.is_none_or(|(s, d, i)| key > (s, d, i)) {
                best = Some(key);
            }
        }
        let (_, _, ni) = best.unwrap();
        let v = n - ni;
        let mut used = 0u64;
        for w in g.neighborhood(v).iter_ones() {
            if colors[w] != u8::MAX {
                used |= 1 << colors[w];
            }
        }
        let c = (0..64).find(|&c| used >> c & 1 == 0).unwrap();
        colors[v] = c as u8;
    }
    colors
}

/// Decision search for a proper k-coloring with domain propagation and
/// first-use color symmetry breaking.
fn decide_k_colorable(
    g: &Graph,
    k: usize,
    budget: u64,
    steps: &mut u64,
) -> Result<Option<Vec<u8>>> {
    if k > 60 {
        return Err(Error::Precondition(format!("coloring search capped at 60 colors, asked {k}")));
    }
    let n = g.vertex_count();
    let full: u64 = (1u64 << k) - 1;
    let domains = vec![full; n];
    let colors = vec![u8::MAX; n];
    search_k(g, k, budget, steps, domains, colors, 0)
}

fn search_k(
    g: &Graph,
    k: usize,
    budget: u64,
    steps: &mut u64,
    mut domains: Vec<u64>,
    mut colors: Vec<u8>,
    mut used_mask: u64,
) -> Result<Option<Vec<u8>>> {
    // unit propagation
    loop {
        let mut changed = false;
        for v in 0..g.vertex_count() {
            if colors[v] != u8::MAX {
                continue;
            }
            let d = domains[v];
            if d == 0 {
                return Ok(None);
            }
            if d.count_ones() == 1 {
                let c = d.trailing_zeros() as u8;
                colors[v] = c;
                used_mask |= 1 << c;
                for w in g.neighborhood(v).iter_ones() {
                    if colors[w] == u8::MAX {
                        domains[w] &= !(1 << c);
                        if domains[w] == 0 {
                            return Ok(None);
                        }
                    } else if colors[w] == c {
                        return Ok(None);
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // choose branching vertex: smallest domain, then highest degree
    let mut pick: Option<(usize, usize, usize)> = None;
    for v in 0..g.vertex_count() {
        if colors[v] == u8::MAX {
            let key = (domains[v].count_ones() as usize, usize::MAX - g.degree(v), v);
            if pick.is_none_or(|p| key < p) {
                pick = Some(key);
            }
        }
    }
    let Some((_, _, v)) = pick else {
        return Ok(Some(colors));
    };

    // colors already used plus the single lowest unused one
    let lowest_unused = !used_mask & ((1u64 << k) - 1);
    let allowed = domains[v] & (used_mask | (lowest_unused & lowest_unused.wrapping_neg()));
    let mut rest = allowed;
    while rest != 0 {
        let c = rest.trailing_zeros() as u8;
        rest &= rest - 1;
        *steps += 1;
        if *steps > budget {
            return Err(Error::StepBudget { steps: budget });
        }
        let mut d2 = domains.clone();
        let mut c2 = colors.clone();
        c2[v] = c;
        let mut ok = true;
        for w in g.neighborhood(v).iter_ones() {
            if c2[w] == u8::MAX {
                d2[w] &= !(1u64 << c);
                if d2[w] == 0 {
                    ok = false;
                    break;
                }
            } else if c2[w] == c {
                ok = false;
                break;
            }
        }
        if ok {
            if let Some(sol) = search_k(g, k, budget, steps, d2, c2, used_mask | (1 << c))? {
                return Ok(Some(sol));
            }
        }
    }
    Ok(None)
}

/// Exact maximum clique by branch-and-bound.
pub fn max_clique(g: &Graph, limits: &Limits) -> Result<(usize, Vec<usize>)> {
    if !g.is_simple() {
        return Err(Error::Precondition("clique number is defined for simple graphs".into()));
    }
    let mut steps = 0u64;
    max_clique_bounded(g, limits.solver_steps, &mut steps)
}

fn max_clique_bounded(g: &Graph, budget: u64, steps: &mut u64) -> Result<(usize, Vec<usize>)> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| usize::MAX - g.degree(v));
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut cand = BitRow::new(n);
    cand.fill();
    clique_search(g, &order, &mut current, cand, &mut best, budget, steps)?;
    Ok((best.len(), best))
}

fn clique_search(
    g: &Graph,
    order: &[usize],
    current: &mut Vec<usize>,
    cand: BitRow,
    best: &mut Vec<usize>,
    budget: u64,
    steps: &mut u64,
) -> Result<()> {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if current.len() + cand.count_ones() <= best.len() {
        return Ok(());
    }
    let mut cand = cand;
    for &v in order {
        if !cand.get(v) {
            continue;
        }
        *steps += 1;
        if *steps > budget {
            return Err(Error::StepBudget { steps: budget });
        }
        if current.len() + cand.count_ones() <= best.len() {
            return Ok(());
        }
        cand.clear(v);
        let mut next = cand.clone();
        next.intersect_with(g.neighborhood(v));
        current.push(v);
        clique_search(g, order, current, next, best, budget, steps)?;
        current.pop();
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Homomorphism search
// ---------------------------------------------------------------------------

/// Backtracking homomorphism search with forward checking; the returned map
/// is re-verified edge by edge.
pub fn hom_exists(g: &Graph, h: &Graph, limits: &Limits) -> Result<Option<VertexMap>> {
    let mut found = None;
    hom_search(g, h, limits.solver_steps, &mut |map| {
        found = Some(map.clone());
        true
    })?;
    if let Some(map) = &found {
        debug_assert!(map.is_homomorphism(g, h));
    }
    Ok(found)
}

/// Every homomorphism G -> H up to `cap`, sorted by image table.
pub fn enumerate_homs(g: &Graph, h: &Graph, cap: usize) -> Result<Vec<VertexMap>> {
    let mut out = Vec::new();
    let mut overflow = false;
    hom_search(g, h, u64::MAX, &mut |map| {
        if out.len() >= cap {
            overflow = true;
            return true;
        }
        out.push(map.clone());
        false
    })?;
    if overflow {
        return Err(Error::SizeExceeded {
            what: "homomorphism enumeration",
            required: cap as u128 + 1,
            budget: cap as u128,
        });
    }
    out.sort_by(|a, b| a.table.cmp(&b.table));
    Ok(out)
}

/// Shared search core: backtracking with domain propagation on every
/// assignment and most-constrained-vertex selection. `found` returns true
/// to stop the search.
fn hom_search(
    g: &Graph,
    h: &Graph,
    budget: u64,
    found: &mut dyn FnMut(&VertexMap) -> bool,
) -> Result<()> {
    let n = g.vertex_count();
    let m = h.vertex_count();
    if n == 0 {
        let map = VertexMap::new(0, m, Vec::new())?;
        found(&map);
        return Ok(());
    }
    if m == 0 {
        return Ok(());
    }
    // initial domains: loop vertices can only map to loop vertices
    let mut full = BitRow::new(m);
    full.fill();
    let mut loops = BitRow::new(m);
    for t in 0..m {
        if h.has_loop(t) {
            loops.set(t);
        }
    }
    let mut domains: Vec<BitRow> = (0..n)
        .map(|v| if g.has_loop(v) { loops.clone() } else { full.clone() })
        .collect();
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(());
    }
    let mut image = vec![usize::MAX; n];
    let mut steps = 0u64;
    hom_go(g, h, &mut image, &mut domains, budget, &mut steps, found)?;
    Ok(())
}

fn hom_go(
    g: &Graph,
    h: &Graph,
    image: &mut Vec<usize>,
    domains: &mut Vec<BitRow>,
    budget: u64,
    steps: &mut u64,
    found: &mut dyn FnMut(&VertexMap) -> bool,
) -> Result<bool> {
    // most constrained unassigned vertex, ties by index
    let pick = (0..g.vertex_count())
        .filter(|&v| image[v] == usize::MAX)
        .min_by_key(|&v| (domains[v].count_ones(), v));
    let Some(v) = pick else {
        let map = VertexMap::new(g.vertex_count(), h.vertex_count(), image.clone())?;
        return Ok(found(&map));
    };
    for t in domains[v].ones() {
        *steps += 1;
        if *steps > budget {
            return Err(Error::StepBudget { steps: budget });
        }
        if g.has_loop(v) && !h.has_edge(t, t) {
            continue;
        }
        // shrink the domains of unassigned neighbors to N_H(t), keeping an
        // undo trail; empty domains prune the branch
        image[v] = t;
        let mut trail: Vec<(usize, BitRow)> = Vec::new();
        let mut ok = true;
        for u in g.neighborhood(v).iter_ones() {
            if u == v {
                continue;
            }
            if image[u] != usize::MAX {
                if !h.has_edge(t, image[u]) {
                    ok = false;
                    break;
                }
                continue;
            }
            let mut shrunk = domains[u].clone();
            shrunk.intersect_with(h.neighborhood(t));
            if shrunk != domains[u] {
                trail.push((u, core::mem::replace(&mut domains[u], shrunk)));
            }
            if domains[u].is_empty() {
                ok = false;
                break;
            }
        }
        if ok && hom_go(g, h, image, domains, budget, steps, found)? {
            return Ok(true);
        }
        for (u, old) in trail.into_iter().rev() {
            domains[u] = old;
        }
        image[v] = usize::MAX;
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// The edge-pair property and perfect-graph brute checks
// ---------------------------------------------------------------------------

/// Result of the edge-pair property scan; the witness quadruple
/// (v1, w1, v2, w2) is reported on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyP {
    pub holds: bool,
    pub witness: Option<[usize; 4]>,
}

/// Exhaustive scan over ordered pairs of disjoint oriented edges: whenever
/// (v2, v1) is an edge, one of (w2, v1), (w2, w1) must be an edge.
pub fn property_p(g: &Graph) -> Result<PropertyP> {
    if !g.is_simple() {
        return Err(Error::Precondition("the edge-pair property is defined for simple graphs".into()));
    }
    let mut oriented = Vec::new();
    for (u, v) in g.edges() {
        oriented.push((u, v));
        oriented.push((v, u));
    }
    oriented.sort();
    for &(v1, w1) in &oriented {
        for &(v2, w2) in &oriented {
            if v1 == v2 || v1 == w2 || w1 == v2 || w1 == w2 {
                continue;
            }
            if g.has_edge(v2, v1) && !g.has_edge(w2, v1) && !g.has_edge(w2, w1) {
                return Ok(PropertyP {
                    holds: false,
                    witness: Some([v1, w1, v2, w2]),
                });
            }
        }
    }
    Ok(PropertyP {
        holds: true,
        witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoleKind {
    Hole,
    Antihole,
}

/// Exhaustive induced odd-cycle search (length >= 5) in G and its
/// complement. Returns the cycle in cyclic vertex order.
pub fn find_odd_hole_or_antihole(
    g: &Graph,
    vertex_cap: usize,
) -> Result<Option<(Vec<usize>, HoleKind)>> {
    let n = g.vertex_count();
    if n > vertex_cap {
        return Err(Error::SizeExceeded {
            what: "odd hole scan vertices",
            required: n as u128,
            budget: vertex_cap as u128,
        });
    }
    if let Some(cycle) = find_odd_induced_cycle(g) {
        return Ok(Some((cycle, HoleKind::Hole)));
    }
    if let Some(cycle) = find_odd_induced_cycle(&g.complement()) {
        return Ok(Some((cycle, HoleKind::Antihole)));
    }
    Ok(None)
}

fn find_odd_induced_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut size = 5;
    while size <= n {
        let mut subset: Vec<usize> = Vec::new();
        if let Some(cycle) = combos(g, &mut subset, 0, size) {
            return Some(cycle);
        }
        size += 2;
    }
    None
}

fn combos(g: &Graph, subset: &mut Vec<usize>, from: usize, size: usize) -> Option<Vec<usize>> {
    if subset.len() == size {
        return induced_cycle_order(g, subset);
    }
    for v in from..g.vertex_count() {
        subset.push(v);
        if let Some(c) = combos(g, subset, v + 1, size) {
            return Some(c);
        }
        subset.pop();
    }
    None
}

/// If the induced subgraph on `subset` is a single cycle, return it in
/// cyclic order.
fn induced_cycle_order(g: &Graph, subset: &[usize]) -> Option<Vec<usize>> {
    let s = subset.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); s];
    let mut edges = 0;
    for i in 0..s {
        for j in (i + 1)..s {
            if g.has_edge(subset[i], subset[j]) {
                adj[i].push(j);
                adj[j].push(i);
                edges += 1;
            }
        }
    }
    if edges != s || adj.iter().any(|a| a.len() != 2) {
        return None;
    }
    // walk around; must close after visiting all vertices
    let mut order = vec![0usize];
    let mut prev = usize::MAX;
    let mut cur = 0usize;
    for _ in 1..s {
        let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
        order.push(next);
        prev = cur;
        cur = next;
    }
    if adj[cur].contains(&0) && order.len() == s {
        Some(order.iter().map(|&i| subset[i]).collect())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Explicit colorings of the folded exponential graphs
// ---------------------------------------------------------------------------

use crate::reductions::leveled::{DoubleStage, DoubleVertex, FoldedDouble, FoldedSingle};

/// The level-l coloring of the folded stage: a vertex whose level-l block
/// is constant takes that color, every other vertex takes color 1. Proper
/// because non-constant-block vertices are isolated; properness is still
/// verified exhaustively against the constructed adjacency, and any
/// violation is a fatal internal error.
pub fn explicit_coloring_single(fs: &FoldedSingle, l: usize) -> Result<Coloring> {
    if !fs.loops.contains(&l) {
        return Err(Error::Precondition(format!(
            "coloring level {l} must carry a loop"
        )));
    }
    let m = fs.table.m;
    let count = fs.vertex_count();
    let phi_tag = |tag: u16| -> u8 {
        if fs.table.is_constant(tag) {
            tag as u8
        } else {
            0
        }
    };
    let mut colors = Vec::with_capacity(count);
    for idx in 0..count {
        let (blocks, _) = fs.decode(idx);
        colors.push(phi_tag(blocks[l]));
    }
    // exhaustive properness via the component product of each neighborhood
    for idx in 0..count {
        let (allowed, apex_mask) = fs.neighbor_components(idx);
        if apex_mask == 0 || allowed.iter().any(|a| a.is_empty()) {
            continue; // isolated
        }
        if let Some(&bad) = allowed[l].iter().find(|&&b| phi_tag(b) == colors[idx]) {
            return Err(Error::InternalCheck(format!(
                "level coloring conflict at {} against a neighbor with level-{l} block {}",
                fs.label(idx),
                fs.table.tag_label(bad)
            )));
        }
    }
    Ok(Coloring {
        graph_key: None,
        k: m,
        colors,
        verified: Verification::Exhaustive,
    })
}

/// Indices of the constant maps inside the folded single stage; they
/// induce a clique of size m.
pub fn single_constant_clique(fs: &FoldedSingle) -> Vec<usize> {
    let m = fs.table.m;
    let count = fs.vertex_count();
    (0..count)
        .filter(|&idx| {
            let (blocks, apex) = fs.decode(idx);
            blocks.iter().all(|&b| fs.table.is_constant(b))
                && blocks.iter().all(|&b| b as u8 == apex)
        })
        .take(m)
        .collect()
}

fn phi_double(fd: &FoldedDouble, v: &DoubleVertex) -> u8 {
    let t = &fd.table;
    if t.is_constant(v.blocks[0]) {
        v.blocks[0] as u8
    } else if t.is_constant(v.blocks[1]) {
        v.blocks[1] as u8
    } else {
        v.apex[0]
    }
}

/// The three-case coloring of the reduced double-Mycielskian stage:
/// the (0,0)-block color when constant, else the (1,0)-block color when
/// constant, else the color of the first apex. Properness is checked
/// exhaustively below the vertex budget and by seeded edge sampling above
/// it; any violated edge is a fatal internal error.
pub fn explicit_coloring_double(fd: &FoldedDouble, limits: &Limits) -> Result<Coloring> {
    if !matches!(fd.stage, DoubleStage::G2 | DoubleStage::Constants) {
        return Err(Error::Precondition(
            "the explicit coloring is proper only after the isolated families are removed".into(),
        ));
    }
    let count = fd.vertex_count();
    let mut colors = Vec::with_capacity(count);
    for idx in 0..count {
        colors.push(phi_double(fd, &fd.decode(idx)));
    }
    let verified = if count <= limits.vertex_budget {
        for idx in 0..count {
            let v = fd.decode(idx);
            let (comp, masks) = fd.neighbor_components(&v);
            if comp[2].is_empty() || comp[3].is_empty() || masks[1] == 0 || masks[2] == 0 {
                continue;
            }
            // neighbor colors depend only on the (b00, b10, w0) triple
            let mine = colors[idx];
            for &g00 in &comp[0] {
                for &g10 in &comp[1] {
                    for gw0 in 0..fd.m as u8 {
                        if masks[0] >> gw0 & 1 == 0 || !fd.admits_triple(g00, g10, gw0) {
                            continue;
                        }
                        let probe = DoubleVertex {
                            blocks: [g00, g10, comp[2][0], comp[3][0]],
                            apex: [gw0, first_color(masks[1]), first_color(masks[2])],
                        };
                        if phi_double(fd, &probe) == mine {
                            return Err(Error::InternalCheck(format!(
                                "double coloring conflict: {} and {} share color {}",
                                fd.label(idx),
                                fd.encode(&probe).map(|j| fd.label(j)).unwrap_or_default(),
                                mine + 1
                            )));
                        }
                    }
                }
            }
        }
        Verification::Exhaustive
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(limits.seed);
        let mut pairs = 0u64;
        let mut attempts = 0u64;
        let attempt_cap = limits.min_edge_samples.saturating_mul(50);
        while pairs < limits.min_edge_samples {
            attempts += 1;
            if attempts > attempt_cap {
                return Err(Error::Precondition(
                    "sampling could not find enough adjacent pairs".into(),
                ));
            }
            let idx = rng.gen_range(0..count);
            let v = fd.decode(idx);
            let (comp, masks) = fd.neighbor_components(&v);
            if comp[2].is_empty() || comp[3].is_empty() || masks[1] == 0 || masks[2] == 0 {
                continue;
            }
            let triples = fd.valid_triples_within(&comp[0], &comp[1], masks[0]);
            if triples.is_empty() {
                continue;
            }
            let (g00, g10, gw0) = triples[rng.gen_range(0..triples.len())];
            let g = DoubleVertex {
                blocks: [
                    g00,
                    g10,
                    comp[2][rng.gen_range(0..comp[2].len())],
                    comp[3][rng.gen_range(0..comp[3].len())],
                ],
                apex: [gw0, sample_color(masks[1], &mut rng), sample_color(masks[2], &mut rng)],
            };
            debug_assert!(fd.adjacent_vertices(&v, &g));
            if phi_double(fd, &g) == phi_double(fd, &v) {
                return Err(Error::InternalCheck(format!(
                    "double coloring conflict: {} and sampled neighbor share a color",
                    fd.label(idx)
                )));
            }
            pairs += 1;
        }
        Verification::Sampled {
            seed: limits.seed,
            pairs,
        }
    };
    Ok(Coloring {
        graph_key: None,
        k: fd.m,
        colors,
        verified,
    })
}

fn first_color(mask: u32) -> u8 {
    mask.trailing_zeros() as u8
}

fn sample_color<R: rand::Rng>(mask: u32, rng: &mut R) -> u8 {
    let k = mask.count_ones();
    let mut pick = rng.gen_range(0..k);
    for c in 0..32 {
        if mask >> c & 1 == 1 {
            if pick == 0 {
                return c as u8;
            }
            pick -= 1;
        }
    }
    unreachable!("mask is nonempty")
}

/// Indices of the constant maps inside the folded double stage; they
/// induce a clique of size m.
pub fn double_constant_clique(fd: &FoldedDouble) -> Vec<usize> {
    (0..fd.m as u16)
        .filter_map(|c| {
            let v = DoubleVertex {
                blocks: [c, c, c, c],
                apex: [c as u8; 3],
            };
            fd.encode(&v)
        })
        .collect()
}
