//! Finite undirected graphs with optional loops, the named constructions
//! (complete graphs, cycles, paths with loops, categorical products,
//! top-level quotients, generalized Mycielskians, exponential graphs),
//! neighborhoods, and exact isomorphism for small graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};

/// Undirected graph with labeled vertices. Adjacency is kept as bit rows
/// with loops on the diagonal; every mutation preserves symmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<BitRow>,
}

impl Graph {
    /// Empty graph on the given labels. Labels must be pairwise distinct.
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        Ok(Graph {
            labels,
            adj: vec![BitRow::new(n); n],
        })
    }

    /// Empty graph with labels "1".."n".
    pub fn with_numeric_labels(n: usize) -> Self {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        Graph::new(labels).expect("numeric labels are distinct")
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v);
        self.adj[v].set(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].clear(v);
        self.adj[v].clear(u);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.adj[v].get(v)
    }

    /// A graph is simple iff no vertex carries a loop.
    pub fn is_simple(&self) -> bool {
        (0..self.vertex_count()).all(|v| !self.has_loop(v))
    }

    /// Neighborhood as a bit row; `v` is its own neighbor iff it has a loop.
    pub fn neighborhood(&self, v: usize) -> &BitRow {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj[v].ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones()
    }

    /// Common neighborhood of a vertex set; the empty set yields all of V.
    pub fn common_neighborhood(&self, set: &[usize]) -> Vec<usize> {
        let mut acc = BitRow::new(self.vertex_count());
        acc.fill();
        for &v in set {
            acc.intersect_with(&self.adj[v]);
        }
        acc.ones()
    }

    /// Undirected edges, each once as (u, v) with u <= v; loops appear as (v, v).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertex_count() {
            for v in self.adj[u].iter_ones() {
                if v >= u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Number of non-loop edges.
    pub fn edge_count(&self) -> usize {
        self.edges().iter().filter(|(u, v)| u != v).count()
    }

    pub fn loop_count(&self) -> usize {
        (0..self.vertex_count()).filter(|&v| self.has_loop(v)).count()
    }

    pub fn complement(&self) -> Graph {
        let n = self.vertex_count();
        let mut g = Graph::new(self.labels.clone()).expect("labels already unique");
        for u in 0..n {
            for v in (u + 1)..n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Induced subgraph on `keep`, preserving the given order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let mut g = Graph::new(labels).expect("subset of unique labels");
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                if j >= i && self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = BitRow::new(n);
        let mut stack = vec![0usize];
        seen.set(0);
        while let Some(v) = stack.pop() {
            for w in self.adj[v].iter_ones() {
                if !seen.get(w) {
                    seen.set(w);
                    stack.push(w);
                }
            }
        }
        seen.count_ones() == n
    }
}

/// Set map between vertex sets: the vertices of exponential graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMap {
    pub domain_size: usize,
    pub codomain_size: usize,
    pub table: Vec<usize>,
}

impl VertexMap {
    pub fn new(domain_size: usize, codomain_size: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != domain_size {
            return Err(Error::Precondition(format!(
                "map table has {} entries for domain of size {domain_size}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= codomain_size) {
            return Err(Error::Precondition(format!(
                "map value {bad} outside codomain of size {codomain_size}"
            )));
        }
        Ok(VertexMap {
            domain_size,
            codomain_size,
            table,
        })
    }

    pub fn apply(&self, v: usize) -> usize {
        self.table[v]
    }

    /// Edge-preserving check, loops included.
    pub fn is_homomorphism(&self, g: &Graph, h: &Graph) -> bool {
        if self.domain_size != g.vertex_count() || self.codomain_size != h.vertex_count() {
            return false;
        }
        g.edges()
            .iter()
            .all(|&(u, v)| h.has_edge(self.table[u], self.table[v]))
    }

    /// Bijective homomorphism whose inverse is also a homomorphism.
    pub fn is_isomorphism_between(&self, g: &Graph, h: &Graph) -> bool {
        if g.vertex_count() != h.vertex_count() || !self.is_homomorphism(g, h) {
            return false;
        }
        let mut seen = vec![false; h.vertex_count()];
        for &x in &self.table {
            if seen[x] {
                return false;
            }
            seen[x] = true;
        }
        // Bijective, so the inverse preserves edges iff edge counts match
        // in both directions; check directly.
        for u in 0..g.vertex_count() {
            for v in u..g.vertex_count() {
                if g.has_edge(u, v) != h.has_edge(self.table[u], self.table[v]) {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Named constructions
// ---------------------------------------------------------------------------

/// Complete graph K_n on labels "1".."n".
pub fn complete_graph(n: usize) -> Graph {
    assert!(n >= 1, "complete graph needs at least one vertex");
    let mut g = Graph::with_numeric_labels(n);
    for u in 0..n {
        for v in (u + 1)..n {
            g.add_edge(u, v);
        }
    }
    g
}

/// Cycle C_r on labels "1".."r", r >= 3.
pub fn cycle_graph(r: usize) -> Result<Graph> {
    if r < 3 {
        return Err(Error::Precondition(format!("cycle needs r >= 3, got {r}")));
    }
    let mut g = Graph::with_numeric_labels(r);
    for i in 0..r {
        g.add_edge(i, (i + 1) % r);
    }
    Ok(g)
}

/// Path of length r with a loop set: vertices 0..=r, edges (i, i+1),
/// and a loop at every member of the loop set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSpec {
    pub length: usize,
    pub loops: BTreeSet<usize>,
}

impl PathSpec {
    pub fn new(length: usize, loops: BTreeSet<usize>) -> Result<Self> {
        if length == 0 {
            return Err(Error::Precondition("path length must be positive".into()));
        }
        if let Some(&bad) = loops.iter().find(|&&x| x > length) {
            return Err(Error::Precondition(format!(
                "loop position {bad} exceeds path length {length}"
            )));
        }
        Ok(PathSpec { length, loops })
    }
}

/// L_r(A): vertices labeled "0".."r".
pub fn path_with_loops(spec: &PathSpec) -> Graph {
    let r = spec.length;
    let labels = (0..=r).map(|i| i.to_string()).collect();
    let mut g = Graph::new(labels).expect("distinct numeric labels");
    for i in 0..r {
        g.add_edge(i, i + 1);
    }
    for &a in &spec.loops {
        g.add_edge(a, a);
    }
    g
}

/// Categorical product: (g, h) ~ (g', h') iff g ~ g' and h ~ h'.
/// Vertex (g, h) sits at index g * |V(H)| + h with label "(gl,hl)".
pub fn categorical_product(g: &Graph, h: &Graph) -> Graph {
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    let labels = (0..ng)
        .flat_map(|a| (0..nh).map(move |b| (a, b)))
        .map(|(a, b)| format!("({},{})", g.label(a), h.label(b)))
        .collect();
    let mut p = Graph::new(labels).expect("product labels distinct");
    for a in 0..ng {
        for a2 in g.adj[a].iter_ones() {
            for b in 0..nh {
                for b2 in h.adj[b].iter_ones() {
                    let x = a * nh + b;
                    let y = a2 * nh + b2;
                    if y >= x {
                        p.add_edge(x, y);
                    }
                }
            }
        }
    }
    p
}

/// Merge every vertex at level `r` into a single apex "*"; an edge (x, *)
/// exists iff x was adjacent to some level-r vertex, and * carries a loop
/// iff two identified vertices were adjacent.
pub fn quotient_top_level(p: &Graph, level_of: &[usize], r: usize) -> Result<Graph> {
    if level_of.len() != p.vertex_count() {
        return Err(Error::Precondition(
            "level assignment does not cover the vertex set".into(),
        ));
    }
    let top: Vec<usize> = (0..p.vertex_count()).filter(|&v| level_of[v] == r).collect();
    if top.is_empty() {
        return Err(Error::Precondition(format!("no vertex has level {r}")));
    }
    let keep: Vec<usize> = (0..p.vertex_count()).filter(|&v| level_of[v] != r).collect();
    let mut labels: Vec<String> = keep.iter().map(|&v| p.label(v).to_string()).collect();
    let mut apex_label = String::from("*");
    while labels.contains(&apex_label) {
        apex_label.push('*');
    }
    labels.push(apex_label);
    let apex = keep.len();
    let mut q = Graph::new(labels)?;
    for (i, &u) in keep.iter().enumerate() {
        for (j, &v) in keep.iter().enumerate() {
            if j >= i && p.has_edge(u, v) {
                q.add_edge(i, j);
            }
        }
        if top.iter().any(|&t| p.has_edge(u, t)) {
            q.add_edge(i, apex);
        }
    }
    if top
        .iter()
        .any(|&t| top.iter().any(|&t2| p.has_edge(t, t2)))
    {
        q.add_edge(apex, apex);
    }
    Ok(q)
}

/// The quotient power (G x L_r(A)) / ~_r. The constructions here require
/// the loop set to avoid the top level r.
pub fn path_quotient(g: &Graph, spec: &PathSpec) -> Result<Graph> {
    if spec.loops.contains(&spec.length) {
        return Err(Error::Precondition(
            "loop set must be contained in {0..r-1}".into(),
        ));
    }
    let path = path_with_loops(spec);
    let p = categorical_product(g, &path);
    let nh = path.vertex_count();
    let level_of: Vec<usize> = (0..p.vertex_count()).map(|v| v % nh).collect();
    let q = quotient_top_level(&p, &level_of, spec.length)?;
    // Level-r vertices are mutually non-adjacent when r is loop-free, so
    // the merge cannot create a loop at the apex.
    debug_assert!(!q.has_loop(q.vertex_count() - 1));
    Ok(q)
}

/// r-th generalized Mycielskian M_r(G) = (G x L_r({0})) / ~_r; M_2 is the
/// classical Mycielskian.
pub fn generalized_mycielskian(g: &Graph, r: usize) -> Result<Graph> {
    if r < 2 {
        return Err(Error::Precondition(format!(
            "generalized Mycielskian needs r >= 2, got {r}"
        )));
    }
    if !g.is_simple() {
        return Err(Error::Precondition(
            "generalized Mycielskian is defined for simple graphs".into(),
        ));
    }
    let spec = PathSpec::new(r, BTreeSet::from([0]))?;
    path_quotient(g, &spec)
}

// ---------------------------------------------------------------------------
// Exponential graphs
// ---------------------------------------------------------------------------

/// Digits of map index `idx` in base `m`, one digit per domain vertex.
pub fn exp_digits(idx: u128, n: usize, m: usize) -> Vec<u8> {
    let mut d = vec![0u8; n];
    let mut x = idx;
    for slot in d.iter_mut() {
        *slot = (x % m as u128) as u8;
        x /= m as u128;
    }
    d
}

pub fn exp_index(digits: &[u8], m: usize) -> u128 {
    let mut idx = 0u128;
    for &d in digits.iter().rev() {
        idx = idx * m as u128 + d as u128;
    }
    idx
}

/// Label for the map with the given digits: image labels joined by commas.
pub fn exp_label(digits: &[u8], h: &Graph) -> String {
    let parts: Vec<&str> = digits.iter().map(|&d| h.label(d as usize)).collect();
    parts.join(",")
}

/// Exponential graph H^G on all set maps V(G) -> V(H); maps f, f' are
/// adjacent iff v ~ v' in G implies f(v) ~ f'(v') in H. A loop at f marks
/// exactly the graph homomorphisms G -> H.
pub fn exponential_graph(h: &Graph, g: &Graph, vertex_budget: usize) -> Result<Graph> {
    let n = g.vertex_count();
    let m = h.vertex_count();
    let count = (m as u128)
        .checked_pow(n as u32)
        .ok_or(Error::SizeExceeded {
            what: "exponential graph vertices",
            required: u128::MAX,
            budget: vertex_budget as u128,
        })?;
    if count > vertex_budget as u128 {
        return Err(Error::SizeExceeded {
            what: "exponential graph vertices",
            required: count,
            budget: vertex_budget as u128,
        });
    }
    let count = count as usize;
    let labels = (0..count)
        .map(|i| exp_label(&exp_digits(i as u128, n, m), h))
        .collect();
    let mut exp = Graph::new(labels)?;

    // Neighbors of f form a product set: g is adjacent to f iff for every
    // vertex w, g(w) lies in the intersection of N_H(f(v)) over v ~ w.
    let mut digits = vec![0u8; n];
    let mut allowed: Vec<BitRow> = vec![BitRow::new(m); n];
    for f in 0..count {
        for w in 0..n {
            allowed[w].fill();
            for v in g.adj[w].iter_ones() {
                allowed[w].intersect_with(&h.adj[digits[v] as usize]);
            }
        }
        enumerate_product(&allowed, m, |tuple| {
            let gi = exp_index(tuple, m) as usize;
            if gi >= f {
                exp.add_edge(f, gi);
            }
        });
        // advance the digit odometer
        for d in digits.iter_mut() {
            if (*d as usize) + 1 < m {
                *d += 1;
                break;
            }
            *d = 0;
        }
    }
    Ok(exp)
}

/// Call `visit` on every tuple in the product of the allowed sets.
fn enumerate_product<F: FnMut(&[u8])>(allowed: &[BitRow], m: usize, mut visit: F) {
    let n = allowed.len();
    let choices: Vec<Vec<u8>> = allowed
        .iter()
        .map(|a| a.iter_ones().map(|x| x as u8).collect())
        .collect();
    if choices.iter().any(|c: &Vec<u8>| c.is_empty()) {
        return;
    }
    let _ = m;
    let mut pos = vec![0usize; n];
    let mut tuple: Vec<u8> = choices.iter().map(|c| c[0]).collect();
    loop {
        visit(&tuple);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            if pos[k] + 1 < choices[k].len() {
                pos[k] += 1;
                tuple[k] = choices[k][pos[k]];
                break;
            }
            pos[k] = 0;
            tuple[k] = choices[k][0];
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Isomorphism and canonical keys
// ---------------------------------------------------------------------------

/// Exact isomorphism by backtracking with degree/loop pruning. Returns a
/// witness map when the graphs are isomorphic. Errors when either graph
/// exceeds the size cap.
pub fn is_isomorphic(g: &Graph, h: &Graph, vertex_cap: usize) -> Result<Option<VertexMap>> {
    let n = g.vertex_count();
    if n.max(h.vertex_count()) > vertex_cap {
        return Err(Error::SizeExceeded {
            what: "isomorphism search vertices",
            required: n.max(h.vertex_count()) as u128,
            budget: vertex_cap as u128,
        });
    }
    if n != h.vertex_count()
        || g.edge_count() != h.edge_count()
        || g.loop_count() != h.loop_count()
    {
        return Ok(None);
    }
    let sig = |gr: &Graph| {
        let mut s: Vec<(usize, bool)> = (0..gr.vertex_count())
            .map(|v| (gr.degree(v), gr.has_loop(v)))
            .collect();
        s.sort();
        s
    };
    if sig(g) != sig(h) {
        return Ok(None);
    }

    // Map G's vertices in descending-degree order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (usize::MAX - g.degree(v), v));

    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if assign(g, h, &order, 0, &mut image, &mut used) {
        let map = VertexMap::new(n, n, image)?;
        debug_assert!(map.is_isomorphism_between(g, h));
        return Ok(Some(map));
    }
    Ok(None)
}

fn assign(
    g: &Graph,
    h: &Graph,
    order: &[usize],
    k: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k];
    for t in 0..h.vertex_count() {
        if used[t] || g.degree(v) != h.degree(t) || g.has_loop(v) != h.has_loop(t) {
            continue;
        }
        let consistent = order[..k].iter().all(|&u| {
            g.has_edge(v, u) == h.has_edge(t, image[u])
        });
        if consistent {
            image[v] = t;
            used[t] = true;
            if assign(g, h, order, k + 1, image, used) {
                return true;
            }
            image[v] = usize::MAX;
            used[t] = false;
        }
    }
    false
}

/// Injective edge-preserving embedding of `pattern` into `host` (subgraph,
/// not necessarily induced).
pub fn contains_subgraph(host: &Graph, pattern: &Graph, step_budget: u64) -> Result<Option<VertexMap>> {
    let np = pattern.vertex_count();
    let nh = host.vertex_count();
    if np > nh {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..np).collect();
    order.sort_by_key(|&v| (usize::MAX - pattern.degree(v), v));
    let mut image = vec![usize::MAX; np];
    let mut used = vec![false; nh];
    let mut steps = 0u64;
    fn go(
        host: &Graph,
        pattern: &Graph,
        order: &[usize],
        k: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        steps: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        if k == order.len() {
            return Ok(true);
        }
        let v = order[k];
        for t in 0..host.vertex_count() {
            *steps += 1;
            if *steps > budget {
                return Err(Error::StepBudget { steps: budget });
            }
            if used[t]
                || host.degree(t) < pattern.degree(v)
                || (pattern.has_loop(v) && !host.has_loop(t))
            {
                continue;
            }
            let consistent = order[..k]
                .iter()
                .all(|&u| !pattern.has_edge(v, u) || host.has_edge(t, image[u]));
            if consistent {
                image[v] = t;
                used[t] = true;
                if go(host, pattern, order, k + 1, image, used, steps, budget)? {
                    return Ok(true);
                }
                image[v] = usize::MAX;
                used[t] = false;
            }
        }
        Ok(false)
    }
    if go(host, pattern, &order, 0, &mut image, &mut used, &mut steps, step_budget)? {
        let map = VertexMap::new(np, nh, image)?;
        debug_assert!(map.is_homomorphism(pattern, host));
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// Canonical byte key: identical for isomorphic graphs up to
/// `brute_cap` vertices (minimum adjacency code over all orderings);
/// exact labeled serialization beyond that.
pub fn canonical_key(g: &Graph, brute_cap: usize) -> Vec<u8> {
    let n = g.vertex_count();
    if n <= brute_cap && n <= 10 {
        let mut best = u64::MAX;
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut code = 0u64;
            for i in 0..n {
                for j in i..n {
                    code = (code << 1) | g.has_edge(p[i], p[j]) as u64;
                }
            }
            if code < best {
                best = code;
            }
        });
        if n == 0 {
            best = 0;
        }
        let mut key = vec![0x01, n as u8];
        key.extend_from_slice(&best.to_be_bytes());
        key
    } else {
        let mut key = vec![0x02];
        key.extend_from_slice(&(n as u64).to_be_bytes());
        for l in g.labels() {
            key.extend_from_slice(l.as_bytes());
            key.push(0);
        }
        for v in 0..n {
            let mut byte = 0u8;
            let mut nb = 0;
            for w in 0..n {
                byte = (byte << 1) | g.has_edge(v, w) as u8;
                nb += 1;
                if nb == 8 {
                    key.push(byte);
                    byte = 0;
                    nb = 0;
                }
            }
            if nb > 0 {
                key.push(byte << (8 - nb));
            }
        }
        key
    }
}

fn permute<F: FnMut(&[usize])>(items: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// Wire format: `{"vertices": [...], "edges": [[a,b],...], "loops": [...]}`;
/// edges listed once, order-insensitive; duplicates are deduplicated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub loops: Vec<String>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        let mut edges = Vec::new();
        let mut loops = Vec::new();
        for (u, v) in g.edges() {
            if u == v {
                loops.push(g.label(u).to_string());
            } else {
                edges.push((g.label(u).to_string(), g.label(v).to_string()));
            }
        }
        GraphJson {
            vertices: g.labels().to_vec(),
            edges,
            loops,
        }
    }
}

impl GraphJson {
    pub fn into_graph(self) -> Result<Graph> {
        let mut g = Graph::new(self.vertices)?;
        let mut index = BTreeMap::new();
        for (i, l) in g.labels().iter().enumerate() {
            index.insert(l.clone(), i);
        }
        for (a, b) in &self.edges {
            let u = *index.get(a).ok_or_else(|| Error::UnknownLabel(a.clone()))?;
            let v = *index.get(b).ok_or_else(|| Error::UnknownLabel(b.clone()))?;
            g.add_edge(u, v);
        }
        for l in &self.loops {
            let v = *index.get(l).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
            g.add_edge(v, v);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    /// Independent oracle: isomorphism by trying every bijection.
    fn brute_isomorphic(g: &Graph, h: &Graph) -> bool {
        let n = g.vertex_count();
        if n != h.vertex_count() {
            return false;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut found = false;
        permute(&mut perm, 0, &mut |p| {
            if found {
                return;
            }
            let ok = (0..n).all(|u| (u..n).all(|v| g.has_edge(u, v) == h.has_edge(p[u], p[v])));
            if ok {
                found = true;
            }
        });
        found
    }

    fn spec(r: usize, loops: &[usize]) -> PathSpec {
        PathSpec::new(r, loops.iter().copied().collect::<BTreeSet<_>>()).unwrap()
    }

    #[test]
    fn complete_graph_examples() {
        assert_eq!(complete_graph(1).edge_count(), 0);
        assert_eq!(complete_graph(3).edge_count(), 3);
        assert_eq!(complete_graph(5).edge_count(), 10);
        assert!(complete_graph(5).is_simple());
    }

    #[test]
    fn cycle_graph_examples() {
        assert!(cycle_graph(2).is_err());
        let c3 = cycle_graph(3).unwrap();
        assert!(brute_isomorphic(&c3, &complete_graph(3)));
        let c5 = cycle_graph(5).unwrap();
        assert_eq!(c5.vertex_count(), 5);
        assert_eq!(c5.edge_count(), 5);
        assert!((0..5).all(|v| c5.degree(v) == 2));
        assert!(c5.is_connected());
        // r = 4 is bipartite: 2-color by parity.
        let c4 = cycle_graph(4).unwrap();
        for (u, v) in c4.edges() {
            assert_ne!(u % 2, v % 2);
        }
    }

    #[test]
    fn path_with_loops_examples() {
        let l1 = path_with_loops(&spec(1, &[]));
        assert!(brute_isomorphic(&l1, &complete_graph(2)));
        let l2 = path_with_loops(&spec(2, &[0]));
        assert_eq!(l2.vertex_count(), 3);
        assert!(l2.has_loop(0));
        assert!(!l2.has_loop(1) && !l2.has_loop(2));
        assert!(l2.has_edge(0, 1) && l2.has_edge(1, 2) && !l2.has_edge(0, 2));
        // neighborhood(0) = {0, 1} because of the loop
        assert_eq!(l2.neighbors(0), alloc::vec![0, 1]);
        let l3 = path_with_loops(&spec(3, &[0, 1]));
        assert_eq!(l3.loop_count(), 2);
        assert!(l3.has_loop(0) && l3.has_loop(1));
    }

    #[test]
    fn product_examples() {
        let k2 = complete_graph(2);
        let p = categorical_product(&k2, &k2);
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(p.edge_count(), 2);
        // two disjoint edges: every vertex has degree 1
        assert!((0..4).all(|v| p.degree(v) == 1));

        let g = cycle_graph(5).unwrap();
        let h = complete_graph(3);
        assert_eq!(
            categorical_product(&g, &h).vertex_count(),
            g.vertex_count() * h.vertex_count()
        );
        // loops arise iff both coordinates have loops
        let l = path_with_loops(&spec(1, &[0]));
        let ll = categorical_product(&l, &l);
        assert_eq!(ll.loop_count(), 1);
        assert!(ll.has_loop(0));
    }

    #[test]
    fn quotient_examples() {
        let k2 = complete_graph(2);
        let q = path_quotient(&k2, &spec(2, &[0])).unwrap();
        assert_eq!(q.vertex_count(), 5);
        let k3 = complete_graph(3);
        let q3 = path_quotient(&k3, &spec(2, &[0])).unwrap();
        assert_eq!(q3.vertex_count(), 7);
        assert!(q3.is_simple());
        assert!(q3.index_of("*").is_some());
        let bad = quotient_top_level(&k2, &[0, 0], 1);
        assert!(bad.is_err());
    }

    #[test]
    fn mycielskian_examples() {
        let k2 = complete_graph(2);
        let m2 = generalized_mycielskian(&k2, 2).unwrap();
        let c5 = cycle_graph(5).unwrap();
        assert!(brute_isomorphic(&m2, &c5));
        assert!(is_isomorphic(&m2, &c5, 16).unwrap().is_some());

        let grotzsch = generalized_mycielskian(&m2, 2).unwrap();
        assert_eq!(grotzsch.vertex_count(), 11);
        assert!(grotzsch.is_simple());

        let m3 = generalized_mycielskian(&k2, 3).unwrap();
        assert_eq!(m3.vertex_count(), 7);
        assert!(generalized_mycielskian(&k2, 1).is_err());
    }

    #[test]
    fn mycielskian_size_is_rn_plus_one() {
        for n in 2..=4 {
            for r in 2..=4 {
                let g = complete_graph(n);
                let m = generalized_mycielskian(&g, r).unwrap();
                assert_eq!(m.vertex_count(), n * r + 1);
                assert!(m.is_simple());
            }
        }
    }

    /// Independent homomorphism test for the loop invariant of exponential
    /// graphs.
    fn brute_is_hom(digits: &[u8], g: &Graph, h: &Graph) -> bool {
        g.edges()
            .iter()
            .all(|&(u, v)| h.has_edge(digits[u] as usize, digits[v] as usize))
    }

    #[test]
    fn exponential_examples() {
        let k2 = complete_graph(2);
        let e = exponential_graph(&k2, &k2, 1000).unwrap();
        assert_eq!(e.vertex_count(), 4);
        // identity (digits 0,1 -> index 2) and swap (digits 1,0 -> index 1)
        // are the homomorphisms K_2 -> K_2 and carry the loops
        let mut loops: Vec<usize> = (0..4).filter(|&v| e.has_loop(v)).collect();
        loops.sort();
        assert_eq!(loops, alloc::vec![1, 2]);
        for f in 0..4u8 {
            let digits = exp_digits(f as u128, 2, 2);
            assert_eq!(e.has_loop(f as usize), brute_is_hom(&digits, &k2, &k2));
        }

        let c5 = cycle_graph(5).unwrap();
        assert_eq!(exponential_graph(&k2, &c5, 1000).unwrap().vertex_count(), 32);

        let k3 = complete_graph(3);
        let e23 = exponential_graph(&k2, &k3, 1000).unwrap();
        assert_eq!(e23.vertex_count(), 8);
        assert_eq!(e23.loop_count(), 0);

        assert!(matches!(
            exponential_graph(&k2, &c5, 10),
            Err(Error::SizeExceeded { required: 32, .. })
        ));
    }

    #[test]
    fn exponential_adjacency_matches_direct_definition() {
        // brute-force adjacency on K_2^{L_2({0})}: every ordered edge (v,v')
        // must satisfy f(v) ~ g(v')
        let h = complete_graph(2);
        let g = path_with_loops(&spec(2, &[0]));
        let e = exponential_graph(&h, &g, 1000).unwrap();
        let n = g.vertex_count();
        for a in 0..e.vertex_count() {
            for b in 0..e.vertex_count() {
                let fa = exp_digits(a as u128, n, 2);
                let fb = exp_digits(b as u128, n, 2);
                let mut adj = true;
                for (u, v) in g.edges() {
                    adj &= h.has_edge(fa[u] as usize, fb[v] as usize);
                    adj &= h.has_edge(fb[u] as usize, fa[v] as usize);
                }
                assert_eq!(e.has_edge(a, b), adj, "pair {a},{b}");
            }
        }
    }

    #[test]
    fn neighborhood_examples() {
        let c5 = cycle_graph(5).unwrap();
        assert_eq!(c5.neighbors(0), alloc::vec![1, 4]); // vertex "1" -> {"2","5"}
        let k4 = complete_graph(4);
        assert_eq!(k4.common_neighborhood(&[0, 1]), alloc::vec![2, 3]);
        assert_eq!(k4.common_neighborhood(&[]).len(), 4);
    }

    #[test]
    fn symmetry_after_constructions() {
        let g = generalized_mycielskian(&cycle_graph(5).unwrap(), 3).unwrap();
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn iso_examples() {
        let k3 = complete_graph(3);
        let c3 = cycle_graph(3).unwrap();
        assert!(is_isomorphic(&k3, &c3, 16).unwrap().is_some());
        let mut p2 = Graph::with_numeric_labels(3);
        p2.add_edge(0, 1);
        p2.add_edge(1, 2);
        assert!(is_isomorphic(&k3, &p2, 16).unwrap().is_none());
        assert!(is_isomorphic(&k3, &c3, 2).is_err());
        // returned witness is an isomorphism
        let m = is_isomorphic(&k3, &c3, 16).unwrap().unwrap();
        assert!(m.is_isomorphism_between(&k3, &c3));
    }

    #[test]
    fn subgraph_containment() {
        let grotzsch =
            generalized_mycielskian(&generalized_mycielskian(&complete_graph(2), 2).unwrap(), 2)
                .unwrap();
        let c5 = cycle_graph(5).unwrap();
        let w = contains_subgraph(&grotzsch, &c5, 1_000_000).unwrap();
        assert!(w.is_some());
        assert!(w.unwrap().is_homomorphism(&c5, &grotzsch));
        let k3 = complete_graph(3);
        assert!(contains_subgraph(&grotzsch, &k3, 1_000_000).unwrap().is_none());
    }

    #[test]
    fn canonical_key_examples() {
        let k3 = complete_graph(3);
        let c3 = cycle_graph(3).unwrap();
        assert_eq!(canonical_key(&k3, 10), canonical_key(&c3, 10));
        assert_eq!(canonical_key(&k3, 10), canonical_key(&k3, 10));
        assert_ne!(canonical_key(&k3, 10), canonical_key(&complete_graph(2), 10));
        // isomorphic relabelings agree under the brute canonical form
        let m = generalized_mycielskian(&complete_graph(2), 2).unwrap();
        let c5 = cycle_graph(5).unwrap();
        assert_eq!(canonical_key(&m, 10), canonical_key(&c5, 10));
    }

    #[test]
    fn graph_json_roundtrip_and_errors() {
        let j = GraphJson {
            vertices: alloc::vec!["a".into(), "b".into()],
            edges: alloc::vec![("a".into(), "b".into()), ("b".into(), "a".into())],
            loops: alloc::vec!["a".into()],
        };
        let g = j.into_graph().unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_loop(0));

        let bad = GraphJson {
            vertices: alloc::vec!["a".into()],
            edges: alloc::vec![("a".into(), "z".into())],
            loops: alloc::vec![],
        };
        assert!(matches!(bad.into_graph(), Err(Error::UnknownLabel(_))));

        let dup = Graph::new(alloc::vec!["a".into(), "a".into()]);
        assert!(matches!(dup, Err(Error::DuplicateLabel(_))));
    }
}
