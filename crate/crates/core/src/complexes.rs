//! Neighborhood complexes, the Hom(K2, -) order complex, boundary matrices,
//! integer Smith normal form and reduced simplicial homology.
//!
//! Homology is computed over the integers, never a prime field: the sphere
//! certificates used by the verification pipelines must rule out torsion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Ground set plus maximal faces, pairwise incomparable under inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    ground: Vec<String>,
    facets: Vec<Vec<u32>>,
}

impl SimplicialComplex {
    /// Build from candidate facets over a label universe. Faces are sorted,
    /// deduplicated and filtered down to the maximal ones; ground elements
    /// not appearing in any face are dropped.
    pub fn from_facets(universe: &[String], raw: Vec<Vec<u32>>) -> SimplicialComplex {
        let mut faces: Vec<Vec<u32>> = raw
            .into_iter()
            .filter(|f| !f.is_empty())
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        faces.sort();
        faces.dedup();
        // keep only maximal faces
        let mut maximal: Vec<Vec<u32>> = Vec::new();
        for f in &faces {
            let contained = faces.iter().any(|g| {
                g.len() > f.len() && f.iter().all(|x| g.binary_search(x).is_ok())
            });
            if !contained {
                maximal.push(f.clone());
            }
        }
        // compress the ground set to used vertices, preserving order
        let mut used: BTreeSet<u32> = BTreeSet::new();
        for f in &maximal {
            used.extend(f.iter().copied());
        }
        let remap: BTreeMap<u32, u32> = used
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let ground = used
            .iter()
            .map(|&v| universe[v as usize].clone())
            .collect();
        let mut facets: Vec<Vec<u32>> = maximal
            .into_iter()
            .map(|f| f.into_iter().map(|v| remap[&v]).collect())
            .collect();
        facets.sort();
        SimplicialComplex { ground, facets }
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn facets(&self) -> &[Vec<u32>] {
        &self.facets
    }

    /// Dimension of the complex, or None when it has no faces.
    pub fn dimension(&self) -> Option<usize> {
        self.facets.iter().map(|f| f.len() - 1).max()
    }
}

/// Neighborhood complex N(G): simplices are the vertex sets with a common
/// neighbor, so the facets are the maximal sets among the N_G(v).
pub fn neighborhood_complex(g: &Graph) -> SimplicialComplex {
    let candidates: Vec<Vec<u32>> = (0..g.vertex_count())
        .map(|v| g.neighborhood(v).iter_ones().map(|x| x as u32).collect())
        .collect();
    SimplicialComplex::from_facets(g.labels(), candidates)
}

// ---------------------------------------------------------------------------
// Hom(K2, G) as an order complex
// ---------------------------------------------------------------------------

/// Cells of Hom(K2, G) are pairs (A, B) of nonempty vertex sets with
/// A x B inside E(G), ordered by coordinatewise inclusion. The returned
/// complex is the order complex of this poset (chains as simplices), a
/// barycedral model of the same homotopy type.
pub fn hom_k2_complex(g: &Graph, face_budget: usize) -> Result<SimplicialComplex> {
    let n = g.vertex_count();
    if n > 24 {
        return Err(Error::SizeExceeded {
            what: "Hom(K2,-) cell enumeration vertices",
            required: n as u128,
            budget: 24,
        });
    }
    // Enumerate cells: for each nonempty A, B ranges over nonempty subsets
    // of the common neighborhood of A.
    let mut cells: Vec<(u32, u32)> = Vec::new();
    for a in 1u32..(1 << n) {
        let mut cn: u32 = (1 << n) - 1;
        for v in 0..n {
            if a >> v & 1 == 1 {
                let mut row = 0u32;
                for w in g.neighborhood(v).iter_ones() {
                    row |= 1 << w;
                }
                cn &= row;
            }
        }
        if cn == 0 {
            continue;
        }
        // all nonempty subsets of cn
        let mut b = cn;
        loop {
            cells.push((a, b));
            if cells.len() > face_budget {
                return Err(Error::FaceBudget { budget: face_budget });
            }
            if b == (b.wrapping_sub(1)) & cn {
                break;
            }
            b = (b - 1) & cn;
            if b == 0 {
                break;
            }
        }
    }
    cells.sort();
    let nc = cells.len();

    // Comparability graph of the inclusion order.
    let mut comp: Vec<BitRow> = vec![BitRow::new(nc); nc];
    for i in 0..nc {
        for j in (i + 1)..nc {
            let (a1, b1) = cells[i];
            let (a2, b2) = cells[j];
            let le = a1 & !a2 == 0 && b1 & !b2 == 0;
            let ge = a2 & !a1 == 0 && b2 & !b1 == 0;
            if le || ge {
                comp[i].set(j);
                comp[j].set(i);
            }
        }
    }

    // Maximal chains = maximal cliques of the comparability graph.
    let mut facets: Vec<Vec<u32>> = Vec::new();
    let mut r: Vec<u32> = Vec::new();
    let mut p = BitRow::new(nc);
    p.fill();
    let x = BitRow::new(nc);
    bron_kerbosch(&comp, &mut r, p, x, &mut facets, face_budget)?;

    let labels: Vec<String> = cells
        .iter()
        .map(|&(a, b)| format!("{}|{}", mask_label(a, g), mask_label(b, g)))
        .collect();
    Ok(SimplicialComplex::from_facets(&labels, facets))
}

fn mask_label(mask: u32, g: &Graph) -> String {
    let parts: Vec<&str> = (0..g.vertex_count())
        .filter(|&v| mask >> v & 1 == 1)
        .map(|v| g.label(v))
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn bron_kerbosch(
    adj: &[BitRow],
    r: &mut Vec<u32>,
    p: BitRow,
    x: BitRow,
    out: &mut Vec<Vec<u32>>,
    budget: usize,
) -> Result<()> {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        if out.len() > budget {
            return Err(Error::FaceBudget { budget });
        }
        return Ok(());
    }
    // pivot: vertex of P union X with most neighbors in P
    let pivot = p
        .iter_ones()
        .chain(x.iter_ones())
        .max_by_key(|&u| {
            let mut t = p.clone();
            t.intersect_with(&adj[u]);
            t.count_ones()
        })
        .expect("P or X nonempty");
    let mut candidates = p.clone();
    for v in adj[pivot].iter_ones() {
        candidates.clear(v);
    }
    let mut p = p;
    let mut x = x;
    for v in candidates.ones() {
        let mut p2 = p.clone();
        p2.intersect_with(&adj[v]);
        let mut x2 = x.clone();
        x2.intersect_with(&adj[v]);
        r.push(v as u32);
        bron_kerbosch(adj, r, p2, x2, out, budget)?;
        r.pop();
        p.clear(v);
        x.set(v);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Chain complexes and boundary matrices
// ---------------------------------------------------------------------------

/// Sparse integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<BTreeMap<u32, i64>>,
}

impl SparseMat {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let nrows = dense.len();
        let ncols = dense.first().map_or(0, |r| r.len());
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j as u32, v))
                    .collect()
            })
            .collect();
        SparseMat { nrows, ncols, rows }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.ncols]; self.nrows];
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, &v) in row {
                out[i][j as usize] = v;
            }
        }
        out
    }

    fn set(&mut self, i: usize, j: u32, v: i64) {
        if v == 0 {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }
}

/// All faces of the complex stratified by dimension plus the boundary
/// matrices between consecutive dimensions.
pub struct ChainComplex {
    /// `faces[d]` = sorted list of d-faces as sorted vertex arrays.
    pub faces: Vec<Vec<Vec<u32>>>,
    /// `boundaries[d]` = matrix of the map C_d -> C_{d-1}, for d >= 1.
    pub boundaries: Vec<SparseMat>,
}

/// Enumerate every face of the complex and assemble the boundary matrices
/// with the standard alternating signs. Faces within a dimension are sorted
/// lexicographically, so the matrices are reproducible.
pub fn boundary_matrices(k: &SimplicialComplex, face_budget: usize) -> Result<ChainComplex> {
    let mut all: BTreeSet<Vec<u32>> = BTreeSet::new();
    for facet in k.facets() {
        insert_closed(facet.clone(), &mut all, face_budget)?;
    }
    let dim = k.dimension().map_or(0, |d| d + 1); // number of strata
    let mut faces: Vec<Vec<Vec<u32>>> = vec![Vec::new(); dim];
    for f in all {
        faces[f.len() - 1].push(f);
    }
    // BTreeSet iteration is ascending and Vec<u32> ordering is
    // lexicographic, so each stratum is already sorted.
    let mut boundaries = Vec::new();
    for d in 1..dim {
        let lower = &faces[d - 1];
        let upper = &faces[d];
        let mut mat = SparseMat::zero(lower.len(), upper.len());
        for (j, face) in upper.iter().enumerate() {
            let mut sign = 1i64;
            let mut sub = Vec::with_capacity(face.len() - 1);
            for drop in 0..face.len() {
                sub.clear();
                sub.extend(face.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v));
                let row = lower
                    .binary_search(&sub)
                    .expect("boundary face enumerated");
                mat.set(row, j as u32, sign);
                sign = -sign;
            }
        }
        boundaries.push(mat);
    }
    Ok(ChainComplex { faces, boundaries })
}

fn insert_closed(face: Vec<u32>, all: &mut BTreeSet<Vec<u32>>, budget: usize) -> Result<()> {
    if all.contains(&face) {
        return Ok(());
    }
    if all.len() >= budget {
        return Err(Error::FaceBudget { budget });
    }
    if face.len() > 1 {
        for drop in 0..face.len() {
            let sub: Vec<u32> = face
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, &v)| v)
                .collect();
            insert_closed(sub, all, budget)?;
        }
    }
    all.insert(face);
    Ok(())
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Nonzero invariant factors d1 | d2 | ... as nonnegative integers.
    pub factors: Vec<BigInt>,
    pub rank: usize,
}

/// Exact integer Smith normal form. Unit pivots are eliminated sparsely
/// first; the remaining core is reduced densely. Arithmetic escalates to
/// arbitrary precision when i64 overflows.
pub fn smith_normal_form(mat: &SparseMat) -> SnfResult {
    match snf_sparse_i64(mat) {
        Ok(res) => res,
        Err(_) => snf_dense_big(&to_big_dense(mat)),
    }
}

struct Overflow;

fn snf_sparse_i64(mat: &SparseMat) -> core::result::Result<SnfResult, Overflow> {
    let mut rows: Vec<BTreeMap<u32, i64>> = mat.rows.clone();
    let mut col_rows: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); mat.ncols];
    for (i, row) in rows.iter().enumerate() {
        for &j in row.keys() {
            col_rows[j as usize].insert(i as u32);
        }
    }
    let mut live_row = vec![true; mat.nrows];
    let mut live_col = vec![true; mat.ncols];
    let mut units = 0usize;

    loop {
        // choose a unit pivot in a live column of minimal count
        let mut best: Option<(usize, u32, usize)> = None; // (row, col, cost)
        for (c, rowset) in col_rows.iter().enumerate() {
            if !live_col[c] || rowset.is_empty() {
                continue;
            }
            for &r in rowset {
                let r = r as usize;
                if !live_row[r] {
                    continue;
                }
                let v = rows[r][&(c as u32)];
                if v == 1 || v == -1 {
                    let cost = (rows[r].len() - 1) * (rowset.len() - 1);
                    if best.is_none_or(|(_, _, bc)| cost < bc) {
                        best = Some((r, c as u32, cost));
                    }
                    if cost == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((pr, pc, _)) = best else { break };
        let pivot = rows[pr][&pc];
        // clear the pivot column with row operations
        let targets: Vec<u32> = col_rows[pc as usize]
            .iter()
            .copied()
            .filter(|&r| r as usize != pr && live_row[r as usize])
            .collect();
        let pivot_row = rows[pr].clone();
        for t in targets {
            let t = t as usize;
            let factor = rows[t][&pc] * pivot; // q such that row_t -= q * row_p (pivot^2 = 1)
            for (&j, &v) in &pivot_row {
                let cur = rows[t].get(&j).copied().unwrap_or(0);
                let prod = factor.checked_mul(v).ok_or(Overflow)?;
                let next = cur.checked_sub(prod).ok_or(Overflow)?;
                if next == 0 {
                    rows[t].remove(&j);
                    col_rows[j as usize].remove(&(t as u32));
                } else {
                    if cur == 0 {
                        col_rows[j as usize].insert(t as u32);
                    }
                    rows[t].insert(j, next);
                }
            }
        }
        // retire pivot row and column
        for &j in pivot_row.keys() {
            col_rows[j as usize].remove(&(pr as u32));
        }
        live_row[pr] = false;
        live_col[pc as usize] = false;
        rows[pr].clear();
        units += 1;
    }

    // Residual: live entries with |v| > 1.
    let mut residual: Vec<Vec<BigInt>> = Vec::new();
    let live_cols: Vec<u32> = (0..mat.ncols as u32)
        .filter(|&c| live_col[c as usize] && !col_rows[c as usize].is_empty())
        .collect();
    if !live_cols.is_empty() {
        let colmap: BTreeMap<u32, usize> = live_cols
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        for (r, row) in rows.iter().enumerate() {
            if live_row[r] && !row.is_empty() {
                let mut dense = vec![BigInt::from(0); live_cols.len()];
                for (&j, &v) in row {
                    dense[colmap[&j]] = BigInt::from(v);
                }
                residual.push(dense);
            }
        }
    }
    let res = snf_dense_big(&residual);
    let mut factors = vec![BigInt::from(1); units];
    factors.extend(res.factors);
    let rank = units + res.rank;
    Ok(SnfResult { factors, rank })
}

fn to_big_dense(mat: &SparseMat) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![BigInt::from(0); mat.ncols]; mat.nrows];
    for (i, row) in mat.rows.iter().enumerate() {
        for (&j, &v) in row {
            out[i][j as usize] = BigInt::from(v);
        }
    }
    out
}

/// Classical SNF on a dense arbitrary-precision matrix, pivoting on the
/// minimal absolute value.
fn snf_dense_big(m: &[Vec<BigInt>]) -> SnfResult {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut factors: Vec<BigInt> = Vec::new();
    let zero = BigInt::from(0);
    let mut top = 0usize;

    while top < nrows && top < ncols {
        // find minimal-absolute-value nonzero entry in the active block
        let mut pivot: Option<(usize, usize)> = None;
        for i in top..nrows {
            for j in top..ncols {
                if a[i][j] != zero {
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => abs(&a[i][j]) < abs(&a[pi][pj]),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(top, pi);
        for row in a.iter_mut() {
            row.swap(top, pj);
        }

        // reduce row and column against the pivot until both are clear
        loop {
            let mut dirty = false;
            for i in (top + 1)..nrows {
                if a[i][top] != zero {
                    let q = div_round(&a[i][top], &a[top][top]);
                    if q != zero {
                        for j in top..ncols {
                            let sub = &a[top][j] * &q;
                            a[i][j] -= sub;
                        }
                    }
                    if a[i][top] != zero {
                        a.swap(top, i);
                        dirty = true;
                    }
                }
            }
            for j in (top + 1)..ncols {
                if a[top][j] != zero {
                    let q = div_round(&a[top][j], &a[top][top]);
                    if q != zero {
                        for row in a.iter_mut().take(nrows).skip(top) {
                            let sub = &row[top] * &q;
                            row[j] -= sub;
                        }
                    }
                    if a[top][j] != zero {
                        for row in a.iter_mut() {
                            row.swap(top, j);
                        }
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }

        // enforce divisibility of the remaining block by the pivot
        let p = a[top][top].clone();
        let mut fixed = false;
        'outer: for i in (top + 1)..nrows {
            for j in (top + 1)..ncols {
                if (&a[i][j] % &p) != zero {
                    for jj in top..ncols {
                        let add = a[i][jj].clone();
                        a[top][jj] += add;
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue; // re-run reduction at the same corner
        }
        factors.push(abs(&p));
        top += 1;
    }

    let rank = factors.len();
    SnfResult { factors, rank }
}

fn abs(x: &BigInt) -> BigInt {
    if x < &BigInt::from(0) {
        -x
    } else {
        x.clone()
    }
}

/// Rounded division keeping remainders small in the Euclidean descent.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let q = num / den;
    let r = num - &q * den;
    if &r + &r > abs(den) {
        if (num < &BigInt::from(0)) == (den < &BigInt::from(0)) {
            q + 1
        } else {
            q
        }
    } else if &r + &r < -abs(den) {
        if (num < &BigInt::from(0)) == (den < &BigInt::from(0)) {
            q
        } else {
            q - 1
        }
    } else {
        q
    }
}

// ---------------------------------------------------------------------------
// Reduced homology
// ---------------------------------------------------------------------------

/// Per-dimension reduced integer homology: free rank plus invariant
/// factors of the torsion part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub dim: usize,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// Reduced integer homology profile. Trailing trivial groups are trimmed,
/// so profiles of homotopy-equivalent complexes of different dimensions
/// compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub reduced: bool,
    pub groups: Vec<HomologyGroup>,
}

impl HomologyProfile {
    fn new(mut groups: Vec<HomologyGroup>) -> Self {
        while groups
            .last()
            .is_some_and(|g| g.rank == 0 && g.torsion.is_empty())
        {
            groups.pop();
        }
        HomologyProfile {
            reduced: true,
            groups,
        }
    }

    pub fn trivial() -> Self {
        HomologyProfile::new(Vec::new())
    }

    pub fn group(&self, dim: usize) -> (usize, &[u64]) {
        self.groups
            .iter()
            .find(|g| g.dim == dim)
            .map_or((0, &[][..]), |g| (g.rank, &g.torsion[..]))
    }

    /// Alternating sum of free ranks; equals the Euler characteristic
    /// minus one for nonempty complexes.
    pub fn reduced_euler(&self) -> i64 {
        self.groups
            .iter()
            .map(|g| {
                let sign = if g.dim % 2 == 0 { 1i64 } else { -1 };
                sign * g.rank as i64
            })
            .sum()
    }
}

/// H~_d via Smith normal form: free rank n_d - rank d_d - rank d_{d+1}
/// (with the augmentation accounting for reduced H~_0) and torsion from the
/// invariant factors of d_{d+1} exceeding one.
pub fn reduced_homology(k: &SimplicialComplex, face_budget: usize) -> Result<HomologyProfile> {
    let chain = boundary_matrices(k, face_budget)?;
    Ok(reduced_homology_of_chain(&chain))
}

pub fn reduced_homology_of_chain(chain: &ChainComplex) -> HomologyProfile {
    let strata = chain.faces.len();
    if strata == 0 {
        return HomologyProfile::trivial();
    }
    let snf: Vec<SnfResult> = chain.boundaries.iter().map(smith_normal_form).collect();
    let mut groups = Vec::new();
    for d in 0..strata {
        let n_d = chain.faces[d].len();
        let rank_down = if d == 0 {
            // augmentation map C_0 -> Z
            if n_d > 0 {
                1
            } else {
                0
            }
        } else {
            snf[d - 1].rank
        };
        let (rank_up, torsion) = if d < snf.len() {
            let t: Vec<u64> = snf[d]
                .factors
                .iter()
                .filter(|f| **f > BigInt::from(1))
                .map(|f| {
                    let (_, digits) = f.to_u64_digits();
                    if digits.len() == 1 {
                        digits[0]
                    } else {
                        u64::MAX // factor beyond u64; preserved as a sentinel
                    }
                })
                .collect();
            (snf[d].rank, t)
        } else {
            (0, Vec::new())
        };
        groups.push(HomologyGroup {
            dim: d,
            rank: n_d - rank_down - rank_up,
            torsion,
        });
    }
    HomologyProfile::new(groups)
}

/// True iff the profile is that of the d-sphere: H~_d = Z, everything else
/// trivial and torsion-free. d = 0 is the two-point profile.
pub fn is_sphere_profile(p: &HomologyProfile, d: usize) -> bool {
    p.groups.iter().all(|g| g.torsion.is_empty())
        && p.group(d) == (1, &[][..])
        && p.groups.iter().all(|g| g.dim == d || g.rank == 0)
}

/// Euler characteristic from face counts.
pub fn euler_characteristic(chain: &ChainComplex) -> i64 {
    chain
        .faces
        .iter()
        .enumerate()
        .map(|(d, fs)| {
            let sign = if d % 2 == 0 { 1i64 } else { -1 };
            sign * fs.len() as i64
        })
        .sum()
}
