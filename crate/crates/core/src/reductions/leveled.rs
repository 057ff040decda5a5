//! Direct construction of the folded exponential graphs without
//! materializing K_m^B: vertices are leveled maps whose blocks are either
//! constant or a homomorphism of the base into K_m, and adjacency is
//! decided block-pair-wise from precomputed compatibility tables.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::coloring::{chromatic_number, enumerate_homs, property_p};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::graph::{complete_graph, Graph};

/// Per-level content of a folded-exponential vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockTag {
    Constant(u8),
    /// Index into the interned homomorphism list of the block table.
    Assignment(u16),
}

/// A vertex of a folded exponential graph: one tag per level plus the
/// colors of the apex vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeveledMap {
    pub base_size: usize,
    pub colors: usize,
    pub blocks: Vec<BlockTag>,
    pub apex_colors: Vec<u8>,
}

/// Interned block contents for a fixed base graph and color count: the m
/// constants followed by every homomorphism base -> K_m in enumeration
/// order, with image masks and the cross-compatibility table
/// cross(a, b) = "a(x) != b(y) for every ordered edge (x, y) of the base".
#[derive(Debug, Clone)]
pub struct BlockTable {
    pub m: usize,
    pub base_n: usize,
    pub homs: Vec<Vec<u8>>,
    im_mask: Vec<u32>,
    cross: Vec<bool>,
}

impl BlockTable {
    pub fn build(base: &Graph, m: usize) -> Result<BlockTable> {
        if !(2..=30).contains(&m) {
            return Err(Error::Precondition(format!("block table needs 2 <= m <= 30, got {m}")));
        }
        let km = complete_graph(m);
        let homs: Vec<Vec<u8>> = enumerate_homs(base, &km, 1_000_000)?
            .into_iter()
            .map(|vm| vm.table.iter().map(|&x| x as u8).collect())
            .collect();
        let n = base.vertex_count();
        let tags = m + homs.len();
        let value = |tag: usize, x: usize| -> u8 {
            if tag < m {
                tag as u8
            } else {
                homs[tag - m][x]
            }
        };
        let mut im_mask = vec![0u32; tags];
        for (tag, mask) in im_mask.iter_mut().enumerate() {
            if tag < m {
                *mask = 1 << tag;
            } else {
                for x in 0..n {
                    *mask |= 1 << value(tag, x);
                }
            }
        }
        let mut edges_ord = Vec::new();
        for (u, v) in base.edges() {
            edges_ord.push((u, v));
            if u != v {
                edges_ord.push((v, u));
            }
        }
        let mut cross = vec![true; tags * tags];
        for a in 0..tags {
            for b in 0..tags {
                cross[a * tags + b] = edges_ord
                    .iter()
                    .all(|&(x, y)| value(a, x) != value(b, y));
            }
        }
        Ok(BlockTable {
            m,
            base_n: n,
            homs,
            im_mask,
            cross,
        })
    }

    pub fn tag_count(&self) -> usize {
        self.m + self.homs.len()
    }

    #[inline]
    pub fn is_constant(&self, tag: u16) -> bool {
        (tag as usize) < self.m
    }

    #[inline]
    pub fn value(&self, tag: u16, x: usize) -> u8 {
        if self.is_constant(tag) {
            tag as u8
        } else {
            self.homs[tag as usize - self.m][x]
        }
    }

    #[inline]
    pub fn image_mask(&self, tag: u16) -> u32 {
        self.im_mask[tag as usize]
    }

    #[inline]
    pub fn cross(&self, a: u16, b: u16) -> bool {
        self.cross[a as usize * self.tag_count() + b as usize]
    }

    pub fn block_tag(&self, tag: u16) -> BlockTag {
        if self.is_constant(tag) {
            BlockTag::Constant(tag as u8)
        } else {
            BlockTag::Assignment(tag - self.m as u16)
        }
    }

    pub fn tag_label(&self, tag: u16) -> String {
        if self.is_constant(tag) {
            format!("c{}", tag + 1)
        } else {
            let digits: Vec<String> = self.homs[tag as usize - self.m]
                .iter()
                .map(|&d| format!("{}", d + 1))
                .collect();
            format!("h{}", digits.join(""))
        }
    }
}

// ---------------------------------------------------------------------------
// Folded exponential graph of K_m^{T_A^r}
// ---------------------------------------------------------------------------

/// The fold image of K_m^{T_A^r}: one constant-or-homomorphism tag per
/// level 0..r-1 plus the apex color. With `pruned` set, only constant
/// tags remain, which is a copy of K_m^{L_r(A)}.
pub struct FoldedSingle {
    pub table: BlockTable,
    pub r: usize,
    pub loops: BTreeSet<usize>,
    pub pruned: bool,
    /// Ordered level pairs (l, l') of L_r(A) with both levels below r.
    level_pairs: Vec<(usize, usize)>,
    tags: Vec<u16>,
}

/// Construct the folded graph directly from the base structure. The base
/// must be connected with the edge-pair property, and 2 <= m <= chi(T).
pub fn folded_exponential_single(
    t: &Graph,
    m: usize,
    r: usize,
    loops: &BTreeSet<usize>,
    pruned: bool,
    limits: &Limits,
) -> Result<FoldedSingle> {
    if r == 0 {
        return Err(Error::Precondition("level count r must be positive".into()));
    }
    if loops.iter().any(|&a| a >= r) {
        return Err(Error::Precondition("loop set must be contained in {0..r-1}".into()));
    }
    if !t.is_connected() || t.vertex_count() < 2 {
        return Err(Error::Precondition("base graph must be connected with at least one edge".into()));
    }
    if !property_p(t)?.holds {
        return Err(Error::Precondition("base graph lacks the edge-pair property".into()));
    }
    let chi = chromatic_number(t, limits)?
        .exact()
        .ok_or_else(|| Error::Precondition("chromatic number of the base did not resolve".into()))?;
    if m < 2 || m > chi {
        return Err(Error::Precondition(format!(
            "folded construction needs 2 <= m <= chi(T) = {chi}, got m = {m}"
        )));
    }
    let table = BlockTable::build(t, m)?;
    let mut level_pairs = Vec::new();
    for l in 0..r.saturating_sub(1) {
        level_pairs.push((l, l + 1));
        level_pairs.push((l + 1, l));
    }
    for &l in loops {
        level_pairs.push((l, l));
    }
    level_pairs.sort_unstable();
    let tags: Vec<u16> = if pruned {
        (0..m as u16).collect()
    } else {
        (0..table.tag_count() as u16).collect()
    };
    let fs = FoldedSingle {
        table,
        r,
        loops: loops.clone(),
        pruned,
        level_pairs,
        tags,
    };
    let count = fs.vertex_count_u128();
    if count > limits.vertex_budget as u128 {
        return Err(Error::SizeExceeded {
            what: "folded exponential vertices",
            required: count,
            budget: limits.vertex_budget as u128,
        });
    }
    Ok(fs)
}

impl FoldedSingle {
    fn vertex_count_u128(&self) -> u128 {
        let t = self.tags.len() as u128;
        let mut c = self.table.m as u128;
        for _ in 0..self.r {
            c = c.saturating_mul(t);
        }
        c
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count_u128() as usize
    }

    /// Decode a vertex index into per-level tags plus the apex color.
    pub fn decode(&self, idx: usize) -> (Vec<u16>, u8) {
        let t = self.tags.len();
        let mut x = idx;
        let mut blocks = Vec::with_capacity(self.r);
        for _ in 0..self.r {
            blocks.push(self.tags[x % t]);
            x /= t;
        }
        (blocks, x as u8)
    }

    pub fn leveled_map(&self, idx: usize) -> LeveledMap {
        let (blocks, apex) = self.decode(idx);
        LeveledMap {
            base_size: self.table.base_n,
            colors: self.table.m,
            blocks: blocks.iter().map(|&b| self.table.block_tag(b)).collect(),
            apex_colors: vec![apex],
        }
    }

    pub fn label(&self, idx: usize) -> String {
        let (blocks, apex) = self.decode(idx);
        let parts: Vec<String> = blocks.iter().map(|&b| self.table.tag_label(b)).collect();
        format!("{};*={}", parts.join("|"), apex + 1)
    }

    /// Raw map on the vertices of T_A^r (level-major base indexing:
    /// vertex (x, l) at x*r + l, apex last).
    pub fn raw_map(&self, idx: usize) -> Vec<u8> {
        let (blocks, apex) = self.decode(idx);
        let n = self.table.base_n;
        let mut digits = vec![0u8; n * self.r + 1];
        for x in 0..n {
            for (l, &b) in blocks.iter().enumerate() {
                digits[x * self.r + l] = self.table.value(b, x);
            }
        }
        digits[n * self.r] = apex;
        digits
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let (bi, ai) = self.decode(i);
        let (bj, aj) = self.decode(j);
        for &(l, l2) in &self.level_pairs {
            if !self.table.cross(bi[l], bj[l2]) {
                return false;
            }
        }
        let top = self.r - 1;
        let im_i = self.table.image_mask(bi[top]);
        let im_j = self.table.image_mask(bj[top]);
        im_j >> ai & 1 == 0 && im_i >> aj & 1 == 0
    }

    /// Allowed neighbor components of vertex `idx`: per-level tag sets and
    /// the apex color mask. The neighborhood is exactly their product.
    pub fn neighbor_components(&self, idx: usize) -> (Vec<Vec<u16>>, u32) {
        let (blocks, apex) = self.decode(idx);
        let mut allowed: Vec<Vec<u16>> = Vec::with_capacity(self.r);
        for l2 in 0..self.r {
            let set: Vec<u16> = self
                .tags
                .iter()
                .copied()
                .filter(|&b| {
                    self.level_pairs
                        .iter()
                        .all(|&(la, lb)| lb != l2 || self.table.cross(blocks[la], b))
                        && (l2 != self.r - 1 || self.table.image_mask(b) >> apex & 1 == 0)
                })
                .collect();
            allowed.push(set);
        }
        let apex_mask = !self.table.image_mask(blocks[self.r - 1])
            & ((1u32 << self.table.m) - 1);
        (allowed, apex_mask)
    }

    pub fn is_isolated(&self, idx: usize) -> bool {
        let (allowed, apex_mask) = self.neighbor_components(idx);
        apex_mask == 0 || allowed.iter().any(|a| a.is_empty())
    }

    /// Materialize as a dense graph.
    pub fn to_graph(&self, limits: &Limits) -> Result<Graph> {
        let count = self.vertex_count_u128();
        if count > limits.dense_vertex_cap as u128 {
            return Err(Error::SizeExceeded {
                what: "dense folded graph vertices",
                required: count,
                budget: limits.dense_vertex_cap as u128,
            });
        }
        let count = count as usize;
        let labels = (0..count).map(|i| self.label(i)).collect();
        let mut g = Graph::new(labels)?;
        for i in 0..count {
            for j in i..count {
                if self.adjacent(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Folded exponential graph of K_m^{M(M(K_n))}
// ---------------------------------------------------------------------------

/// Successive stages of the folded K_m^{M(M(K_n))}: the constant-or-
/// homomorphism stage, the stage after the equal-image and one-vertex
/// -difference folds, and the stage with the three isolated families
/// removed. `Constants` keeps constant blocks only (the copy of
/// K_m^{M(L_2({0}))} used by the sphere pipeline).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DoubleStage {
    G,
    G1,
    G2,
    Constants,
}

/// Block slots in order (0,0), (1,0), (0,1), (1,1): slot = i + 2j for the
/// block of base vertices (x, i, j). Apex colors in order w0, w1, w2.
pub struct FoldedDouble {
    pub table: BlockTable,
    pub n: usize,
    pub m: usize,
    pub stage: DoubleStage,
    /// Valid (b00, b10, w0) triples for this stage, sorted.
    triples: Vec<(u16, u16, u8)>,
    /// Tags available for the unconstrained blocks b01, b11.
    free_tags: Vec<u16>,
}

/// Ordered block-slot pairs (f-slot, g-slot) whose contents must be
/// cross-compatible for adjacency; derived from the edges of M(M(K_n)).
const SLOT_PAIRS: [(usize, usize); 9] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 0),
    (1, 2),
    (2, 0),
    (2, 1),
    (3, 0),
];

pub fn folded_exponential_double(
    n: usize,
    m: usize,
    stage: DoubleStage,
    limits: &Limits,
) -> Result<FoldedDouble> {
    if n < 2 {
        return Err(Error::Precondition(format!("double construction needs n >= 2, got {n}")));
    }
    if m < 2 || m > n + 1 {
        return Err(Error::Precondition(format!(
            "double construction needs 2 <= m <= n + 1, got m = {m}"
        )));
    }
    let table = BlockTable::build(&complete_graph(n), m)?;
    let tags = table.tag_count() as u16;
    let free_tags: Vec<u16> = match stage {
        DoubleStage::Constants => (0..m as u16).collect(),
        _ => (0..tags).collect(),
    };
    let mut triples = Vec::new();
    for b00 in 0..tags {
        for b10 in 0..tags {
            for w0 in 0..m as u8 {
                if stage_admits(&table, stage, b00, b10, w0) {
                    triples.push((b00, b10, w0));
                }
            }
        }
    }
    let fd = FoldedDouble {
        table,
        n,
        m,
        stage,
        triples,
        free_tags,
    };
    // The structure itself is lazy (tags and triples only); the cap keeps
    // vertex indices addressable. Exhaustive scans over the vertex set are
    // gated separately by the vertex budget at the call sites.
    let _ = limits;
    const LAZY_VERTEX_CAP: u128 = 1 << 27;
    let count = fd.vertex_count_u128();
    if count > LAZY_VERTEX_CAP {
        return Err(Error::SizeExceeded {
            what: "folded double-Mycielskian vertices",
            required: count,
            budget: LAZY_VERTEX_CAP,
        });
    }
    Ok(fd)
}

fn stage_admits(table: &BlockTable, stage: DoubleStage, b00: u16, b10: u16, w0: u8) -> bool {
    match stage {
        DoubleStage::G => true,
        DoubleStage::Constants => table.is_constant(b00) && table.is_constant(b10),
        DoubleStage::G1 => passes_ab(table, b00, b10),
        DoubleStage::G2 => {
            passes_ab(table, b00, b10) && !in_u1(table, b00, b10, w0)
                && !in_u2(table, b00, b10, w0)
                && !in_u3(table, b00, b10, w0)
        }
    }
}

fn differ_count(table: &BlockTable, a: u16, b: u16) -> usize {
    (0..table.base_n)
        .filter(|&x| table.value(a, x) != table.value(b, x))
        .count()
}

/// Condition (A): homomorphism blocks with equal images must be equal;
/// condition (B): homomorphism blocks with different images must differ
/// at exactly one vertex.
fn passes_ab(table: &BlockTable, b00: u16, b10: u16) -> bool {
    if table.is_constant(b00) || table.is_constant(b10) {
        return true;
    }
    if table.image_mask(b00) == table.image_mask(b10) {
        b00 == b10
    } else {
        differ_count(table, b00, b10) == 1
    }
}

/// Both blocks homomorphisms with equal images and w0 outside the image.
pub fn in_u1(table: &BlockTable, b00: u16, b10: u16, w0: u8) -> bool {
    !table.is_constant(b00)
        && !table.is_constant(b10)
        && table.image_mask(b00) == table.image_mask(b10)
        && table.image_mask(b00) >> w0 & 1 == 0
}

/// Both blocks homomorphisms with different images differing at one
/// vertex, and w0 inside the first image.
pub fn in_u2(table: &BlockTable, b00: u16, b10: u16, w0: u8) -> bool {
    !table.is_constant(b00)
        && !table.is_constant(b10)
        && table.image_mask(b00) != table.image_mask(b10)
        && differ_count(table, b00, b10) == 1
        && table.image_mask(b00) >> w0 & 1 == 1
}

/// First block a homomorphism, second constant with its color outside the
/// first image, and w0 inside the first image.
pub fn in_u3(table: &BlockTable, b00: u16, b10: u16, w0: u8) -> bool {
    !table.is_constant(b00)
        && table.is_constant(b10)
        && table.image_mask(b00) >> (b10 as u8) & 1 == 0
        && table.image_mask(b00) >> w0 & 1 == 1
}

/// Fully decoded vertex: block tags in slot order and apex colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoubleVertex {
    pub blocks: [u16; 4],
    pub apex: [u8; 3], // w0, w1, w2
}

impl FoldedDouble {
    fn vertex_count_u128(&self) -> u128 {
        self.triples.len() as u128
            * self.free_tags.len() as u128
            * self.free_tags.len() as u128
            * self.m as u128
            * self.m as u128
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count_u128() as usize
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    /// Vertex index layout: ((((triple * F + b01) * F + b11) * m + w1) * m + w2.
    pub fn decode(&self, idx: usize) -> DoubleVertex {
        let m = self.m;
        let f = self.free_tags.len();
        let w2 = (idx % m) as u8;
        let rest = idx / m;
        let w1 = (rest % m) as u8;
        let rest = rest / m;
        let b11 = self.free_tags[rest % f];
        let rest = rest / f;
        let b01 = self.free_tags[rest % f];
        let (b00, b10, w0) = self.triples[rest / f];
        DoubleVertex {
            blocks: [b00, b10, b01, b11],
            apex: [w0, w1, w2],
        }
    }

    pub fn encode(&self, v: &DoubleVertex) -> Option<usize> {
        let t = self
            .triples
            .binary_search(&(v.blocks[0], v.blocks[1], v.apex[0]))
            .ok()?;
        let f = self.free_tags.len();
        let p01 = self.free_tags.iter().position(|&x| x == v.blocks[2])?;
        let p11 = self.free_tags.iter().position(|&x| x == v.blocks[3])?;
        Some(
            (((t * f + p01) * f + p11) * self.m + v.apex[1] as usize) * self.m
                + v.apex[2] as usize,
        )
    }

    pub fn leveled_map(&self, idx: usize) -> LeveledMap {
        let v = self.decode(idx);
        LeveledMap {
            base_size: self.n,
            colors: self.m,
            blocks: v.blocks.iter().map(|&b| self.table.block_tag(b)).collect(),
            apex_colors: v.apex.to_vec(),
        }
    }

    pub fn label(&self, idx: usize) -> String {
        let v = self.decode(idx);
        let parts: Vec<String> = v.blocks.iter().map(|&b| self.table.tag_label(b)).collect();
        format!(
            "{};w={},{},{}",
            parts.join("|"),
            v.apex[0] + 1,
            v.apex[1] + 1,
            v.apex[2] + 1
        )
    }

    /// Raw map on the 4n + 3 vertices of M(M(K_n)): base vertex (x, i, j)
    /// sits at index 4x + 2i + j, then w0, w1, w2.
    pub fn raw_map(&self, idx: usize) -> Vec<u8> {
        let v = self.decode(idx);
        let mut digits = vec![0u8; 4 * self.n + 3];
        for x in 0..self.n {
            for i in 0..2 {
                for j in 0..2 {
                    digits[4 * x + 2 * i + j] = self.table.value(v.blocks[i + 2 * j], x);
                }
            }
        }
        digits[4 * self.n] = v.apex[0];
        digits[4 * self.n + 1] = v.apex[1];
        digits[4 * self.n + 2] = v.apex[2];
        digits
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let a = self.decode(i);
        let b = self.decode(j);
        self.adjacent_vertices(&a, &b)
    }

    pub fn adjacent_vertices(&self, a: &DoubleVertex, b: &DoubleVertex) -> bool {
        let t = &self.table;
        for &(s1, s2) in SLOT_PAIRS.iter() {
            if !t.cross(a.blocks[s1], b.blocks[s2]) {
                return false;
            }
        }
        let im = |v: &DoubleVertex, s: usize| t.image_mask(v.blocks[s]);
        let [aw0, aw1, aw2] = a.apex;
        let [bw0, bw1, bw2] = b.apex;
        // w0 against blocks (1,0) and (1,1) on both sides
        if (im(b, 1) | im(b, 3)) >> aw0 & 1 == 1 || (im(a, 1) | im(a, 3)) >> bw0 & 1 == 1 {
            return false;
        }
        // w1 against block (1,0)
        if im(b, 1) >> aw1 & 1 == 1 || im(a, 1) >> bw1 & 1 == 1 {
            return false;
        }
        // w2 against blocks (0,1) and (1,1)
        if (im(b, 2) | im(b, 3)) >> aw2 & 1 == 1 || (im(a, 2) | im(a, 3)) >> bw2 & 1 == 1 {
            return false;
        }
        // the edge between the two apexes w1 and w2
        aw2 != bw1 && bw2 != aw1
    }

    /// Allowed neighbor components given `v`: tag sets for the four block
    /// slots and color masks for the three apexes. A neighbor is any
    /// stage-valid vertex drawn componentwise from these sets.
    pub fn neighbor_components(&self, v: &DoubleVertex) -> ([Vec<u16>; 4], [u32; 3]) {
        let t = &self.table;
        let full = (1u32 << self.m) - 1;
        let im = |s: usize| t.image_mask(v.blocks[s]);
        let [w0, w1, w2] = v.apex;
        let all_tags = 0..t.tag_count() as u16;

        let mut comp: [Vec<u16>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for g in all_tags {
            let gm = t.image_mask(g);
            // slot 0 pairs with f-slots 0,1,2,3
            if t.cross(v.blocks[0], g) && t.cross(v.blocks[1], g) && t.cross(v.blocks[2], g)
                && t.cross(v.blocks[3], g)
            {
                comp[0].push(g);
            }
            // slot 1 pairs with f-slots 0,2 and the w0/w1 image conditions
            if t.cross(v.blocks[0], g) && t.cross(v.blocks[2], g)
                && gm >> w0 & 1 == 0
                && gm >> w1 & 1 == 0
            {
                comp[1].push(g);
            }
            // slot 2 pairs with f-slots 0,1 and the w2 image condition
            if t.cross(v.blocks[0], g) && t.cross(v.blocks[1], g) && gm >> w2 & 1 == 0 {
                comp[2].push(g);
            }
            // slot 3 pairs with f-slot 0 and the w0/w2 image conditions
            if t.cross(v.blocks[0], g) && gm >> w0 & 1 == 0 && gm >> w2 & 1 == 0 {
                comp[3].push(g);
            }
        }
        let w0_mask = full & !(im(1) | im(3));
        let w1_mask = full & !im(1) & !(1 << w2);
        let w2_mask = full & !(im(2) | im(3)) & !(1 << w1);
        (comp, [w0_mask, w1_mask, w2_mask])
    }

    /// Whether (b00, b10, w0) is a valid triple of this stage.
    pub fn admits_triple(&self, b00: u16, b10: u16, w0: u8) -> bool {
        self.triples.binary_search(&(b00, b10, w0)).is_ok()
    }

    /// Stage-valid triples drawn from the given allowed components.
    pub fn valid_triples_within(
        &self,
        a00: &[u16],
        a10: &[u16],
        w0_mask: u32,
    ) -> Vec<(u16, u16, u8)> {
        let mut out = Vec::new();
        for &g00 in a00 {
            for &g10 in a10 {
                for gw0 in 0..self.m as u8 {
                    if w0_mask >> gw0 & 1 == 1 && self.admits_triple(g00, g10, gw0) {
                        out.push((g00, g10, gw0));
                    }
                }
            }
        }
        out
    }

    /// Exact isolation test within this stage via the component products.
    pub fn is_isolated(&self, idx: usize) -> bool {
        let v = self.decode(idx);
        let (comp, masks) = self.neighbor_components(&v);
        if comp[2].is_empty() || comp[3].is_empty() || masks[1] == 0 || masks[2] == 0 {
            return true;
        }
        // need one stage-valid (b00, b10, w0) among the allowed components
        !comp[0].iter().any(|&g00| {
            comp[1].iter().any(|&g10| {
                (0..self.m as u8).any(|gw0| {
                    masks[0] >> gw0 & 1 == 1
                        && self
                            .triples
                            .binary_search(&(g00, g10, gw0))
                            .is_ok()
                })
            })
        })
    }

    /// Restriction of this stage to constant blocks only.
    pub fn prune_to_constants(&self, limits: &Limits) -> Result<FoldedDouble> {
        folded_exponential_double(self.n, self.m, DoubleStage::Constants, limits)
    }

    pub fn to_graph(&self, limits: &Limits) -> Result<Graph> {
        let count = self.vertex_count_u128();
        if count > limits.dense_vertex_cap as u128 {
            return Err(Error::SizeExceeded {
                what: "dense folded graph vertices",
                required: count,
                budget: limits.dense_vertex_cap as u128,
            });
        }
        let count = count as usize;
        let labels = (0..count).map(|i| self.label(i)).collect();
        let mut g = Graph::new(labels)?;
        let decoded: Vec<DoubleVertex> = (0..count).map(|i| self.decode(i)).collect();
        for i in 0..count {
            for j in i..count {
                if self.adjacent_vertices(&decoded[i], &decoded[j]) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Witness constructions for the double-Mycielskian folds
// ---------------------------------------------------------------------------

/// Base graph M(M(K_n)) built so that its vertex order matches the
/// raw-map index convention of `FoldedDouble`.
pub fn double_mycielskian_base(n: usize) -> Result<Graph> {
    let inner = crate::graph::generalized_mycielskian(&complete_graph(n), 2)?;
    let outer = crate::graph::generalized_mycielskian(&inner, 2)?;
    debug_assert_eq!(outer.vertex_count(), 4 * n + 3);
    Ok(outer)
}

/// Witness for the level-block fold on K_m^{T_A^r}: when the level-l
/// block of f repeats a color on an edge of T, writing that color across
/// the whole level dominates f. Raw maps use the level-major indexing of
/// `FoldedSingle::raw_map` (vertex (x, l) at x*r + l, apex last).
/// Returns (l, the rewritten map); None when no level repeats on an edge.
pub fn foldgeneral_witness(f: &[u8], t: &Graph, r: usize) -> Option<(usize, Vec<u8>)> {
    let n = t.vertex_count();
    for l in 0..r {
        let level_at = |x: usize| f[x * r + l];
        let repeat = t
            .edges()
            .into_iter()
            .find(|&(u, v)| u != v && level_at(u) == level_at(v))
            .map(|(u, _)| level_at(u));
        if let Some(a) = repeat {
            let mut ft = f.to_vec();
            for x in 0..n {
                ft[x * r + l] = a;
            }
            if ft != f {
                return Some((l, ft));
            }
        }
    }
    None
}

/// Witness for the block-repeat fold: when block (p, q) of f repeats a
/// color at two base vertices, writing that color across the whole block
/// dominates f. Returns (p, q, the rewritten map); None when every block
/// is injective. For n = 2 a repeating block is already constant and the
/// construction returns f itself.
pub fn folddouble_witness(f: &[u8], n: usize) -> Option<(usize, usize, Vec<u8>)> {
    for (p, q) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let block_at = |x: usize| f[4 * x + 2 * p + q];
        let mut repeat: Option<u8> = None;
        'search: for i0 in 0..n {
            for i1 in (i0 + 1)..n {
                if block_at(i0) == block_at(i1) {
                    repeat = Some(block_at(i0));
                    break 'search;
                }
            }
        }
        if let Some(a) = repeat {
            let mut ft = f.to_vec();
            for x in 0..n {
                ft[4 * x + 2 * p + q] = a;
            }
            return Some((p, q, ft));
        }
    }
    None
}

/// Witness for the equal-image / one-difference folds between the (0,0)
/// and (1,0) blocks of a stage-G vertex violating condition (A) or (B):
/// block (1,0) is rewritten to a constant shared with block (0,0).
pub fn generalfold_witness(fd: &FoldedDouble, v: &DoubleVertex) -> Option<DoubleVertex> {
    let t = &fd.table;
    let (b00, b10) = (v.blocks[0], v.blocks[1]);
    if t.is_constant(b00) || t.is_constant(b10) || passes_ab(t, b00, b10) {
        return None;
    }
    let n = fd.n;
    // find i0 != j0 with value(b00, i0) = value(b10, j0)
    let mut pick: Option<u8> = None;
    if t.image_mask(b00) == t.image_mask(b10) {
        // equal images, different maps: any disagreeing vertex works
        let i = (0..n).find(|&x| t.value(b00, x) != t.value(b10, x))?;
        pick = Some(t.value(b00, i));
    } else {
        // images differ yet overlap on at least one color with distinct
        // preimages, because the maps disagree at two or more vertices
        for i in 0..n {
            let c = t.value(b00, i);
            if t.value(b10, i) != c && t.image_mask(b10) >> c & 1 == 1 {
                pick = Some(c);
                break;
            }
        }
    }
    let a = pick?;
    let mut w = *v;
    w.blocks[1] = a as u16; // constant tag
    Some(w)
}

/// Exact containment check N(f) within N(g) inside a folded stage.
/// Neighborhoods are products of component sets, so containment reduces
/// to emptiness or componentwise inclusion.
pub fn verify_leveled_certificate(fd: &FoldedDouble, f: &DoubleVertex, g: &DoubleVertex) -> bool {
    let (cf, mf) = fd.neighbor_components(f);
    let vt_f = fd.valid_triples_within(&cf[0], &cf[1], mf[0]);
    if vt_f.is_empty() || cf[2].is_empty() || cf[3].is_empty() || mf[1] == 0 || mf[2] == 0 {
        return true;
    }
    let (cg, mg) = fd.neighbor_components(g);
    let vt_g = fd.valid_triples_within(&cg[0], &cg[1], mg[0]);
    let subset = |a: &[u16], b: &[u16]| a.iter().all(|x| b.binary_search(x).is_ok());
    vt_f.iter().all(|t| vt_g.binary_search(t).is_ok())
        && subset(&cf[2], &cg[2])
        && subset(&cf[3], &cg[3])
        && mf[1] & !mg[1] == 0
        && mf[2] & !mg[2] == 0
}

/// Visit the stage-valid neighbors drawn from the component sets; the
/// callback returns false to stop.
pub fn for_each_neighbor(
    fd: &FoldedDouble,
    comp: &[Vec<u16>; 4],
    masks: &[u32; 3],
    visit: &mut dyn FnMut(&DoubleVertex) -> bool,
) {
    for &g00 in &comp[0] {
        for &g10 in &comp[1] {
            for gw0 in 0..fd.m as u8 {
                if masks[0] >> gw0 & 1 == 0
                    || fd.triples.binary_search(&(g00, g10, gw0)).is_err()
                {
                    continue;
                }
                for &g01 in &comp[2] {
                    for &g11 in &comp[3] {
                        for gw1 in 0..fd.m as u8 {
                            if masks[1] >> gw1 & 1 == 0 {
                                continue;
                            }
                            for gw2 in 0..fd.m as u8 {
                                if masks[2] >> gw2 & 1 == 0 {
                                    continue;
                                }
                                let h = DoubleVertex {
                                    blocks: [g00, g10, g01, g11],
                                    apex: [gw0, gw1, gw2],
                                };
                                if !visit(&h) {
                                    return;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{exp_index, exponential_graph, path_with_loops, PathSpec};
    use crate::reductions::{ImplicitExp, Strength};

    fn limits() -> Limits {
        Limits::default()
    }

    fn bset(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn block_table_for_k3_m2_has_no_homs() {
        let table = BlockTable::build(&complete_graph(3), 2).unwrap();
        assert_eq!(table.homs.len(), 0);
        assert_eq!(table.tag_count(), 2);
        assert!(table.cross(0, 1) && !table.cross(0, 0));
    }

    #[test]
    fn block_table_for_k3_m3() {
        let table = BlockTable::build(&complete_graph(3), 3).unwrap();
        assert_eq!(table.homs.len(), 6);
        // every hom K_3 -> K_3 is a bijection with full image
        for tag in 3..9u16 {
            assert_eq!(table.image_mask(tag), 0b111);
        }
        // a hom is cross-compatible with itself
        for tag in 3..9u16 {
            assert!(table.cross(tag, tag));
        }
    }

    #[test]
    fn folded_single_counts() {
        // vertex count of the unpruned stage is (constants + homs)^r * m
        let fs = folded_exponential_single(&complete_graph(3), 3, 2, &bset(&[0]), false, &limits())
            .unwrap();
        assert_eq!(fs.vertex_count(), (3 + 6) * (3 + 6) * 3);
        let fs2 = folded_exponential_single(&complete_graph(3), 3, 2, &bset(&[0]), true, &limits())
            .unwrap();
        assert_eq!(fs2.vertex_count(), 27);
        // preconditions
        assert!(
            folded_exponential_single(&crate::graph::cycle_graph(5).unwrap(), 2, 2, &bset(&[0]), false, &limits())
                .is_err()
        );
        assert!(folded_exponential_single(&complete_graph(3), 4, 2, &bset(&[0]), false, &limits())
            .is_err());
    }

    #[test]
    fn pruned_single_is_a_copy_of_the_path_exponential() {
        // tags are constants only, so vertices map to maps on L_r(A) by
        // reading off the constant per level plus the apex color
        let t = complete_graph(3);
        let fs = folded_exponential_single(&t, 2, 2, &bset(&[0]), true, &limits()).unwrap();
        let path = path_with_loops(&PathSpec::new(2, bset(&[0])).unwrap());
        let e = exponential_graph(&complete_graph(2), &path, 1000).unwrap();
        assert_eq!(fs.vertex_count(), e.vertex_count());
        for i in 0..fs.vertex_count() {
            let (bi, ai) = fs.decode(i);
            let di = [bi[0] as u8, bi[1] as u8, ai];
            for j in 0..fs.vertex_count() {
                let (bj, aj) = fs.decode(j);
                let dj = [bj[0] as u8, bj[1] as u8, aj];
                let ei = exp_index(&di, 2) as usize;
                let ej = exp_index(&dj, 2) as usize;
                assert_eq!(fs.adjacent(i, j), e.has_edge(ei, ej), "pair {i},{j}");
            }
        }
    }

    #[test]
    fn single_adjacency_matches_materialized_exponential() {
        // T = K_2, m = 2, r = 2, A = {0}: every map [2] -> [2] is constant
        // or a homomorphism, so the folded stage covers the whole of
        // K_2^{M_2(K_2)} and must reproduce its adjacency exactly.
        let t = complete_graph(2);
        let fs = folded_exponential_single(&t, 2, 2, &bset(&[0]), false, &limits()).unwrap();
        let base = crate::graph::generalized_mycielskian(&t, 2).unwrap();
        let e = exponential_graph(&complete_graph(2), &base, 100_000).unwrap();
        assert_eq!(fs.vertex_count(), e.vertex_count());
        // base vertex (x, l) lives at x*r + l = 2x + l and the product
        // construction orders M_2(K_2) the same way, apex last
        for i in 0..fs.vertex_count() {
            let fi = fs.raw_map(i);
            let ei = exp_index(&fi, 2) as usize;
            for j in i..fs.vertex_count() {
                let fj = fs.raw_map(j);
                let ej = exp_index(&fj, 2) as usize;
                assert_eq!(fs.adjacent(i, j), e.has_edge(ei, ej), "pair {i},{j}");
            }
        }
    }

    #[test]
    fn single_neighbor_components_describe_neighborhoods() {
        let t = complete_graph(2);
        let fs = folded_exponential_single(&t, 2, 2, &bset(&[0]), false, &limits()).unwrap();
        for i in 0..fs.vertex_count() {
            let (allowed, apex_mask) = fs.neighbor_components(i);
            for j in 0..fs.vertex_count() {
                let (bj, aj) = fs.decode(j);
                let in_product = (0..fs.r).all(|l| allowed[l].contains(&bj[l]))
                    && apex_mask >> aj & 1 == 1;
                assert_eq!(fs.adjacent(i, j), in_product, "pair {i},{j}");
            }
            assert_eq!(
                fs.is_isolated(i),
                (0..fs.vertex_count()).all(|j| !fs.adjacent(i, j))
            );
        }
    }

    #[test]
    fn single_adjacency_matches_materialized_exponential_with_hom_blocks() {
        // T = K_3, m = 3, r = 2, A = {0}: the stage has genuine
        // homomorphism blocks (six bijections); its adjacency must equal
        // the induced subgraph of the materialized K_3^{(K_3)_{{0}}^2}
        let t = complete_graph(3);
        let fs = folded_exponential_single(&t, 3, 2, &bset(&[0]), false, &limits()).unwrap();
        assert_eq!(fs.vertex_count(), 243);
        let spec = crate::graph::PathSpec::new(2, bset(&[0])).unwrap();
        let base = crate::graph::path_quotient(&t, &spec).unwrap();
        let e = exponential_graph(&complete_graph(3), &base, 100_000).unwrap();
        assert_eq!(e.vertex_count(), 2187);
        let indices: Vec<usize> = (0..fs.vertex_count())
            .map(|i| exp_index(&fs.raw_map(i), 3) as usize)
            .collect();
        for i in 0..fs.vertex_count() {
            for j in i..fs.vertex_count() {
                assert_eq!(
                    fs.adjacent(i, j),
                    e.has_edge(indices[i], indices[j]),
                    "pair {i},{j}"
                );
            }
        }
    }

    #[test]
    fn foldgeneral_witnesses_verify_on_the_implicit_graph() {
        use rand::{Rng, SeedableRng};
        // random maps on (K_3)_{{0}}^2 with a repeating level fold onto
        // level-constant maps
        let t = complete_graph(3);
        let spec = crate::graph::PathSpec::new(2, bset(&[0])).unwrap();
        let base = crate::graph::path_quotient(&t, &spec).unwrap();
        let imp = ImplicitExp::new(&base, 2);
        let lm = limits();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let mut nontrivial = 0;
        for _ in 0..60 {
            let f: Vec<u8> = (0..base.vertex_count()).map(|_| rng.gen_range(0..2) as u8).collect();
            if let Some((_, ft)) = foldgeneral_witness(&f, &t, 2) {
                let report = crate::reductions::verify_fold_certificate(&imp, &f, &ft, &lm);
                assert!(report.holds, "f = {f:?}, ft = {ft:?}");
                nontrivial += 1;
            }
        }
        assert!(nontrivial >= 30);
    }

    #[test]
    fn double_counts_for_small_cases() {
        let g = folded_exponential_double(2, 2, DoubleStage::G, &limits()).unwrap();
        assert_eq!(g.vertex_count(), 2048); // every block of size 2 is constant or injective
        let c = folded_exponential_double(2, 2, DoubleStage::Constants, &limits()).unwrap();
        assert_eq!(c.vertex_count(), 128); // 2^4 blocks * 2^3 apex colors

        let g23 = folded_exponential_double(2, 3, DoubleStage::G, &limits()).unwrap();
        assert_eq!(g23.vertex_count(), 177_147);
        let g1 = folded_exponential_double(2, 3, DoubleStage::G1, &limits()).unwrap();
        assert_eq!(g1.triple_count(), 63 * 3);
        let g2 = folded_exponential_double(2, 3, DoubleStage::G2, &limits()).unwrap();
        assert_eq!(g2.vertex_count(), 107_163);

        assert!(folded_exponential_double(1, 2, DoubleStage::G, &limits()).is_err());
        assert!(folded_exponential_double(2, 4, DoubleStage::G, &limits()).is_err());
    }

    #[test]
    fn double_adjacency_matches_materialized_exponential() {
        // n = 2, m = 2: the stage covers all of K_2^{M(M(K_2))}
        let fd = folded_exponential_double(2, 2, DoubleStage::G, &limits()).unwrap();
        let base = double_mycielskian_base(2).unwrap();
        let e = exponential_graph(&complete_graph(2), &base, 10_000).unwrap();
        assert_eq!(fd.vertex_count(), e.vertex_count());
        let count = fd.vertex_count();
        let decoded: Vec<DoubleVertex> = (0..count).map(|i| fd.decode(i)).collect();
        let indices: Vec<usize> = (0..count)
            .map(|i| exp_index(&fd.raw_map(i), 2) as usize)
            .collect();
        for i in 0..count {
            for j in i..count {
                assert_eq!(
                    fd.adjacent_vertices(&decoded[i], &decoded[j]),
                    e.has_edge(indices[i], indices[j]),
                    "pair {i},{j}"
                );
            }
        }
    }

    #[test]
    fn double_adjacency_matches_implicit_exponential_sampled() {
        // n = 2, m = 3 is too large to compare exhaustively; sample pairs
        use rand::{Rng, SeedableRng};
        let fd = folded_exponential_double(2, 3, DoubleStage::G, &limits()).unwrap();
        let base = double_mycielskian_base(2).unwrap();
        let imp = ImplicitExp::new(&base, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30_000 {
            let i = rng.gen_range(0..fd.vertex_count());
            let j = rng.gen_range(0..fd.vertex_count());
            let fi = fd.raw_map(i);
            let fj = fd.raw_map(j);
            assert_eq!(fd.adjacent(i, j), imp.adjacent(&fi, &fj), "pair {i},{j}");
        }
    }

    #[test]
    fn double_adjacency_matches_implicit_for_n3() {
        use rand::{Rng, SeedableRng};
        // n = 3, m = 2: no homomorphism blocks exist, the stage is small
        // enough to compare exhaustively
        let fd = folded_exponential_double(3, 2, DoubleStage::G, &limits()).unwrap();
        assert_eq!(fd.vertex_count(), 128);
        let base = double_mycielskian_base(3).unwrap();
        let imp = ImplicitExp::new(&base, 2);
        for i in 0..fd.vertex_count() {
            let fi = fd.raw_map(i);
            for j in i..fd.vertex_count() {
                let fj = fd.raw_map(j);
                assert_eq!(fd.adjacent(i, j), imp.adjacent(&fi, &fj), "pair {i},{j}");
            }
        }

        // n = 3, m = 3: homomorphism blocks are present; sampled pairs
        let fd = folded_exponential_double(3, 3, DoubleStage::G, &limits()).unwrap();
        let imp = ImplicitExp::new(&base, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20_000 {
            let i = rng.gen_range(0..fd.vertex_count());
            let j = rng.gen_range(0..fd.vertex_count());
            assert_eq!(
                fd.adjacent(i, j),
                imp.adjacent(&fd.raw_map(i), &fd.raw_map(j)),
                "pair {i},{j}"
            );
        }
    }

    #[test]
    fn double_neighbor_components_describe_neighborhoods() {
        let fd = folded_exponential_double(2, 2, DoubleStage::G2, &limits()).unwrap();
        let count = fd.vertex_count();
        for i in 0..count {
            let v = fd.decode(i);
            let (comp, masks) = fd.neighbor_components(&v);
            let mut product_neighbors = alloc::collections::BTreeSet::new();
            for_each_neighbor(&fd, &comp, &masks, &mut |h| {
                product_neighbors.insert(fd.encode(h).unwrap());
                true
            });
            let direct: alloc::collections::BTreeSet<usize> =
                (0..count).filter(|&j| fd.adjacent(i, j)).collect();
            assert_eq!(product_neighbors, direct, "vertex {i}");
        }
    }

    #[test]
    fn u1_membership_requires_w0_outside_the_image()
    {
        let table = BlockTable::build(&complete_graph(2), 3).unwrap();
        // hom tags: indices 3.. with images of size 2
        let h = 3u16;
        let im = table.image_mask(h);
        for w0 in 0..3u8 {
            assert_eq!(in_u1(&table, h, h, w0), im >> w0 & 1 == 0);
        }
        // constants never belong to U1
        assert!(!in_u1(&table, 0, h, 0));
    }

    #[test]
    fn constant_maps_induce_a_clique() {
        let fd = folded_exponential_double(2, 3, DoubleStage::G2, &limits()).unwrap();
        let mut ids = Vec::new();
        for c in 0..3u16 {
            let v = DoubleVertex {
                blocks: [c, c, c, c],
                apex: [c as u8, c as u8, c as u8],
            };
            ids.push(fd.encode(&v).expect("constant vertex is stage-valid"));
        }
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                assert!(fd.adjacent(a, b));
            }
        }
    }

    #[test]
    fn folddouble_witnesses_verify_on_the_implicit_graph() {
        use rand::{Rng, SeedableRng};
        // n = 3, m = 2: blocks of size 3 over two colors always repeat, so
        // every sampled map gets a nontrivial constant-block witness
        let n = 3;
        let base = double_mycielskian_base(n).unwrap();
        let imp = ImplicitExp::new(&base, 2);
        let lm = limits();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut nontrivial = 0;
        for _ in 0..40 {
            let f: Vec<u8> = (0..4 * n + 3).map(|_| rng.gen_range(0..2) as u8).collect();
            let (_, _, ft) = folddouble_witness(&f, n).expect("two colors on three vertices repeat");
            let report = crate::reductions::verify_fold_certificate(&imp, &f, &ft, &lm);
            assert!(report.holds, "f = {f:?}, ft = {ft:?}");
            assert_eq!(report.strength, Strength::Exhaustive);
            if ft != f {
                nontrivial += 1;
            }
        }
        assert!(nontrivial >= 30);
        // for n = 2 the construction degenerates to the map itself
        let f2 = [0u8, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0];
        let (_, _, ft2) = folddouble_witness(&f2, 2).unwrap();
        assert_eq!(ft2, f2.to_vec());
    }

    #[test]
    fn generalfold_witnesses_dominate_in_stage_g() {
        let fd = folded_exponential_double(2, 3, DoubleStage::G, &limits()).unwrap();
        let table = &fd.table;
        let mut tested = 0;
        for b00 in 0..table.tag_count() as u16 {
            for b10 in 0..table.tag_count() as u16 {
                if table.is_constant(b00) || table.is_constant(b10) || passes_ab(table, b00, b10)
                {
                    continue;
                }
                let v = DoubleVertex {
                    blocks: [b00, b10, 0, 1],
                    apex: [0, 1, 2],
                };
                let w = generalfold_witness(&fd, &v).expect("violating vertex has a witness");
                assert!(table.is_constant(w.blocks[1]));
                assert!(verify_leveled_certificate(&fd, &v, &w), "{b00},{b10}");
                tested += 1;
            }
        }
        assert!(tested >= 18, "covered {tested} violating pairs");
    }

    #[test]
    fn leveled_containment_matches_brute_enumeration() {
        use rand::{Rng, SeedableRng};
        let fd = folded_exponential_double(2, 2, DoubleStage::G, &limits()).unwrap();
        let count = fd.vertex_count();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let f = fd.decode(rng.gen_range(0..count));
            let g = fd.decode(rng.gen_range(0..count));
            let (comp, masks) = fd.neighbor_components(&f);
            let mut brute = true;
            for_each_neighbor(&fd, &comp, &masks, &mut |h| {
                if !fd.adjacent_vertices(&g, h) {
                    brute = false;
                }
                brute
            });
            assert_eq!(verify_leveled_certificate(&fd, &f, &g), brute);
        }
    }

    #[test]
    fn pruned_vertices_are_isolated_in_stage_g_for_small_case() {
        // n = 2, m = 2: every stage-G vertex with a non-constant block has
        // an empty neighborhood (the isolation behind the constants prune)
        let fd = folded_exponential_double(2, 2, DoubleStage::G, &limits()).unwrap();
        for i in 0..fd.vertex_count() {
            let v = fd.decode(i);
            let mixed = v.blocks.iter().any(|&b| !fd.table.is_constant(b));
            if mixed {
                assert!(fd.is_isolated(i), "vertex {i} should be isolated");
            }
        }
    }
}
