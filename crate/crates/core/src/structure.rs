//! Cells, interspaces, determined matchings, fiber graph and the hypergraph of direct connections.

use std::collections::BTreeMap;
use std::fmt;

use crate::config::CoherentConfiguration;
use crate::error::{Error, Precondition, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellClass {
    Trivial1,
    Pair2,
    K3,
    DirC3,
    K4,
    F4,
    C4,
    DirC4,
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InterspaceTag {
    Uniform,
    Match2x2,
    /// 3×3: a matching and its complement.
    TwoOf3x3Matching,
    /// 3×3: three matchings.
    TwoOf3x3Factorization,
    TwoK12,
    FourK11,
    TwoK22,
    C8,
    /// Two matchings and a valency-2 class forming two 4-cycles.
    Three4x4a,
    /// Two matchings and a valency-2 class forming an 8-cycle.
    Three4x4b,
    /// Four matchings, any two forming two 4-cycles.
    Four4x4a,
    /// Four matchings, some two forming an 8-cycle.
    Four4x4b,
}

impl fmt::Display for InterspaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterspaceClass {
    pub tag: InterspaceTag,
    pub contains_matching: bool,
}

/// A matching class inside the cell of `fiber`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchingRef {
    pub fiber: usize,
    pub class: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connection {
    Direct,
    Skewed,
}

pub fn classify_cell(c: &CoherentConfiguration, x: usize) -> Result<CellClass> {
    let size = c.fiber(x).len();
    let classes = c.block(x, x);
    let rank = classes.len();
    let symmetric = classes.iter().all(|&r| c.meta(r).transpose == r);
    let tag = match (size, rank) {
        (1, 1) => CellClass::Trivial1,
        (2, 2) => CellClass::Pair2,
        (3, 2) => CellClass::K3,
        (3, 3) => CellClass::DirC3,
        (4, 2) => CellClass::K4,
        (4, 3) => CellClass::C4,
        (4, 4) if symmetric => CellClass::F4,
        (4, 4) => CellClass::DirC4,
        (s, _) if s > 4 => return Err(Error::FiberTooLarge(s)),
        _ => return Err(Error::Internal(format!("unexpected cell of size {size} and rank {rank}"))),
    };
    Ok(tag)
}

fn is_matching_class(c: &CoherentConfiguration, r: usize) -> bool {
    let m = c.meta(r);
    !m.reflexive && m.valency == 1 && c.meta(m.transpose).valency == 1
}

/// Connected components of the bipartite graph formed by the pairs of class `r`.
fn bipartite_components(c: &CoherentConfiguration, r: usize) -> usize {
    let m = c.meta(r);
    let xs = c.fiber(m.source);
    let ys = c.fiber(m.target);
    let a = xs.len();
    let mut uf = UnionFind::new(a + ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            if c.class_of(x, y) == r {
                uf.union(i, a + j);
            }
        }
    }
    uf.count()
}

fn matched_union_components(c: &CoherentConfiguration, r: usize, s: usize) -> usize {
    let m = c.meta(r);
    let xs = c.fiber(m.source);
    let ys = c.fiber(m.target);
    let a = xs.len();
    let mut uf = UnionFind::new(a + ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let k = c.class_of(x, y);
            if k == r || k == s {
                uf.union(i, a + j);
            }
        }
    }
    uf.count()
}

pub fn classify_interspace(c: &CoherentConfiguration, x: usize, y: usize) -> Result<InterspaceClass> {
    if x == y {
        return Err(Precondition::SameFiber.into());
    }
    let (a, b) = (c.fiber(x).len(), c.fiber(y).len());
    for s in [a, b] {
        if s > 4 {
            return Err(Error::FiberTooLarge(s));
        }
    }
    let classes = c.block(x, y);
    let k = classes.len();
    let contains_matching = classes.iter().any(|&r| is_matching_class(c, r));
    let unexpected = || Error::Internal(format!("unexpected {a}x{b} interspace with {k} classes"));
    let tag = if k == 1 {
        InterspaceTag::Uniform
    } else {
        match (a.min(b), a.max(b), k) {
            (2, 2, 2) => InterspaceTag::Match2x2,
            (2, 4, 2) => InterspaceTag::TwoK12,
            (3, 3, 2) => InterspaceTag::TwoOf3x3Matching,
            (3, 3, 3) => InterspaceTag::TwoOf3x3Factorization,
            (4, 4, 2) => {
                if contains_matching {
                    InterspaceTag::FourK11
                } else if bipartite_components(c, classes[0]) == 2 {
                    InterspaceTag::TwoK22
                } else {
                    InterspaceTag::C8
                }
            }
            (4, 4, 3) => {
                let r = *classes.iter().find(|&&r| c.meta(r).valency == 2).ok_or_else(unexpected)?;
                if bipartite_components(c, r) == 2 {
                    InterspaceTag::Three4x4a
                } else {
                    InterspaceTag::Three4x4b
                }
            }
            (4, 4, 4) => {
                let mut any_cycle8 = false;
                for i in 0..4 {
                    for j in i + 1..4 {
                        if matched_union_components(c, classes[i], classes[j]) == 1 {
                            any_cycle8 = true;
                        }
                    }
                }
                if any_cycle8 {
                    InterspaceTag::Four4x4b
                } else {
                    InterspaceTag::Four4x4a
                }
            }
            _ => return Err(unexpected()),
        }
    };
    Ok(InterspaceClass { tag, contains_matching })
}

/// Matching in the cell of `side` determined by class `r` of a 2K₁,₂, 2K₂,₂ or C₈ interspace.
pub fn determined_matching(c: &CoherentConfiguration, r: usize, side: usize) -> Result<MatchingRef> {
    if r >= c.num_classes() {
        return Err(Error::ClassOutOfRange(r));
    }
    let m = *c.meta(r);
    if m.source == m.target || (side != m.source && side != m.target) {
        return Err(Precondition::NotDeterminingInterspace.into());
    }
    let other = if side == m.target { m.source } else { m.target };
    let tag = classify_interspace(c, m.source, m.target)?.tag;
    let disjoint = match tag {
        InterspaceTag::TwoK22 => false,
        InterspaceTag::TwoK12 if c.fiber(side).len() == 4 => false,
        InterspaceTag::C8 => true,
        _ => return Err(Precondition::NotDeterminingInterspace.into()),
    };
    let nbhd = |p: usize| -> u32 {
        let mut bits = 0u32;
        for (i, &q) in c.fiber(other).iter().enumerate() {
            let k = if side == m.target { c.class_of(q, p) } else { c.class_of(p, q) };
            if k == r {
                bits |= 1 << i;
            }
        }
        bits
    };
    let pts = c.fiber(side);
    let related = |p: usize, q: usize| {
        let (a, b) = (nbhd(p), nbhd(q));
        if disjoint {
            a & b == 0
        } else {
            a == b
        }
    };
    let p0 = pts[0];
    let partner = pts[1..]
        .iter()
        .copied()
        .find(|&q| related(p0, q))
        .ok_or_else(|| Error::Internal("no partner for determined matching".into()))?;
    let class = c.class_of(p0, partner);
    if !is_matching_class(c, class) || c.meta(class).transpose != class {
        return Err(Error::Internal("determined pairs do not form a matching class".into()));
    }
    for &p in pts {
        for &q in pts {
            if p != q && (c.class_of(p, q) == class) != related(p, q) {
                return Err(Error::Internal("determined pairs do not form a matching class".into()));
            }
        }
    }
    Ok(MatchingRef { fiber: side, class })
}

/// Matching at `y` determined by the interspace between `x` and `y`.
pub fn interspace_matching(c: &CoherentConfiguration, x: usize, y: usize) -> Result<MatchingRef> {
    if x == y {
        return Err(Precondition::SameFiber.into());
    }
    let r = c.block(x, y)[0];
    determined_matching(c, r, y)
}

pub fn connection_kind(c: &CoherentConfiguration, x: usize, y: usize, z: usize) -> Result<Connection> {
    if x == z {
        return Err(Precondition::SameFiber.into());
    }
    let m1 = interspace_matching(c, x, y)?;
    let m2 = interspace_matching(c, z, y)?;
    Ok(if m1 == m2 { Connection::Direct } else { Connection::Skewed })
}

/// Fibers as vertices; an edge for every non-uniform interspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub adj: Vec<Vec<usize>>,
}

impl FiberGraph {
    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[x].binary_search(&y).is_ok()
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn edge_index(&self, x: usize, y: usize) -> Option<usize> {
        let key = (x.min(y), x.max(y));
        self.edges.binary_search(&key).ok()
    }

    /// Vertex sets of connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertices];
        let mut out = Vec::new();
        for s in 0..self.vertices {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

pub fn fiber_graph(c: &CoherentConfiguration) -> FiberGraph {
    let f = c.num_fibers();
    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); f];
    for x in 0..f {
        for y in x + 1..f {
            if c.block(x, y).len() > 1 {
                edges.push((x, y));
                adj[x].push(y);
                adj[y].push(x);
            }
        }
    }
    FiberGraph { vertices: f, edges, adj }
}

/// Clique partition of the fiber graph into families of directly connected fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DccHypergraph {
    /// Sorted fiber sets, in lexicographic order.
    pub hyperedges: Vec<Vec<usize>>,
    /// Per fiber: `(hyperedge, matching class)` pairs ordered by hyperedge index.
    pub incidence: Vec<Vec<(usize, usize)>>,
    /// Hyperedge of each fiber-graph edge (indexed like `FiberGraph::edges`).
    pub edge_hyperedge: Vec<usize>,
}

impl DccHypergraph {
    pub fn degree(&self, x: usize) -> usize {
        self.incidence[x].len()
    }
}

pub fn dcc(c: &CoherentConfiguration) -> Result<DccHypergraph> {
    if let Err(reason) = check_irredundant(c) {
        return Err(Precondition::NotIrredundant(reason).into());
    }
    let fg = fiber_graph(c);
    let mut uf = UnionFind::new(fg.edges.len());
    let mut by_key: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, &(x, y)) in fg.edges.iter().enumerate() {
        by_key.entry((y, interspace_matching(c, x, y)?.class)).or_default().push(e);
        by_key.entry((x, interspace_matching(c, y, x)?.class)).or_default().push(e);
    }
    for es in by_key.values() {
        for w in es.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..fg.edges.len() {
        groups.entry(uf.find(e)).or_default().push(e);
    }
    let mut hyper: Vec<(Vec<usize>, Vec<usize>)> = groups
        .into_values()
        .map(|es| {
            let mut fs: Vec<usize> = es.iter().flat_map(|&e| [fg.edges[e].0, fg.edges[e].1]).collect();
            fs.sort_unstable();
            fs.dedup();
            (fs, es)
        })
        .collect();
    hyper.sort();
    let mut edge_hyperedge = vec![0; fg.edges.len()];
    for (h, (fs, es)) in hyper.iter().enumerate() {
        for &e in es {
            edge_hyperedge[e] = h;
        }
        if es.len() != fs.len() * (fs.len() - 1) / 2 {
            return Err(Error::Internal(format!("hyperedge {fs:?} is not a clique of direct connections")));
        }
    }
    let hyperedges: Vec<Vec<usize>> = hyper.into_iter().map(|(fs, _)| fs).collect();
    let mut incidence = vec![Vec::new(); c.num_fibers()];
    for (h, fs) in hyperedges.iter().enumerate() {
        for &x in fs {
            let y = *fs.iter().find(|&&y| y != x).unwrap();
            incidence[x].push((h, interspace_matching(c, y, x)?.class));
        }
    }
    for (i, a) in hyperedges.iter().enumerate() {
        for b in &hyperedges[i + 1..] {
            if a.iter().filter(|x| b.contains(x)).count() > 1 {
                return Err(Error::Internal("two hyperedges share more than one fiber".into()));
            }
        }
    }
    if incidence.iter().any(|v| v.len() > 3) {
        return Err(Error::Internal("fiber of hypergraph degree above 3".into()));
    }
    Ok(DccHypergraph { hyperedges, incidence, edge_hyperedge })
}

/// Splits into indecomposable components (connected components of the fiber graph).
pub fn decompose_direct_sum(c: &CoherentConfiguration) -> Vec<CoherentConfiguration> {
    fiber_graph(c)
        .components()
        .iter()
        .map(|fs| c.restrict(fs).expect("fiber sets are aligned"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrredundantReason {
    Empty,
    FiberSize(usize),
    Interspace(InterspaceTag),
    Decomposable,
}

impl fmt::Display for IrredundantReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrredundantReason::Empty => write!(f, "empty"),
            IrredundantReason::FiberSize(s) => write!(f, "fiber size {s}"),
            IrredundantReason::Interspace(t) => write!(f, "{t} interspace"),
            IrredundantReason::Decomposable => write!(f, "decomposable"),
        }
    }
}

/// `Ok` iff indecomposable with all fibers of size 4 and all non-uniform interspaces 2K₂,₂.
pub fn check_irredundant(c: &CoherentConfiguration) -> std::result::Result<(), IrredundantReason> {
    if c.num_fibers() == 0 {
        return Err(IrredundantReason::Empty);
    }
    if let Some(f) = c.fibers().iter().find(|f| f.len() != 4) {
        return Err(IrredundantReason::FiberSize(f.len()));
    }
    let fg = fiber_graph(c);
    for &(x, y) in &fg.edges {
        let tag = classify_interspace(c, x, y).map_err(|_| IrredundantReason::FiberSize(5))?.tag;
        if tag != InterspaceTag::TwoK22 {
            return Err(IrredundantReason::Interspace(tag));
        }
    }
    if fg.components().len() > 1 {
        return Err(IrredundantReason::Decomposable);
    }
    Ok(())
}

pub fn is_irredundant(c: &CoherentConfiguration) -> (bool, Option<IrredundantReason>) {
    match check_irredundant(c) {
        Ok(()) => (true, None),
        Err(r) => (false, Some(r)),
    }
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}
