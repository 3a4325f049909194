//! Rainbows, coherent configurations and point maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{normalize_transpose, rerank_first_occurrence, validate_colored_graph, ColoredSquareMatrix};

/// A partition of `V²` with loop-only loop classes that is closed under transposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rainbow {
    m: ColoredSquareMatrix,
    transpose: Vec<u32>,
}

impl Rainbow {
    /// Checks properties (A) and (B) on a matrix with dense color ids.
    pub fn new(m: ColoredSquareMatrix) -> Result<Rainbow> {
        let diags = validate_colored_graph(&m);
        if !diags.is_empty() {
            return Err(Error::InvalidColoring(diags));
        }
        let n = m.n();
        let k = m.num_colors();
        let mut transpose = vec![u32::MAX; k];
        for u in 0..n {
            for v in 0..n {
                let (a, b) = (m.get(u, v), m.get(v, u));
                let t = &mut transpose[a as usize];
                if *t == u32::MAX {
                    *t = b;
                } else if *t != b {
                    return Err(Error::NotRainbow(format!(
                        "class {a} is not transpose-closed: pair ({v},{u}) has color {b}, expected {t}"
                    )));
                }
            }
        }
        Ok(Rainbow { m, transpose })
    }

    /// Transpose-normalizes a colored graph and wraps it.
    pub fn from_graph(g: &ColoredSquareMatrix) -> Result<Rainbow> {
        Rainbow::new(normalize_transpose(g)?)
    }

    pub fn matrix(&self) -> &ColoredSquareMatrix {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn num_classes(&self) -> usize {
        self.transpose.len()
    }

    pub fn transpose_of(&self, c: u32) -> u32 {
        self.transpose[c as usize]
    }
}

/// Per-class metadata of a coherent configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationMeta {
    pub source: usize,
    pub target: usize,
    /// `d(R)`: number of out-neighbours of any source point.
    pub valency: usize,
    pub transpose: usize,
    pub reflexive: bool,
    pub size: usize,
}

/// Evidence that property (C) fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceWitness {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub first: (usize, usize),
    pub first_count: usize,
    pub second: (usize, usize),
    pub second_count: usize,
}

impl fmt::Display for CoherenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p^{t}_({r},{s}) is {a} at {p:?} but {b} at {q:?}",
            t = self.t,
            r = self.r,
            s = self.s,
            a = self.first_count,
            p = self.first,
            b = self.second_count,
            q = self.second
        )
    }
}

#[derive(Debug)]
pub struct CoherentConfiguration {
    rainbow: Rainbow,
    fibers: Vec<Vec<usize>>,
    point_fiber: Vec<usize>,
    meta: Vec<RelationMeta>,
    reps: Vec<(usize, usize)>,
    blocks: Vec<Vec<usize>>,
    tensor: Vec<OnceLock<Vec<(u32, u32, u32)>>>,
}

impl Clone for CoherentConfiguration {
    fn clone(&self) -> Self {
        CoherentConfiguration {
            rainbow: self.rainbow.clone(),
            fibers: self.fibers.clone(),
            point_fiber: self.point_fiber.clone(),
            meta: self.meta.clone(),
            reps: self.reps.clone(),
            blocks: self.blocks.clone(),
            tensor: (0..self.meta.len()).map(|_| OnceLock::new()).collect(),
        }
    }
}

impl PartialEq for CoherentConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.rainbow.m.colors() == other.rainbow.m.colors() && self.n() == other.n()
    }
}

impl Eq for CoherentConfiguration {}

fn pair_key(a: u32, b: u32) -> u64 {
    ((a as u64) << 32) | b as u64
}

/// Sorted sparse histogram of `(c(uw), c(wv))` over all `w`.
fn triangle_counts(m: &ColoredSquareMatrix, u: usize, v: usize, buf: &mut Vec<u64>) -> Vec<(u64, u32)> {
    buf.clear();
    let ru = m.row(u);
    for (w, &a) in ru.iter().enumerate() {
        buf.push(pair_key(a, m.get(w, v)));
    }
    buf.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &k in buf.iter() {
        match out.last_mut() {
            Some((lk, c)) if *lk == k => *c += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// Least key where two sorted histograms differ, with both counts.
fn first_difference(a: &[(u64, u32)], b: &[(u64, u32)]) -> Option<(u64, u32, u32)> {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return None,
            (Some(&(k, c)), None) => return Some((k, c, 0)),
            (None, Some(&(k, c))) => return Some((k, 0, c)),
            (Some(&(ka, ca)), Some(&(kb, cb))) => {
                if ka == kb {
                    if ca != cb {
                        return Some((ka, ca, cb));
                    }
                    i += 1;
                    j += 1;
                } else if ka < kb {
                    return Some((ka, ca, 0));
                } else {
                    return Some((kb, 0, cb));
                }
            }
        }
    }
}

/// Checks property (C) and returns the configuration with relation metadata.
pub fn verify_coherence(r: &Rainbow) -> Result<CoherentConfiguration> {
    let m = &r.m;
    let n = m.n();
    let k = r.num_classes();
    let mut reps = vec![(usize::MAX, usize::MAX); k];
    for u in 0..n {
        for v in 0..n {
            let c = m.get(u, v) as usize;
            if reps[c].0 == usize::MAX {
                reps[c] = (u, v);
            }
        }
    }
    let mut buf = Vec::with_capacity(n);
    let rep_counts: Vec<Vec<(u64, u32)>> =
        reps.iter().map(|&(u, v)| triangle_counts(m, u, v, &mut buf)).collect();
    let mut best: Option<CoherenceWitness> = None;
    for u in 0..n {
        for v in 0..n {
            let t = m.get(u, v) as usize;
            if reps[t] == (u, v) {
                continue;
            }
            let counts = triangle_counts(m, u, v, &mut buf);
            if let Some((key, ca, cb)) = first_difference(&rep_counts[t], &counts) {
                let w = CoherenceWitness {
                    r: (key >> 32) as usize,
                    s: (key & 0xffff_ffff) as usize,
                    t,
                    first: reps[t],
                    first_count: ca as usize,
                    second: (u, v),
                    second_count: cb as usize,
                };
                let better = match &best {
                    None => true,
                    Some(b) => (w.r, w.s, w.t) < (b.r, b.s, b.t),
                };
                if better {
                    best = Some(w);
                }
            }
        }
    }
    if let Some(w) = best {
        return Err(Error::NotCoherent(Box::new(w)));
    }
    Ok(CoherentConfiguration::assemble(r.clone(), reps))
}

impl CoherentConfiguration {
    /// Builds metadata for a rainbow already known to be coherent.
    fn assemble(rainbow: Rainbow, reps: Vec<(usize, usize)>) -> CoherentConfiguration {
        let m = &rainbow.m;
        let n = m.n();
        let k = rainbow.num_classes();
        let mut by_loop: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            by_loop.entry(m.get(v, v)).or_default().push(v);
        }
        let mut fibers: Vec<Vec<usize>> = by_loop.into_values().collect();
        fibers.sort_by_key(|f| f[0]);
        let mut point_fiber = vec![0; n];
        for (i, f) in fibers.iter().enumerate() {
            for &p in f {
                point_fiber[p] = i;
            }
        }
        let mut size = vec![0usize; k];
        for &c in m.colors() {
            size[c as usize] += 1;
        }
        let nf = fibers.len();
        let mut blocks = vec![Vec::new(); nf * nf];
        let meta: Vec<RelationMeta> = (0..k)
            .map(|c| {
                let (u, v) = reps[c];
                let source = point_fiber[u];
                let target = point_fiber[v];
                blocks[source * nf + target].push(c);
                RelationMeta {
                    source,
                    target,
                    valency: size[c] / fibers[source].len(),
                    transpose: rainbow.transpose[c] as usize,
                    reflexive: u == v,
                    size: size[c],
                }
            })
            .collect();
        CoherentConfiguration {
            tensor: (0..k).map(|_| OnceLock::new()).collect(),
            rainbow,
            fibers,
            point_fiber,
            meta,
            reps,
            blocks,
        }
    }

    /// Re-ranks a coherent partition and assembles it without re-checking (C).
    pub(crate) fn from_coherent_matrix(m: ColoredSquareMatrix) -> CoherentConfiguration {
        let (colors, _) = rerank_first_occurrence(m.colors());
        let m = ColoredSquareMatrix::new(m.n(), colors);
        let rainbow = Rainbow::new(m).expect("coherent partitions are rainbows");
        let n = rainbow.n();
        let mut reps = vec![(usize::MAX, usize::MAX); rainbow.num_classes()];
        for u in 0..n {
            for v in 0..n {
                let c = rainbow.m.get(u, v) as usize;
                if reps[c].0 == usize::MAX {
                    reps[c] = (u, v);
                }
            }
        }
        CoherentConfiguration::assemble(rainbow, reps)
    }

    /// Parses a matrix, checks it is a coherent configuration, and re-ranks it.
    pub fn from_matrix(m: &ColoredSquareMatrix) -> Result<CoherentConfiguration> {
        let r = Rainbow::new(m.rerank())?;
        verify_coherence(&r)
    }

    pub fn n(&self) -> usize {
        self.rainbow.n()
    }

    pub fn rainbow(&self) -> &Rainbow {
        &self.rainbow
    }

    pub fn matrix(&self) -> &ColoredSquareMatrix {
        &self.rainbow.m
    }

    pub fn num_classes(&self) -> usize {
        self.meta.len()
    }

    #[inline]
    pub fn class_of(&self, u: usize, v: usize) -> usize {
        self.rainbow.m.get(u, v) as usize
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn num_fibers(&self) -> usize {
        self.fibers.len()
    }

    pub fn fiber(&self, x: usize) -> &[usize] {
        &self.fibers[x]
    }

    pub fn fiber_of(&self, p: usize) -> usize {
        self.point_fiber[p]
    }

    pub fn meta(&self, c: usize) -> &RelationMeta {
        &self.meta[c]
    }

    pub fn metas(&self) -> &[RelationMeta] {
        &self.meta
    }

    pub fn representative(&self, c: usize) -> (usize, usize) {
        self.reps[c]
    }

    /// Classes inside `X × Y`, in increasing id order.
    pub fn block(&self, x: usize, y: usize) -> &[usize] {
        &self.blocks[x * self.fibers.len() + y]
    }

    /// The reflexive class of fiber `x`.
    pub fn diagonal_class(&self, x: usize) -> usize {
        let p = self.fibers[x][0];
        self.class_of(p, p)
    }

    pub fn max_fiber_size(&self) -> usize {
        self.fibers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `p^T_{RS}`; zero for non-collocated triples.
    pub fn intersection_number(&self, t: usize, r: usize, s: usize) -> Result<usize> {
        let k = self.num_classes();
        for c in [t, r, s] {
            if c >= k {
                return Err(Error::ClassOutOfRange(c));
            }
        }
        Ok(self.p(t, r, s))
    }

    /// Unchecked `p^T_{RS}`.
    pub fn p(&self, t: usize, r: usize, s: usize) -> usize {
        let row = self.tensor_row(t);
        let key = (r as u32, s as u32);
        match row.binary_search_by(|&(a, b, _)| (a, b).cmp(&key)) {
            Ok(i) => row[i].2 as usize,
            Err(_) => 0,
        }
    }

    /// Non-zero entries `(R, S, p^T_{RS})` for a fixed `T`, sorted by `(R, S)`.
    pub fn tensor_row(&self, t: usize) -> &[(u32, u32, u32)] {
        self.tensor[t].get_or_init(|| {
            let (u, v) = self.reps[t];
            let mut buf = Vec::new();
            triangle_counts(&self.rainbow.m, u, v, &mut buf)
                .into_iter()
                .map(|(k, c)| ((k >> 32) as u32, (k & 0xffff_ffff) as u32, c))
                .collect()
        })
    }

    /// Subconfiguration on the union of the given fibers (indices into [`fibers`](Self::fibers)).
    pub fn restrict(&self, fibers: &[usize]) -> Result<CoherentConfiguration> {
        Ok(self.restrict_mapped(fibers)?.config)
    }

    /// Like [`restrict`](Self::restrict), also reporting where points and classes came from.
    pub fn restrict_mapped(&self, fibers: &[usize]) -> Result<Restriction> {
        let mut pts: Vec<usize> = Vec::new();
        for &x in fibers {
            if x >= self.fibers.len() {
                return Err(Error::NotFiberAligned);
            }
            pts.extend_from_slice(&self.fibers[x]);
        }
        self.restrict_points(&pts)
    }

    /// Subconfiguration on a point subset, which must be a union of fibers.
    pub fn restrict_points(&self, points: &[usize]) -> Result<Restriction> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let n = self.n();
        let mut inside = vec![false; n];
        for &p in &pts {
            if p >= n {
                return Err(Error::NotFiberAligned);
            }
            inside[p] = true;
        }
        for f in &self.fibers {
            let c = f.iter().filter(|&&p| inside[p]).count();
            if c != 0 && c != f.len() {
                return Err(Error::NotFiberAligned);
            }
        }
        let sub: Vec<u32> = pts
            .iter()
            .flat_map(|&u| pts.iter().map(move |&v| (u, v)))
            .map(|(u, v)| self.class_of(u, v) as u32)
            .collect();
        let (colors, old_of_new) = rerank_first_occurrence(&sub);
        let m = ColoredSquareMatrix::new(pts.len(), colors);
        let config = CoherentConfiguration::from_coherent_matrix(m);
        Ok(Restriction {
            config,
            points: pts,
            class_origin: old_of_new.into_iter().map(|c| c as usize).collect(),
        })
    }

    /// Image under a point bijection, re-ranked, plus the induced class map (old id → new id).
    pub fn apply_point_map(&self, phi: &PointMap) -> Result<(CoherentConfiguration, Vec<usize>)> {
        if phi.len() != self.n() {
            return Err(Error::NotBijective);
        }
        let image = self.matrix().permute(phi.forward());
        let (colors, old_of_new) = rerank_first_occurrence(image.colors());
        let mut class_map = vec![0; self.num_classes()];
        for (new, &old) in old_of_new.iter().enumerate() {
            class_map[old as usize] = new;
        }
        let config = CoherentConfiguration::from_coherent_matrix(ColoredSquareMatrix::new(self.n(), colors));
        Ok((config, class_map))
    }

    /// Class permutation induced by a point map that is an automorphism, or `None`.
    pub fn induced_class_map(&self, phi: &[usize]) -> Option<Vec<usize>> {
        let k = self.num_classes();
        let mut map = vec![usize::MAX; k];
        let n = self.n();
        for u in 0..n {
            for v in 0..n {
                let a = self.class_of(u, v);
                let b = self.class_of(phi[u], phi[v]);
                if map[a] == usize::MAX {
                    map[a] = b;
                } else if map[a] != b {
                    return None;
                }
            }
        }
        Some(map)
    }
}

/// Result of restricting a configuration to a union of fibers.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub config: CoherentConfiguration,
    /// Original point id of each new point.
    pub points: Vec<usize>,
    /// Original class id of each new class.
    pub class_origin: Vec<usize>,
}

/// A bijection on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointMap {
    forward: Vec<usize>,
}

impl PointMap {
    pub fn new(forward: Vec<usize>) -> Result<PointMap> {
        let mut seen = vec![false; forward.len()];
        for &x in &forward {
            if x >= forward.len() || seen[x] {
                return Err(Error::NotBijective);
            }
            seen[x] = true;
        }
        Ok(PointMap { forward })
    }

    pub fn identity(n: usize) -> PointMap {
        PointMap { forward: (0..n).collect() }
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.forward[p]
    }

    pub fn inverse(&self) -> PointMap {
        let mut inv = vec![0; self.forward.len()];
        for (i, &x) in self.forward.iter().enumerate() {
            inv[x] = i;
        }
        PointMap { forward: inv }
    }

    /// `self` after `other`: `p ↦ self(other(p))`.
    pub fn compose(&self, other: &PointMap) -> PointMap {
        PointMap { forward: other.forward.iter().map(|&p| self.forward[p]).collect() }
    }
}
