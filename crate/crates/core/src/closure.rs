//! Two-dimensional Weisfeiler-Leman refinement and coherent closure.

use std::collections::{BTreeMap, HashMap};

use crate::config::{CoherentConfiguration, Rainbow};
use crate::error::Result;
use crate::matrix::{rerank_first_occurrence, validate_colored_graph, ColoredSquareMatrix};
use crate::Error;

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub config: CoherentConfiguration,
    /// Input color id of every final class.
    pub lineage: Vec<usize>,
    /// Least `t` with a stable partition after `t` rounds.
    pub rounds: usize,
}

type Multiset = Vec<(u64, u32)>;

fn multiset(colors: &[u32], n: usize, u: usize, v: usize, buf: &mut Vec<u64>) -> Multiset {
    buf.clear();
    for w in 0..n {
        buf.push(((colors[u * n + w] as u64) << 32) | colors[w * n + v] as u64);
    }
    buf.sort_unstable();
    let mut out: Multiset = Vec::new();
    for &k in buf.iter() {
        match out.last_mut() {
            Some((lk, c)) if *lk == k => *c += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// One refinement round over several matrices with a shared signature dictionary.
/// New colors are the lexicographic rank of `(old color, sorted multiset)`.
fn joint_round(inputs: &[&[u32]], n: usize) -> Vec<Vec<u32>> {
    let mut buf = Vec::with_capacity(n);
    let mut intern: HashMap<(u32, Multiset), u32> = HashMap::new();
    let mut keys: Vec<(u32, Multiset)> = Vec::new();
    let mut tmp: Vec<Vec<u32>> = Vec::with_capacity(inputs.len());
    for colors in inputs {
        let mut ids = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                let key = (colors[u * n + v], multiset(colors, n, u, v, &mut buf));
                let next = keys.len() as u32;
                let id = *intern.entry(key.clone()).or_insert_with(|| {
                    keys.push(key);
                    next
                });
                ids.push(id);
            }
        }
        tmp.push(ids);
    }
    let mut order: Vec<u32> = (0..keys.len() as u32).collect();
    order.sort_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]));
    let mut rank = vec![0u32; keys.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    tmp.into_iter().map(|ids| ids.into_iter().map(|i| rank[i as usize]).collect()).collect()
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Every partition `c⁰, c¹, …, cᵗ` of the refinement, the last one being stable.
pub fn refinement_history(r: &Rainbow) -> Vec<Vec<u32>> {
    let n = r.n();
    let mut hist = vec![r.matrix().colors().to_vec()];
    loop {
        let cur = hist.last().unwrap();
        let before = count_distinct(cur);
        let next = joint_round(&[cur], n).pop().unwrap();
        let after = count_distinct(&next);
        hist.push(next);
        if after == before {
            return hist;
        }
    }
}

/// The coarsest coherent configuration refining `r`.
pub fn coherent_closure(r: &Rainbow) -> ClosureResult {
    let hist = refinement_history(r);
    let rounds = hist.len() - 1;
    let last = hist.last().unwrap();
    let (colors, _) = rerank_first_occurrence(last);
    let config = CoherentConfiguration::from_coherent_matrix(ColoredSquareMatrix::new(r.n(), colors));
    let lineage = (0..config.num_classes())
        .map(|c| {
            let (u, v) = config.representative(c);
            r.matrix().get(u, v) as usize
        })
        .collect();
    ClosureResult { config, lineage, rounds }
}

/// Closure of a raw colored graph; lineage refers to the graph's own colors.
pub fn closure_of_graph(g: &ColoredSquareMatrix) -> Result<ClosureResult> {
    let r = Rainbow::from_graph(g)?;
    let mut res = coherent_closure(&r);
    res.lineage = (0..res.config.num_classes())
        .map(|c| {
            let (u, v) = res.config.representative(c);
            g.get(u, v) as usize
        })
        .collect();
    Ok(res)
}

/// Class bijection between the closures of two WL2-equivalent graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    /// Class id in the closure of `g` ↦ class id in the closure of `h`.
    pub class_map: Vec<usize>,
    pub rounds: usize,
}

fn histogram(colors: &[u32]) -> Vec<(u32, usize)> {
    let mut h: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in colors {
        *h.entry(c).or_default() += 1;
    }
    h.into_iter().collect()
}

/// Joint refinement of `g` and `h`; `None` when some round's color histograms differ.
pub fn wl2_equivalent(g: &ColoredSquareMatrix, h: &ColoredSquareMatrix) -> Result<Option<EquivalenceWitness>> {
    for m in [g, h] {
        let d = validate_colored_graph(m);
        if !d.is_empty() {
            return Err(Error::InvalidColoring(d));
        }
    }
    if g.n() != h.n() {
        return Ok(None);
    }
    let n = g.n();
    let pair = |m: &ColoredSquareMatrix, u: usize, v: usize| ((m.get(u, v) as u64) << 32) | m.get(v, u) as u64;
    let mut keys: Vec<u64> = Vec::new();
    for m in [g, h] {
        for u in 0..n {
            for v in 0..n {
                keys.push(pair(m, u, v));
            }
        }
    }
    keys.sort_unstable();
    keys.dedup();
    let init = |m: &ColoredSquareMatrix| -> Vec<u32> {
        (0..n * n)
            .map(|i| keys.binary_search(&pair(m, i / n, i % n)).unwrap() as u32)
            .collect()
    };
    let (mut cg, mut ch) = (init(g), init(h));
    if histogram(&cg) != histogram(&ch) {
        return Ok(None);
    }
    let mut rounds = 0;
    loop {
        let before = count_distinct(&cg);
        let mut next = joint_round(&[&cg, &ch], n);
        let nh = next.pop().unwrap();
        let ng = next.pop().unwrap();
        rounds += 1;
        if histogram(&ng) != histogram(&nh) {
            return Ok(None);
        }
        let after = count_distinct(&ng);
        cg = ng;
        ch = nh;
        if after == before {
            break;
        }
    }
    let (_, joint_of_g) = rerank_first_occurrence(&cg);
    let (_, joint_of_h) = rerank_first_occurrence(&ch);
    let h_of_joint: HashMap<u32, usize> = joint_of_h.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let class_map = joint_of_g.iter().map(|c| h_of_joint[c]).collect();
    Ok(Some(EquivalenceWitness { class_map, rounds }))
}

/// Canonical WL2 fingerprints: two graphs get equal fingerprints from the same interner
/// exactly when they are WL2-equivalent.
#[derive(Default)]
pub struct Wl2Interner {
    ids: HashMap<(usize, u32, Multiset), u32>,
    initial: HashMap<(u32, u32), u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    pub rounds: usize,
    pub histogram: Vec<(u32, usize)>,
}

impl Wl2Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fingerprint(&mut self, g: &ColoredSquareMatrix) -> Fingerprint {
        let n = g.n();
        let mut colors: Vec<u32> = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                let next = self.initial.len() as u32;
                colors.push(*self.initial.entry((g.get(u, v), g.get(v, u))).or_insert(next));
            }
        }
        let mut buf = Vec::new();
        let mut round = 0;
        loop {
            round += 1;
            let before = count_distinct(&colors);
            let mut next = Vec::with_capacity(n * n);
            for u in 0..n {
                for v in 0..n {
                    let key = (round, colors[u * n + v], multiset(&colors, n, u, v, &mut buf));
                    let fresh = self.ids.len() as u32;
                    next.push(*self.ids.entry(key).or_insert(fresh));
                }
            }
            colors = next;
            if count_distinct(&colors) == before {
                return Fingerprint { rounds: round, histogram: histogram(&colors) };
            }
        }
    }
}
