//! Brute-force ground truth for small instances.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::{CoherentConfiguration, PointMap, Rainbow};
use crate::error::{Precondition, Result};
use crate::matrix::ColoredSquareMatrix;
use crate::structure::check_irredundant;

pub const CLOSURE_ORACLE_MAX_POINTS: usize = 16;
pub const GRAPH_ISO_MAX_POINTS: usize = 40;
pub const ALGEBRAIC_MAX_INTERSPACES: usize = 14;
pub const COMBINATORIAL_MAX_FIBERS: usize = 9;

/// Coarsest coherent refinement, obtained by repeatedly splitting every class by the
/// vector of counts `|{w : uw ∈ R, wv ∈ S}|` over all class pairs `(R, S)`.
/// Class of an arrow and the nonzero entries `(R, S, count)` of its count vector.
type CountKey = (usize, Vec<(usize, usize, usize)>);

pub fn closure_oracle(r: &Rainbow) -> Result<ColoredSquareMatrix> {
    let n = r.n();
    if n > CLOSURE_ORACLE_MAX_POINTS {
        return Err(Precondition::SizeTooLarge(n).into());
    }
    let mut cls: Vec<usize> = r.matrix().colors().iter().map(|&c| c as usize).collect();
    let mut k = cls.iter().collect::<BTreeSet<_>>().len();
    loop {
        // key of uv: its class and the nonzero entries of its count vector over (R, S)
        let mut keys: Vec<CountKey> = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                for w in 0..n {
                    *counts.entry((cls[u * n + w], cls[w * n + v])).or_default() += 1;
                }
                keys.push((cls[u * n + v], counts.into_iter().map(|((a, b), c)| (a, b, c)).collect()));
            }
        }
        let distinct: BTreeSet<&CountKey> = keys.iter().collect();
        let new_k = distinct.len();
        let ranked: BTreeMap<&CountKey, usize> =
            distinct.into_iter().enumerate().map(|(i, key)| (key, i)).collect();
        let next: Vec<usize> = keys.iter().map(|key| ranked[key]).collect();
        if new_k == k {
            return Ok(ColoredSquareMatrix::new(n, next.into_iter().map(|c| c as u32).collect()).rerank());
        }
        cls = next;
        k = new_k;
    }
}

/// Backtracking isomorphism search between colored graphs. With `respect_colors` off,
/// vertex colors (loop colors) are ignored; arrow colors are always respected.
pub fn graph_iso(g: &ColoredSquareMatrix, h: &ColoredSquareMatrix, respect_colors: bool) -> Result<Option<PointMap>> {
    if g.n() != h.n() {
        return Ok(None);
    }
    let n = g.n();
    if n > GRAPH_ISO_MAX_POINTS {
        return Err(Precondition::SizeTooLarge(n).into());
    }
    let pair = |m: &ColoredSquareMatrix, u: usize, v: usize| -> u32 {
        if u == v && !respect_colors {
            u32::MAX
        } else {
            m.get(u, v)
        }
    };
    // joint color refinement on vertices
    let mut cg: Vec<usize> = (0..n).map(|v| pair(g, v, v) as usize).collect();
    let mut ch: Vec<usize> = (0..n).map(|v| pair(h, v, v) as usize).collect();
    loop {
        let sig = |m: &ColoredSquareMatrix, c: &[usize], v: usize| {
            let mut s: Vec<(u32, u32, usize)> = (0..n).filter(|&w| w != v).map(|w| (pair(m, v, w), pair(m, w, v), c[w])).collect();
            s.sort_unstable();
            (c[v], s)
        };
        let sg: Vec<_> = (0..n).map(|v| sig(g, &cg, v)).collect();
        let sh: Vec<_> = (0..n).map(|v| sig(h, &ch, v)).collect();
        let dict: BTreeSet<_> = sg.iter().chain(sh.iter()).cloned().collect();
        let rank: BTreeMap<_, usize> = dict.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        let ng: Vec<usize> = sg.iter().map(|s| rank[s]).collect();
        let nh: Vec<usize> = sh.iter().map(|s| rank[s]).collect();
        let mut hg = ng.clone();
        let mut hh = nh.clone();
        hg.sort_unstable();
        hh.sort_unstable();
        if hg != hh {
            return Ok(None);
        }
        let before = cg.iter().collect::<BTreeSet<_>>().len();
        let after = ng.iter().collect::<BTreeSet<_>>().len();
        cg = ng;
        ch = nh;
        if before == after {
            break;
        }
    }
    // order: rarest class first, then prefer vertices adjacent (by a non-majority color) to placed ones
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let class_size = |c: usize| cg.iter().filter(|&&x| x == c).count();
    while order.len() < n {
        let best = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = order.iter().filter(|&&w| pair(g, v, w) != pair(g, order[0], order[0]) ).count();
                (links, std::cmp::Reverse(class_size(cg[v])), std::cmp::Reverse(v))
            })
            .unwrap();
        placed[best] = true;
        order.push(best);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn search(
        i: usize,
        order: &[usize],
        g: &ColoredSquareMatrix,
        h: &ColoredSquareMatrix,
        cg: &[usize],
        ch: &[usize],
        pair: &dyn Fn(&ColoredSquareMatrix, usize, usize) -> u32,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let u = order[i];
        for x in 0..order.len() {
            if used[x] || ch[x] != cg[u] {
                continue;
            }
            let ok = order[..i].iter().all(|&w| {
                pair(g, u, w) == pair(h, x, map[w]) && pair(g, w, u) == pair(h, map[w], x)
            }) && pair(g, u, u) == pair(h, x, x);
            if !ok {
                continue;
            }
            map[u] = x;
            used[x] = true;
            if search(i + 1, order, g, h, cg, ch, pair, map, used) {
                return true;
            }
            used[x] = false;
            map[u] = usize::MAX;
        }
        false
    }
    if search(0, &order, g, h, &cg, &ch, &pair, &mut map, &mut used) {
        Ok(Some(PointMap::new(map).expect("search yields a bijection")))
    } else {
        Ok(None)
    }
}

/// A strict algebraic automorphism `f_S` with its switch set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchAutomorphism {
    /// Switched interspaces `(X, Y)`, `X < Y`.
    pub switched: Vec<(usize, usize)>,
    pub class_map: Vec<usize>,
}

fn non_uniform(c: &CoherentConfiguration) -> Vec<(usize, usize)> {
    let f = c.num_fibers();
    (0..f).flat_map(|x| (x + 1..f).map(move |y| (x, y))).filter(|&(x, y)| c.block(x, y).len() == 2).collect()
}

/// Class map of `f_S` for the switch set given as a bit mask over `edges`.
fn switch_map(c: &CoherentConfiguration, edges: &[(usize, usize)], mask: u64) -> Vec<usize> {
    let mut map: Vec<usize> = (0..c.num_classes()).collect();
    for (i, &(x, y)) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            for (a, b) in [(x, y), (y, x)] {
                let bl = c.block(a, b);
                map[bl[0]] = bl[1];
                map[bl[1]] = bl[0];
            }
        }
    }
    map
}

fn preserves_block_triple(c: &CoherentConfiguration, x: usize, y: usize, z: usize, f: &[usize]) -> bool {
    for &t in c.block(x, z) {
        for &r in c.block(x, y) {
            for &s in c.block(y, z) {
                if c.p(t, r, s) != c.p(f[t], f[r], f[s]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether switching exactly the interspaces in `switched` preserves every intersection number.
pub fn is_strict_algebraic_automorphism(c: &CoherentConfiguration, switched: &[(usize, usize)]) -> Result<bool> {
    if let Err(reason) = check_irredundant(c) {
        return Err(Precondition::NotIrredundant(reason).into());
    }
    let edges: Vec<(usize, usize)> = switched.iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
    if edges.iter().any(|&(x, y)| x == y || y >= c.num_fibers() || c.block(x, y).len() != 2) {
        return Err(Precondition::NotDeterminingInterspace.into());
    }
    if edges.len() > 64 {
        return Err(Precondition::TooManyInterspaces(edges.len()).into());
    }
    let map = switch_map(c, &edges, if edges.len() == 64 { u64::MAX } else { (1u64 << edges.len()) - 1 });
    let f = c.num_fibers();
    Ok((0..f).all(|x| (0..f).all(|y| (0..f).all(|z| preserves_block_triple(c, x, y, z, &map)))))
}

/// All switch maps `f_S` that preserve every intersection number.
pub fn enumerate_strict_algebraic_automorphisms(c: &CoherentConfiguration) -> Result<Vec<SwitchAutomorphism>> {
    if let Err(reason) = check_irredundant(c) {
        return Err(Precondition::NotIrredundant(reason).into());
    }
    let edges = non_uniform(c);
    if edges.len() > ALGEBRAIC_MAX_INTERSPACES {
        return Err(Precondition::TooManyInterspaces(edges.len()).into());
    }
    let f = c.num_fibers();
    let edge_id: BTreeMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let eid = |a: usize, b: usize| edge_id.get(&(a.min(b), a.max(b))).copied();
    // per fiber triple: the edges it involves and which local switch patterns are valid
    let mut triples: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    for x in 0..f {
        for y in 0..f {
            for z in 0..f {
                let mut involved: Vec<usize> = [eid(x, y), eid(y, z), eid(x, z)].into_iter().flatten().collect();
                involved.sort_unstable();
                involved.dedup();
                if involved.is_empty() {
                    continue;
                }
                let valid = (0..1u64 << involved.len())
                    .map(|local| {
                        let mut mask = 0u64;
                        for (j, &e) in involved.iter().enumerate() {
                            if local >> j & 1 == 1 {
                                mask |= 1 << e;
                            }
                        }
                        preserves_block_triple(c, x, y, z, &switch_map(c, &edges, mask))
                    })
                    .collect();
                triples.push((involved, valid));
            }
        }
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << edges.len() {
        let ok = triples.iter().all(|(inv, valid)| {
            let local = inv.iter().enumerate().fold(0usize, |acc, (j, &e)| acc | (((mask >> e) & 1) as usize) << j);
            valid[local]
        });
        if ok {
            out.push(SwitchAutomorphism {
                switched: edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect(),
                class_map: switch_map(c, &edges, mask),
            });
        }
    }
    Ok(out)
}

/// Permutations of a fiber's points fixing every class of its cell.
fn cell_group(c: &CoherentConfiguration, x: usize) -> Vec<Vec<usize>> {
    let pts = c.fiber(x);
    let k = pts.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let ok = (0..k).all(|i| (0..k).all(|j| c.class_of(pts[i], pts[j]) == c.class_of(pts[perm[i]], pts[perm[j]])));
        if ok {
            out.push(perm.iter().map(|&i| pts[i]).collect());
        }
        // next permutation in lexicographic order
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..k).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    out
}

/// Combinatorial automorphisms fixing every cell class, with the class maps they induce.
pub fn enumerate_strict_combinatorial_automorphisms(
    c: &CoherentConfiguration,
) -> Result<Vec<(PointMap, Vec<usize>)>> {
    if let Err(reason) = check_irredundant(c) {
        return Err(Precondition::NotIrredundant(reason).into());
    }
    let f = c.num_fibers();
    if f > COMBINATORIAL_MAX_FIBERS {
        return Err(Precondition::TooManyFibers(f).into());
    }
    let groups: Vec<Vec<Vec<usize>>> = (0..f).map(|x| cell_group(c, x)).collect();
    let n = c.n();
    let mut phi: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    fn consistent(c: &CoherentConfiguration, phi: &[usize], x: usize, y: usize) -> bool {
        let mut img: BTreeMap<usize, usize> = BTreeMap::new();
        for &u in c.fiber(x) {
            for &v in c.fiber(y) {
                let a = c.class_of(u, v);
                let b = c.class_of(phi[u], phi[v]);
                if *img.entry(a).or_insert(b) != b {
                    return false;
                }
            }
        }
        true
    }
    fn go(
        x: usize,
        c: &CoherentConfiguration,
        groups: &[Vec<Vec<usize>>],
        phi: &mut Vec<usize>,
        out: &mut Vec<(PointMap, Vec<usize>)>,
    ) {
        if x == groups.len() {
            let map = c.induced_class_map(phi).expect("checked block by block");
            out.push((PointMap::new(phi.clone()).expect("bijective"), map));
            return;
        }
        for g in &groups[x] {
            for (i, &p) in c.fiber(x).iter().enumerate() {
                phi[p] = g[i];
            }
            if (0..x).all(|y| consistent(c, phi, y, x) && consistent(c, phi, x, y)) {
                go(x + 1, c, groups, phi, out);
            }
        }
        for &p in c.fiber(x) {
            phi[p] = p;
        }
    }
    go(0, c, &groups, &mut phi, &mut out);
    Ok(out)
}

/// Whether every strict algebraic automorphism is induced by a combinatorial one.
pub fn separable_oracle_irredundant(c: &CoherentConfiguration) -> Result<bool> {
    let alg: BTreeSet<Vec<usize>> =
        enumerate_strict_algebraic_automorphisms(c)?.into_iter().map(|a| a.class_map).collect();
    let ind: BTreeSet<Vec<usize>> =
        enumerate_strict_combinatorial_automorphisms(c)?.into_iter().map(|(_, m)| m).collect();
    Ok(alg == ind)
}
