//! The 16-vertex census: black/white colorings of the truncated tetrahedron, their
//! orbits under its automorphism group, and the WL2-equivalent graph pairs they encode.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::closure::{wl2_equivalent, Fingerprint, Wl2Interner};
use crate::config::CoherentConfiguration;
use crate::error::{Error, Precondition, Result};
use crate::generators::t16;
use crate::irredundant::build_companion;
use crate::matrix::ColoredSquareMatrix;
use crate::oracle::graph_iso;
use crate::reduction::decide_amenable;
use crate::structure::interspace_matching;

pub const NUM_VERTICES: usize = 12;
/// Arrow colors of census graphs.
pub const NON_EDGE: u32 = 4;
pub const EDGE: u32 = 5;

/// `(n¹² + 6n⁷ + 3n⁶ + 8n⁴ + 6n³) / 24`, the number of `n`-colorings of the truncated
/// tetrahedron up to symmetry.
pub fn polya_count(ncolors: u32) -> Result<u128> {
    let n = ncolors as u128;
    let pow = |e: u32| n.checked_pow(e);
    let terms = [(1, 12), (6, 7), (3, 6), (8, 4), (6, 3)];
    let mut sum: u128 = 0;
    for (k, e) in terms {
        sum = pow(e)
            .and_then(|p| p.checked_mul(k))
            .and_then(|t| sum.checked_add(t))
            .ok_or(Precondition::SizeTooLarge(ncolors as usize))?;
    }
    Ok(sum / 24)
}

/// Vertex `(i, j)`, `i ≠ j`: the corner of triangle `i` facing triangle `j`.
/// Index `3i + c` where `j` is the `c`-th element of `{0,1,2,3} ∖ {i}`.
pub fn vertex_index(i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < 4 && j < 4);
    3 * i + if j < i { j } else { j - 1 }
}

pub fn vertex_pair(v: usize) -> (usize, usize) {
    let (i, c) = (v / 3, v % 3);
    (i, if c < i { c } else { c + 1 })
}

/// Edges of the truncated tetrahedron: triangle sides and the six cross edges.
pub fn tetra_edges() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..4 {
        out.push((3 * i, 3 * i + 1));
        out.push((3 * i, 3 * i + 2));
        out.push((3 * i + 1, 3 * i + 2));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            out.push((vertex_index(i, j), vertex_index(j, i)));
        }
    }
    out
}

fn all_s4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (0..i).all(|j| p[i] != p[j])) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The 24 automorphisms of the truncated tetrahedron as vertex permutations,
/// `(i, j) ↦ (σi, σj)` for `σ ∈ S₄`.
pub fn tetra_automorphisms() -> Vec<[usize; NUM_VERTICES]> {
    all_s4()
        .into_iter()
        .map(|s| {
            let mut p = [0; NUM_VERTICES];
            for (v, slot) in p.iter_mut().enumerate() {
                let (i, j) = vertex_pair(v);
                *slot = vertex_index(s[i], s[j]);
            }
            p
        })
        .collect()
}

pub fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for s in 0..p.len() {
        if !seen[s] {
            cycles += 1;
            let mut v = s;
            while !seen[v] {
                seen[v] = true;
                v = p[v];
            }
        }
    }
    cycles
}

/// Black (`true`) / white coloring of the 12 vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TetraColoring(pub [bool; NUM_VERTICES]);

impl TetraColoring {
    pub fn from_mask(mask: u16) -> TetraColoring {
        let mut b = [false; NUM_VERTICES];
        for (v, x) in b.iter_mut().enumerate() {
            *x = mask >> v & 1 == 1;
        }
        TetraColoring(b)
    }

    pub fn all_white() -> TetraColoring {
        TetraColoring([false; NUM_VERTICES])
    }

    pub fn black(&self, i: usize, j: usize) -> bool {
        self.0[vertex_index(i, j)]
    }

    pub fn black_count(&self, i: usize) -> usize {
        (0..4).filter(|&j| j != i && self.black(i, j)).count()
    }

    /// Image under a vertex permutation: vertex `p[v]` gets the color of `v`.
    pub fn permuted(&self, p: &[usize; NUM_VERTICES]) -> TetraColoring {
        let mut b = [false; NUM_VERTICES];
        for v in 0..NUM_VERTICES {
            b[p[v]] = self.0[v];
        }
        TetraColoring(b)
    }

    /// Least member of the orbit in lexicographic order of the color sequence.
    pub fn canonical(&self, group: &[[usize; NUM_VERTICES]]) -> TetraColoring {
        group.iter().map(|p| self.permuted(p)).min().expect("group is non-empty")
    }

    pub fn parse(s: &str) -> Result<TetraColoring> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != NUM_VERTICES {
            return Err(Error::Parse { line: 1, msg: format!("expected {NUM_VERTICES} colors") });
        }
        let mut b = [false; NUM_VERTICES];
        for (x, ch) in b.iter_mut().zip(chars) {
            *x = match ch {
                'b' | '1' => true,
                'w' | '0' => false,
                _ => return Err(Error::Parse { line: 1, msg: format!("bad color {ch:?}") }),
            };
        }
        Ok(TetraColoring(b))
    }
}

impl fmt::Display for TetraColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { 'b' } else { 'w' })?;
        }
        Ok(())
    }
}

/// One representative per orbit (the least member), sorted.
pub fn enumerate_coloring_orbits() -> Vec<TetraColoring> {
    let group = tetra_automorphisms();
    let reps: BTreeSet<TetraColoring> =
        (0..1u16 << NUM_VERTICES).map(|m| TetraColoring::from_mask(m).canonical(&group)).collect();
    let reps: Vec<TetraColoring> = reps.into_iter().collect();
    assert_eq!(reps.len() as u128, polya_count(2).unwrap(), "orbit count disagrees with the cycle index");
    reps
}

/// Census graph `G` of a coloring on the 16 points of 𝒯 and its companion `H`, which
/// differs from `G` by the switch of the interspace between fibers 0 and 1.
pub fn materialize_pair(t: &TetraColoring) -> (ColoredSquareMatrix, ColoredSquareMatrix) {
    let c = t16();
    let g = census_graph(&c, t);
    let mut h = g.clone();
    for &u in c.fiber(0) {
        for &v in c.fiber(1) {
            let flip = if g.get(u, v) == EDGE { NON_EDGE } else { EDGE };
            h.set(u, v, flip);
            h.set(v, u, flip);
        }
    }
    (g, h)
}

fn census_graph(c: &CoherentConfiguration, t: &TetraColoring) -> ColoredSquareMatrix {
    let mut g = build_companion(c).expect("t16 is irredundant").graph;
    for i in 0..4 {
        // cell classes of the black matchings at fiber i; with two of them their
        // union is the 4-cycle whose diagonals form the white matching
        let black: Vec<usize> = (0..4)
            .filter(|&j| j != i && t.black(i, j))
            .map(|j| interspace_matching(c, j, i).expect("2K22 interspace").class)
            .collect();
        for &u in c.fiber(i) {
            for &v in c.fiber(i) {
                if u != v && black.contains(&c.class_of(u, v)) {
                    g.set(u, v, EDGE);
                }
            }
        }
    }
    g
}

/// Underlying simple graph adjacency (`EDGE` arrows).
pub fn adjacency(g: &ColoredSquareMatrix) -> Vec<Vec<bool>> {
    (0..g.n()).map(|u| (0..g.n()).map(|v| u != v && g.get(u, v) == EDGE).collect()).collect()
}

pub fn has_k4(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    for a in 0..n {
        for b in a + 1..n {
            if !adj[a][b] {
                continue;
            }
            for c in b + 1..n {
                if !adj[a][c] || !adj[b][c] {
                    continue;
                }
                if (c + 1..n).any(|d| adj[a][d] && adj[b][d] && adj[c][d]) {
                    return true;
                }
            }
        }
    }
    false
}

/// Parameters `(n, k, λ, μ)` when the graph is strongly regular.
pub fn srg_parameters(adj: &[Vec<bool>]) -> Option<(usize, usize, usize, usize)> {
    let n = adj.len();
    let deg: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let k = *deg.first()?;
    if deg.iter().any(|&d| d != k) {
        return None;
    }
    let (mut lambda, mut mu) = (None, None);
    for u in 0..n {
        for v in u + 1..n {
            let common = (0..n).filter(|&w| adj[u][w] && adj[v][w]).count();
            let slot = if adj[u][v] { &mut lambda } else { &mut mu };
            match *slot {
                None => *slot = Some(common),
                Some(x) if x != common => return None,
                _ => {}
            }
        }
    }
    Some((n, k, lambda.unwrap_or(0), mu.unwrap_or(0)))
}

#[derive(Clone, Debug)]
pub struct ShrikhandeRook {
    pub shrikhande: ColoredSquareMatrix,
    pub rook: ColoredSquareMatrix,
}

/// The all-white census pair, sorted by which member contains a 4-clique.
pub fn shrikhande_rook_pair() -> ShrikhandeRook {
    let (g, h) = materialize_pair(&TetraColoring::all_white());
    if has_k4(&adjacency(&g)) {
        ShrikhandeRook { shrikhande: h, rook: g }
    } else {
        ShrikhandeRook { shrikhande: g, rook: h }
    }
}

#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub class: usize,
    pub coloring: TetraColoring,
    pub g: ColoredSquareMatrix,
    pub h: ColoredSquareMatrix,
    pub wl2_equivalent: bool,
    pub isomorphic: bool,
    pub g_amenable: bool,
    pub h_amenable: bool,
}

impl CensusEntry {
    pub fn verified(&self) -> bool {
        self.wl2_equivalent && !self.isomorphic && !self.g_amenable && !self.h_amenable
    }
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub entries: Vec<CensusEntry>,
}

impl CensusReport {
    pub fn classes(&self) -> usize {
        self.entries.len()
    }

    pub fn graphs(&self) -> usize {
        2 * self.entries.len()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("class\tcoloring\twl2_equivalent\tisomorphic\tamenable_a\tamenable_b\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                e.class, e.coloring, e.wl2_equivalent, e.isomorphic, e.g_amenable, e.h_amenable
            ));
        }
        s
    }
}

fn verify_entry(class: usize, coloring: TetraColoring) -> Result<CensusEntry> {
    let (g, h) = materialize_pair(&coloring);
    let entry = CensusEntry {
        class,
        coloring,
        wl2_equivalent: wl2_equivalent(&g, &h)?.is_some(),
        isomorphic: graph_iso(&g, &h, true)?.is_some(),
        g_amenable: decide_amenable(&g)?.is_amenable(),
        h_amenable: decide_amenable(&h)?.is_amenable(),
        g,
        h,
    };
    if !entry.verified() {
        return Err(Error::Internal(format!("census pair for coloring {coloring} failed verification")));
    }
    Ok(entry)
}

/// Materializes and verifies all orbit representatives.
pub fn census16() -> Result<CensusReport> {
    let reps = enumerate_coloring_orbits();
    let entries = reps.into_par_iter().enumerate().map(|(k, t)| verify_entry(k, t)).collect::<Result<Vec<_>>>()?;
    Ok(CensusReport { entries })
}

/// Runs the census and writes `class_<k>_a.ccm`, `class_<k>_b.ccm` and `report.tsv` into `out`.
pub fn census16_to_dir(out: &Path) -> Result<CensusReport> {
    let report = census16()?;
    fs::create_dir_all(out)?;
    for e in &report.entries {
        fs::write(out.join(format!("class_{}_a.ccm", e.class)), e.g.to_ccm())?;
        fs::write(out.join(format!("class_{}_b.ccm", e.class)), e.h.to_ccm())?;
    }
    fs::write(out.join("report.tsv"), report.to_tsv())?;
    Ok(report)
}

/// WL2 fingerprint invariant under renaming of the four vertex colors.
pub fn fingerprint_up_to_vertex_renaming(interner: &mut Wl2Interner, g: &ColoredSquareMatrix) -> Fingerprint {
    all_s4()
        .into_iter()
        .map(|s| {
            let r = ColoredSquareMatrix::from_fn(g.n(), |u, v| {
                let c = g.get(u, v);
                if u == v && (c as usize) < 4 {
                    s[c as usize] as u32
                } else {
                    c
                }
            });
            interner.fingerprint(&r)
        })
        .min()
        .expect("S4 is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_indexing_round_trips() {
        for v in 0..NUM_VERTICES {
            let (i, j) = vertex_pair(v);
            assert_eq!(vertex_index(i, j), v);
        }
    }

    #[test]
    fn coloring_text() {
        let t = TetraColoring::from_mask(0b101);
        assert_eq!(t.to_string(), "bwbwwwwwwwww");
        assert_eq!(TetraColoring::parse("bwbwwwwwwwww").unwrap(), t);
        assert!(TetraColoring::parse("bw").is_err());
    }

    #[test]
    fn tetra_has_18_edges_and_is_cubic() {
        let e = tetra_edges();
        assert_eq!(e.len(), 18);
        for v in 0..NUM_VERTICES {
            assert_eq!(e.iter().filter(|&&(a, b)| a == v || b == v).count(), 3);
        }
    }
}
