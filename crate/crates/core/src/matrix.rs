//! Colored square matrices and the `.ccm` text format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// An `n × n` matrix of color ids. Row `u`, column `v` is the color of the pair `uv`;
/// the diagonal holds loop colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredSquareMatrix {
    n: usize,
    colors: Vec<u32>,
    names: BTreeMap<u32, String>,
}

/// A single problem found by [`validate_colored_graph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    /// The arrow `uv` carries a color that also appears on a loop.
    LoopColorOnArrow { u: usize, v: usize, color: u32 },
    /// Color ids are not `0..k`; `id` is unused although a larger id is used.
    MissingColorId { id: u32 },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::LoopColorOnArrow { u, v, color } => {
                write!(f, "loop color reused on arrow ({u},{v}) color {color}")
            }
            Diagnostic::MissingColorId { id } => write!(f, "color ids not dense: {id} unused"),
        }
    }
}

impl ColoredSquareMatrix {
    pub fn new(n: usize, colors: Vec<u32>) -> Self {
        assert_eq!(colors.len(), n * n, "color vector must have n*n entries");
        ColoredSquareMatrix { n, colors, names: BTreeMap::new() }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let n = rows.len();
        let mut colors = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            colors.extend_from_slice(r);
        }
        Self::new(n, colors)
    }

    /// Builds a matrix by evaluating `f(u, v)` on every pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut colors = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                colors.push(f(u, v));
            }
        }
        Self::new(n, colors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.colors[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, c: u32) {
        self.colors[u * self.n + v] = c;
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.colors[u * self.n..(u + 1) * self.n]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn names(&self) -> &BTreeMap<u32, String> {
        &self.names
    }

    pub fn set_name(&mut self, id: u32, label: impl Into<String>) {
        self.names.insert(id, label.into());
    }

    /// One more than the largest color id (0 for the empty matrix).
    pub fn num_colors(&self) -> usize {
        self.colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Vertex color classes: points grouped by loop color, ordered by color id.
    pub fn vertex_classes(&self) -> Vec<Vec<usize>> {
        let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            by.entry(self.get(v, v)).or_default().push(v);
        }
        by.into_values().collect()
    }

    /// Largest vertex color class.
    pub fn color_multiplicity(&self) -> usize {
        self.vertex_classes().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Re-ranks color ids by first occurrence in row-major order. Names follow their colors.
    pub fn rerank(&self) -> ColoredSquareMatrix {
        let (colors, old_of_new) = rerank_first_occurrence(&self.colors);
        let mut names = BTreeMap::new();
        for (new, old) in old_of_new.iter().enumerate() {
            if let Some(l) = self.names.get(old) {
                names.insert(new as u32, l.clone());
            }
        }
        ColoredSquareMatrix { n: self.n, colors, names }
    }

    /// Image under the point map `perm` (point `u` goes to `perm[u]`).
    pub fn permute(&self, perm: &[usize]) -> ColoredSquareMatrix {
        assert_eq!(perm.len(), self.n);
        let mut out = vec![0; self.n * self.n];
        for u in 0..self.n {
            for v in 0..self.n {
                out[perm[u] * self.n + perm[v]] = self.get(u, v);
            }
        }
        ColoredSquareMatrix { n: self.n, colors: out, names: self.names.clone() }
    }

    /// True when both matrices induce the same partition of pairs.
    pub fn same_partition(&self, other: &ColoredSquareMatrix) -> bool {
        self.n == other.n && self.rerank().colors == other.rerank().colors
    }

    pub fn parse_ccm(text: &str) -> Result<ColoredSquareMatrix> {
        parse_ccm(text)
    }

    pub fn to_ccm(&self) -> String {
        let mut s = format!("ccm {}\n", self.n);
        for u in 0..self.n {
            let row: Vec<String> = self.row(u).iter().map(u32::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        for (id, l) in &self.names {
            s.push_str(&format!("name {id} {l}\n"));
        }
        s
    }
}

/// Dense re-ranking by first occurrence. Returns the new ids and, for each new id, the old one.
pub fn rerank_first_occurrence(colors: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    let mut old_of_new = Vec::new();
    let out = colors
        .iter()
        .map(|&c| {
            *map.entry(c).or_insert_with(|| {
                old_of_new.push(c);
                (old_of_new.len() - 1) as u32
            })
        })
        .collect();
    (out, old_of_new)
}

/// Checks loop/arrow color disjointness and density of color ids.
pub fn validate_colored_graph(m: &ColoredSquareMatrix) -> Vec<Diagnostic> {
    let n = m.n();
    let mut diags = Vec::new();
    let loops: BTreeSet<u32> = (0..n).map(|v| m.get(v, v)).collect();
    for u in 0..n {
        for v in 0..n {
            if u != v && loops.contains(&m.get(u, v)) {
                diags.push(Diagnostic::LoopColorOnArrow { u, v, color: m.get(u, v) });
            }
        }
    }
    let used: BTreeSet<u32> = m.colors().iter().copied().collect();
    if let Some(&max) = used.iter().next_back() {
        for id in 0..max {
            if !used.contains(&id) {
                diags.push(Diagnostic::MissingColorId { id });
            }
        }
    }
    diags
}

/// Recolors each pair `uv` by the pair `(c(uv), c(vu))`, ranked lexicographically.
pub fn normalize_transpose(m: &ColoredSquareMatrix) -> Result<ColoredSquareMatrix> {
    let diags = validate_colored_graph(m);
    if !diags.is_empty() {
        return Err(Error::InvalidColoring(diags));
    }
    let n = m.n();
    let pairs: BTreeSet<(u32, u32)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).map(|(u, v)| (m.get(u, v), m.get(v, u))).collect();
    let rank: BTreeMap<(u32, u32), u32> =
        pairs.into_iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
    Ok(ColoredSquareMatrix::from_fn(n, |u, v| rank[&(m.get(u, v), m.get(v, u))]))
}

fn parse_ccm(text: &str) -> Result<ColoredSquareMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("ccm") {
        return Err(err(hl, "expected header `ccm <n>`"));
    }
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(hl, "bad point count"))?;
    if it.next().is_some() {
        return Err(err(hl, "trailing tokens in header"));
    }
    let mut colors = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (ln, row) = lines.next().ok_or_else(|| err(hl, "missing matrix rows"))?;
        let vals: std::result::Result<Vec<u32>, _> = row.split_whitespace().map(str::parse).collect();
        let vals = vals.map_err(|_| err(ln, "non-integer color"))?;
        if vals.len() != n {
            return Err(err(ln, "row length differs from n"));
        }
        colors.extend(vals);
    }
    let mut m = ColoredSquareMatrix::new(n, colors);
    for (ln, l) in lines {
        let mut parts = l.splitn(3, char::is_whitespace);
        if parts.next() != Some("name") {
            return Err(err(ln, "unexpected line after matrix"));
        }
        let id: u32 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln, "bad color id in name line"))?;
        let label = parts.next().unwrap_or("").trim();
        if label.is_empty() {
            return Err(err(ln, "empty label"));
        }
        m.set_name(id, label);
    }
    Ok(m)
}
