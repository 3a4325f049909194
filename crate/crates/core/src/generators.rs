//! Instance families: configurations from partial linear spaces, skew-connected
//! configurations, cyclic (n₃)-configurations and named geometries.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::config::CoherentConfiguration;
use crate::error::{Error, Precondition, Result};
use crate::matrix::ColoredSquareMatrix;

/// Points `0..npoints` and lines (point sets). Two lines meet in at most one point,
/// every point lies on at most three lines, and the incidence graph is connected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialLinearSpace {
    npoints: usize,
    lines: Vec<Vec<usize>>,
}

impl PartialLinearSpace {
    pub fn new(npoints: usize, lines: Vec<Vec<usize>>) -> Result<PartialLinearSpace> {
        let bad = |s: String| Error::Precondition(Precondition::InvalidPls(s));
        let mut norm = Vec::with_capacity(lines.len());
        for (i, l) in lines.iter().enumerate() {
            let set: BTreeSet<usize> = l.iter().copied().collect();
            if set.len() != l.len() {
                return Err(bad(format!("line {i} repeats a point")));
            }
            if set.len() < 2 {
                return Err(bad(format!("line {i} has fewer than 2 points")));
            }
            if let Some(&p) = set.iter().find(|&&p| p >= npoints) {
                return Err(bad(format!("line {i} has point {p} out of range")));
            }
            norm.push(set.into_iter().collect::<Vec<_>>());
        }
        for i in 0..norm.len() {
            for j in i + 1..norm.len() {
                if norm[i].iter().filter(|p| norm[j].contains(p)).count() > 1 {
                    return Err(bad(format!("lines {i} and {j} share two points")));
                }
            }
        }
        let mut deg = vec![0; npoints];
        for l in &norm {
            for &p in l {
                deg[p] += 1;
            }
        }
        if deg.iter().any(|&d| d > 3) {
            return Err(Precondition::DegreeTooLarge.into());
        }
        let mut uf: Vec<usize> = (0..npoints).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for l in &norm {
            for w in l.windows(2) {
                let (a, b) = (find(&mut uf, w[0]), find(&mut uf, w[1]));
                uf[a.max(b)] = a.min(b);
            }
        }
        if npoints == 0 || (0..npoints).any(|p| find(&mut uf, p) != 0) {
            return Err(bad("incidence graph is not connected".into()));
        }
        Ok(PartialLinearSpace { npoints, lines: norm })
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn degree(&self, p: usize) -> usize {
        self.lines.iter().filter(|l| l.contains(&p)).count()
    }

    /// Indices of the lines through `p`, in line order.
    pub fn lines_at(&self, p: usize) -> Vec<usize> {
        (0..self.lines.len()).filter(|&i| self.lines[i].contains(&p)).collect()
    }

    pub fn parse(text: &str) -> Result<PartialLinearSpace> {
        let mut it = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (hl, h) = it.next().ok_or_else(|| err(1, "empty input"))?;
        let toks: Vec<&str> = h.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "pls" {
            return Err(err(hl, "expected header `pls <npoints> <nlines>`"));
        }
        let np: usize = toks[1].parse().map_err(|_| err(hl, "bad point count"))?;
        let nl: usize = toks[2].parse().map_err(|_| err(hl, "bad line count"))?;
        let mut lines = Vec::with_capacity(nl);
        for (ln, l) in it {
            let pts: std::result::Result<Vec<usize>, _> = l.split_whitespace().map(str::parse).collect();
            lines.push(pts.map_err(|_| err(ln, "non-integer point id"))?);
        }
        if lines.len() != nl {
            return Err(err(hl, "line count differs from header"));
        }
        PartialLinearSpace::new(np, lines)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("pls {} {}\n", self.npoints, self.lines.len());
        for l in &self.lines {
            let v: Vec<String> = l.iter().map(usize::to_string).collect();
            s.push_str(&v.join(" "));
            s.push('\n');
        }
        s
    }

    /// Brute-force hypergraph isomorphism test (point bijections with pruning).
    pub fn is_isomorphic(&self, other: &PartialLinearSpace) -> bool {
        if self.npoints != other.npoints || self.lines.len() != other.lines.len() {
            return false;
        }
        let mut a_sizes: Vec<usize> = self.lines.iter().map(Vec::len).collect();
        let mut b_sizes: Vec<usize> = other.lines.iter().map(Vec::len).collect();
        a_sizes.sort_unstable();
        b_sizes.sort_unstable();
        if a_sizes != b_sizes {
            return false;
        }
        let target: BTreeSet<Vec<usize>> = other.lines.iter().cloned().collect();
        let n = self.npoints;
        let deg_a: Vec<usize> = (0..n).map(|p| self.degree(p)).collect();
        let deg_b: Vec<usize> = (0..n).map(|p| other.degree(p)).collect();
        // lines of `self` that become fully assigned once point i is assigned
        let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, l) in self.lines.iter().enumerate() {
            closing[*l.iter().max().unwrap()].push(i);
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        #[allow(clippy::too_many_arguments)]
        fn go(
            i: usize,
            s: &PartialLinearSpace,
            target: &BTreeSet<Vec<usize>>,
            deg_a: &[usize],
            deg_b: &[usize],
            closing: &[Vec<usize>],
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if i == map.len() {
                return true;
            }
            for q in 0..map.len() {
                if used[q] || deg_a[i] != deg_b[q] {
                    continue;
                }
                map[i] = q;
                let ok = closing[i].iter().all(|&li| {
                    let mut img: Vec<usize> = s.lines[li].iter().map(|&p| map[p]).collect();
                    img.sort_unstable();
                    target.contains(&img)
                });
                if ok {
                    used[q] = true;
                    if go(i + 1, s, target, deg_a, deg_b, closing, map, used) {
                        return true;
                    }
                    used[q] = false;
                }
            }
            map[i] = usize::MAX;
            false
        }
        go(0, self, &target, &deg_a, &deg_b, &closing, &mut map, &mut used)
    }
}

/// Cell type planted at a point of degree 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellChoice {
    F4,
    C4,
    DirC4,
}

/// Index of the part of `a` (a point of a 4-point fiber, read as an element of
/// the Klein group) for the matching `{a, a ^ mask}`.
pub fn matching_part(mask: usize, a: usize) -> usize {
    const FUNCTIONAL: [usize; 4] = [0, 2, 1, 3];
    ((a & FUNCTIONAL[mask]).count_ones() & 1) as usize
}

/// The directed 4-cycle with diagonals `{a, a ^ mask}`.
fn directed_cycle(mask: usize) -> [usize; 4] {
    let others: Vec<usize> = (1..4).filter(|&x| x != mask).collect();
    let (x, y) = (others[0], others[1]);
    let mut next = [0; 4];
    next[0] = x;
    next[x] = mask;
    next[mask] = y;
    next[y] = 0;
    next
}

/// Builds the configuration with one 4-point fiber per point (points `4p..4p+3`).
/// The k-th line through a point gets the matching with mask `k + 1`; two points on a
/// common line are joined by a 2K₂,₂ interspace determining those matchings; all
/// other interspaces are uniform.
pub fn pls_to_config(d: &PartialLinearSpace, cells: &BTreeMap<usize, CellChoice>) -> Result<CoherentConfiguration> {
    let np = d.npoints();
    for (&p, &ch) in cells {
        if p >= np || (ch != CellChoice::F4 && d.degree(p) != 1) {
            return Err(Precondition::CellOptionNotDegreeOne(p).into());
        }
    }
    let mut mask: HashMap<(usize, usize), usize> = HashMap::new();
    for p in 0..np {
        for (k, li) in d.lines_at(p).into_iter().enumerate() {
            mask.insert((p, li), k + 1);
        }
    }
    let mut line_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (li, l) in d.lines().iter().enumerate() {
        for &p in l {
            for &q in l {
                if p != q {
                    line_of.insert((p, q), li);
                }
            }
        }
    }
    let mut ids: HashMap<(usize, usize, usize), u32> = HashMap::new();
    let mut id = |key: (usize, usize, usize)| -> u32 {
        let next = ids.len() as u32;
        *ids.entry(key).or_insert(next)
    };
    let n = 4 * np;
    let mut colors = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            let (p, a, q, b) = (u / 4, u % 4, v / 4, v % 4);
            let class = if p == q {
                let x = a ^ b;
                let kind = match cells.get(&p).copied().unwrap_or(CellChoice::F4) {
                    CellChoice::F4 => x,
                    CellChoice::C4 => {
                        let m = mask[&(p, d.lines_at(p)[0])];
                        if x == 0 || x == m {
                            x
                        } else {
                            4
                        }
                    }
                    CellChoice::DirC4 => {
                        let m = mask[&(p, d.lines_at(p)[0])];
                        if x == 0 || x == m {
                            x
                        } else if directed_cycle(m)[a] == b {
                            4
                        } else {
                            5
                        }
                    }
                };
                (p, p, kind)
            } else if let Some(&li) = line_of.get(&(p, q)) {
                let same = matching_part(mask[&(p, li)], a) == matching_part(mask[&(q, li)], b);
                (p, q, same as usize)
            } else {
                (p, q, 0)
            };
            colors.push(id(class));
        }
    }
    CoherentConfiguration::from_matrix(&ColoredSquareMatrix::new(n, colors))
}

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<SimpleGraph> {
        let mut set = BTreeSet::new();
        for &(u, v) in &edges {
            if u == v || u >= n || v >= n || !set.insert((u.min(v), u.max(v))) {
                return Err(Error::Precondition(Precondition::InvalidPls(format!("bad edge {u} {v}"))));
            }
        }
        Ok(SimpleGraph { n, edges: edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect() })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// `graph <n>` followed by `e <u> <v>` lines.
    pub fn parse(text: &str) -> Result<SimpleGraph> {
        let mut it = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (hl, h) = it.next().ok_or_else(|| err(1, "empty input"))?;
        let toks: Vec<&str> = h.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "graph" {
            return Err(err(hl, "expected header `graph <n>`"));
        }
        let n: usize = toks[1].parse().map_err(|_| err(hl, "bad vertex count"))?;
        let mut edges = Vec::new();
        for (ln, l) in it {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 || t[0] != "e" {
                return Err(err(ln, "expected `e <u> <v>`"));
            }
            let u: usize = t[1].parse().map_err(|_| err(ln, "bad vertex id"))?;
            let v: usize = t[2].parse().map_err(|_| err(ln, "bad vertex id"))?;
            edges.push((u, v));
        }
        SimpleGraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("graph {}\n", self.n);
        for &(u, v) in &self.edges {
            s.push_str(&format!("e {u} {v}\n"));
        }
        s
    }

    pub fn path(n: usize) -> SimpleGraph {
        SimpleGraph { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn cycle(n: usize) -> SimpleGraph {
        let mut g = Self::path(n);
        g.edges.push((0, n - 1));
        g
    }

    pub fn complete(n: usize) -> SimpleGraph {
        SimpleGraph { n, edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect() }
    }

    pub fn complete_bipartite(a: usize, b: usize) -> SimpleGraph {
        SimpleGraph { n: a + b, edges: (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect() }
    }

    /// Generalized Petersen graph GP(n, k).
    pub fn generalized_petersen(n: usize, k: usize) -> SimpleGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n));
            edges.push((i, n + i));
            edges.push((n + i, n + (i + k) % n));
        }
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect::<BTreeSet<_>>();
        SimpleGraph { n: 2 * n, edges: edges.into_iter().collect() }
    }

    pub fn petersen() -> SimpleGraph {
        Self::generalized_petersen(5, 2)
    }

    pub fn mobius_kantor() -> SimpleGraph {
        Self::generalized_petersen(8, 3)
    }
}

/// The configuration whose lines are the edges of `g` (all connections skewed).
pub fn skew_config(g: &SimpleGraph) -> Result<CoherentConfiguration> {
    if g.max_degree() > 3 {
        return Err(Precondition::DegreeTooLarge.into());
    }
    let d = PartialLinearSpace::new(g.n, g.edges.iter().map(|&(u, v)| vec![u, v]).collect()).map_err(|e| match e {
        Error::Precondition(Precondition::InvalidPls(_)) => Error::Precondition(Precondition::Disconnected),
        e => e,
    })?;
    pls_to_config(&d, &BTreeMap::new())
}

/// Lines `{i + o : o ∈ offsets}` mod `n`.
pub fn cyclic_pls_with(n: usize, offsets: [usize; 3]) -> Result<PartialLinearSpace> {
    if n < 7 {
        return Err(Precondition::CyclicTooSmall.into());
    }
    let lines = (0..n).map(|i| offsets.iter().map(|&o| (i + o) % n).collect()).collect();
    PartialLinearSpace::new(n, lines)
}

/// The cyclic (n₃)-configuration with lines `{i, i+2, i+3}`.
pub fn cyclic_pls(n: usize) -> Result<PartialLinearSpace> {
    cyclic_pls_with(n, [0, 2, 3])
}

pub fn fano() -> PartialLinearSpace {
    cyclic_pls(7).expect("n = 7 is valid")
}

pub fn mobius_kantor() -> PartialLinearSpace {
    cyclic_pls(8).expect("n = 8 is valid")
}

pub fn pappus() -> PartialLinearSpace {
    let one_based = [
        [1, 2, 3],
        [4, 5, 6],
        [7, 8, 9],
        [1, 5, 9],
        [3, 5, 7],
        [1, 4, 8],
        [2, 4, 7],
        [2, 6, 9],
        [3, 6, 8],
    ];
    let lines = one_based.iter().map(|l| l.iter().map(|&p| p - 1).collect()).collect();
    PartialLinearSpace::new(9, lines).expect("the Pappus configuration is valid")
}

/// The 16-point configuration over the complete graph on four fibers.
pub fn t16() -> CoherentConfiguration {
    skew_config(&SimpleGraph::complete(4)).expect("K4 is cubic and connected")
}

/// Two triangles `{0,1,2}`, `{3,4,5}` and six 2-point lines.
pub fn two_triangles_pls() -> PartialLinearSpace {
    let lines = vec![
        vec![0, 1, 2],
        vec![3, 4, 5],
        vec![0, 3],
        vec![0, 4],
        vec![1, 3],
        vec![1, 5],
        vec![2, 4],
        vec![2, 5],
    ];
    PartialLinearSpace::new(6, lines).expect("valid")
}

/// Three triangles and nine 2-point lines joining consecutive triangles by matchings.
pub fn mixed_pls() -> PartialLinearSpace {
    let mut lines = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
    for t in 0..3 {
        for i in 0..3 {
            lines.push(vec![3 * t + i, (3 * t + 3 + i) % 9]);
        }
    }
    PartialLinearSpace::new(9, lines).expect("valid")
}

pub fn example_two_triangles() -> CoherentConfiguration {
    pls_to_config(&two_triangles_pls(), &BTreeMap::new()).expect("valid")
}

pub fn example_mixed() -> CoherentConfiguration {
    pls_to_config(&mixed_pls(), &BTreeMap::new()).expect("valid")
}

/// The hypergraph of direct connections of an irredundant configuration, as a partial linear space.
pub fn dcc_as_pls(c: &CoherentConfiguration) -> Result<PartialLinearSpace> {
    let h = crate::structure::dcc(c)?;
    PartialLinearSpace::new(c.num_fibers(), h.hyperedges)
}
