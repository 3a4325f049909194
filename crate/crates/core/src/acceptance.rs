//! Instance generators and the end-to-end acceptance checks shared by the test suite
//! and the `selftest` command.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::census::{adjacency, census16, has_k4, polya_count, shrikhande_rook_pair, srg_parameters};
use crate::closure::{closure_of_graph, coherent_closure, wl2_equivalent};
use crate::config::{CoherentConfiguration, Rainbow};
use crate::error::Result;
use crate::generators::{
    cyclic_pls, cyclic_pls_with, example_mixed, example_two_triangles, fano, mobius_kantor, pappus, pls_to_config,
    skew_config, t16, CellChoice, PartialLinearSpace, SimpleGraph,
};
use crate::irredundant::{decide_separable_irredundant, saa_order_log2, scac_order_log2_all_f4};
use crate::matrix::{normalize_transpose, ColoredSquareMatrix};
use crate::oracle::{
    closure_oracle, enumerate_strict_algebraic_automorphisms, enumerate_strict_combinatorial_automorphisms, graph_iso,
    separable_oracle_irredundant,
};
use crate::reduction::{decide_amenable, decide_separable};
use crate::structure::{dcc, fiber_graph};

/// Random colored graph on `n` vertices with vertex classes of at most `max_mult` points
/// and `palette` arrow colors, some arrows asymmetric.
pub fn random_colored_graph(rng: &mut impl Rng, n: usize, max_mult: usize, palette: usize) -> ColoredSquareMatrix {
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(rng);
    let mut vclass = vec![0u32; n];
    let mut next = 0;
    let mut i = 0;
    while i < n {
        let size = rng.gen_range(1..=max_mult.max(1)).min(n - i);
        for &v in &verts[i..i + size] {
            vclass[v] = next;
        }
        next += 1;
        i += size;
    }
    let asym = rng.gen_bool(0.3);
    let mut g = ColoredSquareMatrix::from_fn(n, |u, v| if u == v { vclass[u] } else { 0 });
    for u in 0..n {
        for v in u + 1..n {
            let a = next + rng.gen_range(0..palette.max(1)) as u32;
            let b = if asym { next + rng.gen_range(0..palette.max(1)) as u32 } else { a };
            g.set(u, v, a);
            g.set(v, u, b);
        }
    }
    g.rerank()
}

/// Random coarsening of a coherent configuration: loop classes stay, arrow classes are
/// merged into at most `palette` colors; points are shuffled.
pub fn random_coarsening(rng: &mut impl Rng, c: &CoherentConfiguration, palette: usize) -> ColoredSquareMatrix {
    let k = c.num_classes();
    let loops = c.num_fibers() as u32;
    let color: Vec<u32> = (0..k)
        .map(|z| {
            let m = c.meta(z);
            if m.reflexive {
                m.source as u32
            } else {
                loops + rng.gen_range(0..palette.max(1)) as u32
            }
        })
        .collect();
    let mut perm: Vec<usize> = (0..c.n()).collect();
    perm.shuffle(rng);
    let g = ColoredSquareMatrix::from_fn(c.n(), |u, v| color[c.class_of(u, v)]);
    g.permute(&perm).rerank()
}

/// Configurations on at most 15 points with 4-point fibers and non-trivial interspaces.
fn small_structured_sources() -> Vec<CoherentConfiguration> {
    let mut out = vec![
        t16().restrict(&[0, 1, 2]).expect("aligned"),
        t16().restrict(&[0, 1]).expect("aligned"),
        skew_config(&SimpleGraph::path(3)).expect("valid"),
        skew_config(&SimpleGraph::path(2)).expect("valid"),
    ];
    let tri = PartialLinearSpace::new(3, vec![vec![0, 1, 2]]).expect("valid");
    for choice in [CellChoice::F4, CellChoice::C4, CellChoice::DirC4] {
        let cells: BTreeMap<usize, CellChoice> = [(0, choice), (2, CellChoice::C4)].into_iter().collect();
        out.push(pls_to_config(&tri, &cells).expect("valid"));
    }
    out
}

/// Colored graph on at most `max_n` vertices with color multiplicity at most 4: either
/// fully random or a coarsening of a small structured configuration.
pub fn random_small_graph(rng: &mut impl Rng, max_n: usize) -> ColoredSquareMatrix {
    if max_n >= 12 && rng.gen_bool(0.4) {
        let sources = small_structured_sources();
        let c = &sources[rng.gen_range(0..sources.len())];
        let palette = rng.gen_range(1..=3);
        return random_coarsening(rng, c, palette);
    }
    let n = rng.gen_range(1..=max_n);
    let palette = rng.gen_range(1..=3);
    random_colored_graph(rng, n, 4, palette)
}

/// Random connected partial linear space on at most `max_points` points with lines of
/// 2 to 4 points.
pub fn random_pls(rng: &mut impl Rng, max_points: usize) -> PartialLinearSpace {
    loop {
        let n = rng.gen_range(2..=max_points.max(2));
        let mut lines: Vec<Vec<usize>> = Vec::new();
        for _ in 0..4 * n {
            let size = *[2, 2, 3, 3, 4].choose(rng).unwrap();
            if size > n {
                continue;
            }
            let mut pts: Vec<usize> = (0..n).collect();
            pts.shuffle(rng);
            let mut cand = lines.clone();
            cand.push(pts[..size].to_vec());
            let ok = cand.iter().enumerate().all(|(i, a)| {
                cand[..i].iter().all(|b| a.iter().filter(|p| b.contains(p)).count() <= 1)
            }) && (0..n).all(|p| cand.iter().filter(|l| l.contains(&p)).count() <= 3);
            if ok {
                lines = cand;
            }
            if let Ok(d) = PartialLinearSpace::new(n, lines.clone()) {
                if rng.gen_bool(0.3) {
                    return d;
                }
            }
        }
        if let Ok(d) = PartialLinearSpace::new(n, lines) {
            return d;
        }
    }
}

/// Random cell choices at the degree-1 points of `d`.
pub fn random_cells(rng: &mut impl Rng, d: &PartialLinearSpace) -> BTreeMap<usize, CellChoice> {
    (0..d.npoints())
        .filter(|&p| d.degree(p) == 1)
        .map(|p| (p, *[CellChoice::F4, CellChoice::C4, CellChoice::DirC4].choose(rng).unwrap()))
        .collect()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn canonical_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut e: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b]))).collect();
        e.sort_unstable();
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best.unwrap_or_default()
}

/// Connected graphs on 2 to `max_n` vertices with maximum degree at most 3, one per
/// isomorphism type.
pub fn small_subcubic_graphs(max_n: usize) -> Vec<SimpleGraph> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut seen = BTreeSet::new();
        for mask in 0u32..1 << all.len() {
            let edges: Vec<(usize, usize)> = all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            if (0..n).any(|v| edges.iter().filter(|&&(a, b)| a == v || b == v).count() > 3) || !connected(n, &edges) {
                continue;
            }
            if seen.insert(canonical_edges(n, &edges)) {
                out.push(SimpleGraph::new(n, edges).expect("valid"));
            }
        }
    }
    out
}

/// Irredundant configurations with at most 5 fibers: skew configurations over all small
/// subcubic graphs and configurations of random partial linear spaces.
pub fn irredundant_instances(seed: u64, random_count: usize) -> Vec<CoherentConfiguration> {
    let mut out: Vec<CoherentConfiguration> =
        small_subcubic_graphs(5).iter().map(|g| skew_config(g).expect("subcubic and connected")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_count {
        let d = random_pls(&mut rng, 5);
        let cells = random_cells(&mut rng, &d);
        out.push(pls_to_config(&d, &cells).expect("valid partial linear space"));
    }
    out
}

/// Whether the switch set `s` (fiber-graph edges) is allowed by the bipartite law: inside
/// every dcc hyperedge `C`, `s` is empty or the full edge cut between some `U` and `C ∖ U`.
pub fn bipartite_law_allows(c: &CoherentConfiguration, s: &BTreeSet<(usize, usize)>) -> Result<bool> {
    let h = dcc(c)?;
    for members in &h.hyperedges {
        let inside: BTreeSet<(usize, usize)> = s.iter().copied().filter(|&(a, b)| members.contains(&a) && members.contains(&b)).collect();
        if inside.is_empty() {
            continue;
        }
        let k = members.len();
        let is_cut = (1u32..(1 << k) - 1).any(|u| {
            let cut: BTreeSet<(usize, usize)> = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| (u >> i & 1) != (u >> j & 1))
                .map(|(i, j)| (members[i].min(members[j]), members[i].max(members[j])))
                .collect();
            cut == inside
        });
        if !is_cut {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn run(id: usize, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name, passed, detail, elapsed: start.elapsed() }
}

pub fn small_instance_amenability() -> CriterionResult {
    run(1, "small-instance amenability", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..1000 {
            let g = random_small_graph(&mut rng, 15);
            if !decide_amenable(&g)?.is_amenable() {
                return Ok((false, format!("graph {i} on {} vertices judged non-amenable", g.n())));
            }
        }
        let t = start.elapsed();
        Ok((t < Duration::from_secs(60), format!("1000 graphs amenable in {:.1}s", t.as_secs_f64())))
    })
}

pub fn census() -> CriterionResult {
    run(2, "16-vertex census", || {
        let start = Instant::now();
        let p = polya_count(2)?;
        let report = census16()?;
        let all = report.entries.iter().all(|e| e.verified());
        let t = start.elapsed();
        let ok = p == 218 && report.classes() == 218 && report.graphs() == 436 && all && t < Duration::from_secs(300);
        Ok((ok, format!("p(2) = {p}, {} classes, {} graphs, all verified = {all}, {:.1}s", report.classes(), report.graphs(), t.as_secs_f64())))
    })
}

pub fn unique_obstruction() -> CriterionResult {
    run(3, "unique 16-point obstruction", || {
        let t = decide_separable(&t16())?;
        if t.is_separable() {
            return Ok((false, "t16 judged separable".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..500 {
            let g = random_small_graph(&mut rng, 15);
            let c = closure_of_graph(&g)?.config;
            if !decide_separable(&c)?.is_separable() {
                return Ok((false, format!("closure {i} on {} points judged non-separable", c.n())));
            }
        }
        Ok((true, "t16 non-separable; 500 small closures separable".into()))
    })
}

pub fn cfi_criterion() -> CriterionResult {
    run(4, "CFI minimum-degree criterion", || {
        let sep = [
            ("P4", SimpleGraph::path(4)),
            ("C5", SimpleGraph::cycle(5)),
            ("C6", SimpleGraph::cycle(6)),
            ("P7", SimpleGraph::path(7)),
        ];
        let non = [
            ("K4", SimpleGraph::complete(4)),
            ("K3,3", SimpleGraph::complete_bipartite(3, 3)),
            ("Petersen", SimpleGraph::petersen()),
            ("Moebius-Kantor", SimpleGraph::mobius_kantor()),
        ];
        let mut bad = Vec::new();
        for (name, g) in &sep {
            if !decide_separable(&skew_config(g)?)?.is_separable() {
                bad.push(*name);
            }
        }
        for (name, g) in &non {
            if decide_separable(&skew_config(g)?)?.is_separable() {
                bad.push(*name);
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { "8/8 verdicts match".into() } else { format!("wrong: {bad:?}") }))
    })
}

pub fn cyclic_multiples_of_seven() -> CriterionResult {
    run(5, "cyclic (n_3) multiples of 7", || {
        let mut non = Vec::new();
        for n in 7..=21 {
            if !decide_separable(&pls_to_config(&cyclic_pls(n)?, &BTreeMap::new())?)?.is_separable() {
                non.push(n);
            }
        }
        Ok((non == [7, 14, 21], format!("non-separable for n = {non:?}")))
    })
}

pub fn named_geometries() -> CriterionResult {
    run(6, "named geometries", || {
        let none = BTreeMap::new();
        let verdict = |d: PartialLinearSpace| -> Result<bool> { Ok(decide_separable(&pls_to_config(&d, &none)?)?.is_separable()) };
        let got = [
            ("Fano", verdict(fano())?, false),
            ("Moebius-Kantor", verdict(mobius_kantor())?, true),
            ("Pappus", verdict(pappus())?, false),
            ("cyclic 9", verdict(cyclic_pls(9)?)?, true),
            ("rotated 9", verdict(cyclic_pls_with(9, [0, 3, 4])?)?, true),
        ];
        let bad: Vec<&str> = got.iter().filter(|(_, a, b)| a != b).map(|(n, _, _)| *n).collect();
        Ok((bad.is_empty(), if bad.is_empty() { "5/5 verdicts match".into() } else { format!("wrong: {bad:?}") }))
    })
}

pub fn worked_examples() -> CriterionResult {
    run(7, "worked examples", || {
        let two = decide_separable(&example_two_triangles())?.is_separable();
        let c = example_mixed();
        let mixed = decide_separable_irredundant(&c)?.is_separable();
        let saa = saa_order_log2(&c)?;
        let scac = scac_order_log2_all_f4(&c)?;
        let id: Vec<usize> = (0..c.num_classes()).collect();
        let fixing = enumerate_strict_combinatorial_automorphisms(&c)?.into_iter().filter(|(_, m)| *m == id).count();
        let ok = two && !mixed && saa == 15 && fixing == 1 << scac && fixing >= 10;
        Ok((
            ok,
            format!(
                "two triangles separable = {two}; mixed separable = {mixed}, saa = {saa}, scac = {scac}, brute-force |Gamma_c| = {fixing}"
            ),
        ))
    })
}

pub fn oracle_concordance() -> CriterionResult {
    run(8, "oracle concordance", || {
        let inst = irredundant_instances(8, 60);
        for (i, c) in inst.iter().enumerate() {
            if decide_separable_irredundant(c)?.is_separable() != separable_oracle_irredundant(c)? {
                return Ok((false, format!("irredundant instance {i} disagrees")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for i in 0..200 {
            let n = rng.gen_range(1..=16);
            let (mult, palette) = (rng.gen_range(1..=n), rng.gen_range(1..=3));
            let g = random_colored_graph(&mut rng, n, mult, palette);
            let r = Rainbow::new(normalize_transpose(&g)?)?;
            if !coherent_closure(&r).config.matrix().same_partition(&closure_oracle(&r)?) {
                return Ok((false, format!("closure {i} disagrees")));
            }
        }
        let mut counted = 0;
        for c in inst.iter().filter(|c| fiber_graph(c).edges.len() <= 14).take(20) {
            if enumerate_strict_algebraic_automorphisms(c)?.len() != 1 << saa_order_log2(c)? {
                return Ok((false, "strict algebraic automorphism count disagrees".into()));
            }
            counted += 1;
        }
        Ok((
            counted == 20,
            format!("{} irredundant instances, 200 closures, {counted} automorphism counts agree", inst.len()),
        ))
    })
}

pub fn shrikhande_rook() -> CriterionResult {
    run(9, "Shrikhande and rook graphs", || {
        let p = shrikhande_rook_pair();
        let equiv = wl2_equivalent(&p.shrikhande, &p.rook)?.is_some();
        let iso = graph_iso(&p.shrikhande, &p.rook, true)?.is_some();
        let iso_plain = graph_iso(&p.shrikhande, &p.rook, false)?.is_some();
        let (a, b) = (adjacency(&p.shrikhande), adjacency(&p.rook));
        let srg = srg_parameters(&a) == Some((16, 6, 2, 2)) && srg_parameters(&b) == Some((16, 6, 2, 2));
        let k4 = (has_k4(&a), has_k4(&b));
        let ok = equiv && !iso && !iso_plain && srg && k4 == (false, true);
        Ok((ok, format!("equivalent = {equiv}, isomorphic = {iso}/{iso_plain}, srg = {srg}, K4 = {k4:?}")))
    })
}

/// Instances for the switch-set law, each with at most 12 fiber-graph edges.
pub fn switch_law_instances() -> Vec<CoherentConfiguration> {
    let mut out = vec![
        t16(),
        example_two_triangles(),
        skew_config(&SimpleGraph::cycle(5)).expect("valid"),
        skew_config(&SimpleGraph::complete_bipartite(3, 3)).expect("valid"),
        skew_config(&SimpleGraph::path(4)).expect("valid"),
    ];
    out.extend(irredundant_instances(10, 30).into_iter().filter(|c| fiber_graph(c).edges.len() <= 12));
    out
}

pub fn switch_set_law() -> CriterionResult {
    run(10, "switch-set bipartite law", || {
        let inst = switch_law_instances();
        let mut scanned = 0u64;
        for (i, c) in inst.iter().enumerate() {
            let edges = fiber_graph(c).edges;
            let found: BTreeSet<BTreeSet<(usize, usize)>> = enumerate_strict_algebraic_automorphisms(c)?
                .into_iter()
                .map(|a| a.switched.into_iter().collect())
                .collect();
            for mask in 0u32..1 << edges.len() {
                let s: BTreeSet<(usize, usize)> =
                    edges.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &e)| e).collect();
                if bipartite_law_allows(c, &s)? != found.contains(&s) {
                    return Ok((false, format!("instance {i}, switch set {s:?}")));
                }
                scanned += 1;
            }
        }
        Ok((true, format!("{} instances, {scanned} switch sets", inst.len())))
    })
}

pub fn all_criteria() -> Vec<fn() -> CriterionResult> {
    vec![
        small_instance_amenability,
        census,
        unique_obstruction,
        cfi_criterion,
        cyclic_multiples_of_seven,
        named_geometries,
        worked_examples,
        oracle_concordance,
        shrikhande_rook,
        switch_set_law,
    ]
}

pub fn run_all() -> Vec<CriterionResult> {
    all_criteria().into_iter().map(|f| f()).collect()
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} criterion {}: {} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}
