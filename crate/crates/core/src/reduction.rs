//! Cut-down of a coherent configuration to irredundant components, and the top-level
//! separability and amenability decisions.

use std::fmt;

use crate::closure::{closure_of_graph, wl2_equivalent};
use crate::config::{CoherentConfiguration, Restriction};
use crate::error::{Error, Precondition, Result};
use crate::irredundant::{switch_system, decide_with_system, IrredundantVerdict};
use crate::matrix::{validate_colored_graph, ColoredSquareMatrix};
use crate::oracle::{graph_iso, GRAPH_ISO_MAX_POINTS};
use crate::structure::{classify_interspace, fiber_graph, InterspaceTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseCase {
    /// At most one fiber.
    SingleFiber,
    /// Every fiber has at most 3 points.
    SmallFibers,
    /// Two 4-point fibers joined by a C8 interspace.
    TwoFiberC8,
}

impl fmt::Display for BaseCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseCase::SingleFiber => write!(f, "single fiber"),
            BaseCase::SmallFibers => write!(f, "fibers of size <= 3"),
            BaseCase::TwoFiberC8 => write!(f, "two fibers with C8"),
        }
    }
}

/// Fibers are named by their least point id in the input configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStep {
    SplitComponents { parts: usize },
    CutMatching { fiber: usize, partner: usize },
    CutTwoFiber { fiber: usize },
    CutC8Pair { x: usize, y: usize },
    BaseCaseSeparable(BaseCase),
    IrredundantHandoff { component: usize },
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStep::SplitComponents { parts } => write!(f, "split {parts}"),
            TraceStep::CutMatching { fiber, partner } => write!(f, "cut-matching {fiber} {partner}"),
            TraceStep::CutTwoFiber { fiber } => write!(f, "cut-two-fiber {fiber}"),
            TraceStep::CutC8Pair { x, y } => write!(f, "cut-c8 {x} {y}"),
            TraceStep::BaseCaseSeparable(b) => write!(f, "base {b}"),
            TraceStep::IrredundantHandoff { component } => write!(f, "irredundant {component}"),
        }
    }
}

pub type ReductionTrace = Vec<TraceStep>;

#[derive(Clone, Debug)]
pub struct Reduction {
    /// Irredundant components, mapped back to the input's points and classes.
    pub components: Vec<Restriction>,
    pub trace: ReductionTrace,
}

fn check_fiber_sizes(c: &CoherentConfiguration) -> Result<()> {
    match c.max_fiber_size() {
        s if s > 4 => Err(Error::FiberTooLarge(s)),
        _ => Ok(()),
    }
}

fn indecomposable(c: &CoherentConfiguration) -> bool {
    fiber_graph(c).components().len() <= 1
}

fn has_matching(c: &CoherentConfiguration) -> Result<bool> {
    let fg = fiber_graph(c);
    for &(x, y) in &fg.edges {
        if classify_interspace(c, x, y)?.contains_matching {
            return Ok(true);
        }
    }
    Ok(false)
}

fn without(c: &CoherentConfiguration, drop: &[usize]) -> Result<Restriction> {
    let keep: Vec<usize> = (0..c.num_fibers()).filter(|x| !drop.contains(x)).collect();
    c.restrict_mapped(&keep)
}

fn check_fiber_index(c: &CoherentConfiguration, x: usize) -> Result<()> {
    if x >= c.num_fibers() {
        return Err(Error::NotFiberAligned);
    }
    Ok(())
}

/// Removes fiber `X` when `Ꮯ[X, Y]` contains a matching.
pub fn cut_matching(c: &CoherentConfiguration, x: usize, y: usize) -> Result<CoherentConfiguration> {
    Ok(cut_matching_mapped(c, x, y)?.config)
}

fn cut_matching_mapped(c: &CoherentConfiguration, x: usize, y: usize) -> Result<Restriction> {
    check_fiber_index(c, x)?;
    check_fiber_index(c, y)?;
    if x == y {
        return Err(Precondition::SameFiber.into());
    }
    if !classify_interspace(c, x, y)?.contains_matching {
        return Err(Precondition::NoMatchingInInterspace.into());
    }
    without(c, &[x])
}

/// Removes the 2-point fiber `X`.
pub fn cut_two_fiber(c: &CoherentConfiguration, x: usize) -> Result<CoherentConfiguration> {
    Ok(cut_two_fiber_mapped(c, x)?.config)
}

fn cut_two_fiber_mapped(c: &CoherentConfiguration, x: usize) -> Result<Restriction> {
    check_fiber_index(c, x)?;
    if !indecomposable(c) {
        return Err(Precondition::Decomposable.into());
    }
    if c.n() <= 2 {
        return Err(Precondition::TooFewPoints.into());
    }
    if c.fibers().iter().any(|f| f.len() != 2 && f.len() != 4) {
        return Err(Precondition::FiberSizesNotTwoOrFour.into());
    }
    if has_matching(c)? {
        return Err(Precondition::MatchingInterspacePresent.into());
    }
    if c.fiber(x).len() != 2 {
        return Err(Precondition::NotTwoPointFiber.into());
    }
    without(c, &[x])
}

/// Removes both fibers of the C8 interspace `Ꮯ[X, Y]`.
pub fn cut_c8_pair(c: &CoherentConfiguration, x: usize, y: usize) -> Result<CoherentConfiguration> {
    Ok(cut_c8_pair_mapped(c, x, y)?.config)
}

fn cut_c8_pair_mapped(c: &CoherentConfiguration, x: usize, y: usize) -> Result<Restriction> {
    check_fiber_index(c, x)?;
    check_fiber_index(c, y)?;
    if x == y {
        return Err(Precondition::SameFiber.into());
    }
    if !indecomposable(c) {
        return Err(Precondition::Decomposable.into());
    }
    if c.fibers().iter().any(|f| f.len() != 4) {
        return Err(Precondition::FiberSizeNotFour.into());
    }
    if has_matching(c)? {
        return Err(Precondition::MatchingInterspacePresent.into());
    }
    if c.num_fibers() < 3 {
        return Err(Precondition::NeedsThreeFibers.into());
    }
    if classify_interspace(c, x, y)?.tag != InterspaceTag::C8 {
        return Err(Precondition::NotC8.into());
    }
    without(c, &[x, y])
}

/// Restriction `inner` of `outer`'s configuration, re-expressed relative to `outer`'s origin.
fn compose(outer: &Restriction, inner: Restriction) -> Restriction {
    Restriction {
        points: inner.points.iter().map(|&p| outer.points[p]).collect(),
        class_origin: inner.class_origin.iter().map(|&k| outer.class_origin[k]).collect(),
        config: inner.config,
    }
}

fn root(c: &CoherentConfiguration) -> Restriction {
    Restriction { config: c.clone(), points: (0..c.n()).collect(), class_origin: (0..c.num_classes()).collect() }
}

fn split(item: &Restriction) -> Vec<Restriction> {
    fiber_graph(&item.config)
        .components()
        .iter()
        .map(|fs| compose(item, item.config.restrict_mapped(fs).expect("fiber sets are aligned")))
        .collect()
}

enum Decision {
    Base(BaseCase),
    Cut(TraceStep, Box<Restriction>),
    Handoff,
}

fn fiber_name(item: &Restriction, x: usize) -> usize {
    item.points[item.config.fiber(x)[0]]
}

/// Next step for an indecomposable item.
fn decide_step(item: &Restriction) -> Result<Decision> {
    let c = &item.config;
    if c.num_fibers() <= 1 {
        return Ok(Decision::Base(BaseCase::SingleFiber));
    }
    if c.max_fiber_size() <= 3 {
        return Ok(Decision::Base(BaseCase::SmallFibers));
    }
    let fg = fiber_graph(c);
    let f = c.num_fibers();
    for x in 0..f {
        for y in 0..f {
            if x != y && fg.has_edge(x, y) && classify_interspace(c, x, y)?.contains_matching {
                let step = TraceStep::CutMatching { fiber: fiber_name(item, x), partner: fiber_name(item, y) };
                return Ok(Decision::Cut(step, Box::new(cut_matching_mapped(c, x, y)?)));
            }
        }
    }
    if let Some(x) = (0..f).find(|&x| c.fiber(x).len() == 2) {
        let step = TraceStep::CutTwoFiber { fiber: fiber_name(item, x) };
        return Ok(Decision::Cut(step, Box::new(cut_two_fiber_mapped(c, x)?)));
    }
    for &(x, y) in &fg.edges {
        if classify_interspace(c, x, y)?.tag == InterspaceTag::C8 {
            if f == 2 {
                return Ok(Decision::Base(BaseCase::TwoFiberC8));
            }
            let step = TraceStep::CutC8Pair { x: fiber_name(item, x), y: fiber_name(item, y) };
            return Ok(Decision::Cut(step, Box::new(cut_c8_pair_mapped(c, x, y)?)));
        }
    }
    Ok(Decision::Handoff)
}

pub fn reduce_to_irredundant(c: &CoherentConfiguration) -> Result<Reduction> {
    check_fiber_sizes(c)?;
    let mut trace = Vec::new();
    let mut components = Vec::new();
    let mut stack = vec![root(c)];
    while let Some(item) = stack.pop() {
        let parts = split(&item);
        if parts.len() > 1 {
            trace.push(TraceStep::SplitComponents { parts: parts.len() });
            stack.extend(parts.into_iter().rev());
            continue;
        }
        let item = parts.into_iter().next().unwrap_or(item);
        match decide_step(&item)? {
            Decision::Base(b) => trace.push(TraceStep::BaseCaseSeparable(b)),
            Decision::Cut(step, r) => {
                trace.push(step);
                stack.push(compose(&item, *r));
            }
            Decision::Handoff => {
                trace.push(TraceStep::IrredundantHandoff { component: components.len() });
                components.push(item);
            }
        }
    }
    Ok(Reduction { components, trace })
}

fn fiber_by_name(item: &Restriction, name: usize) -> Result<usize> {
    (0..item.config.num_fibers())
        .find(|&x| fiber_name(item, x) == name)
        .ok_or_else(|| Error::Internal(format!("trace names unknown fiber {name}")))
}

/// Re-applies a trace to `c`; returns the point sets of the irredundant components.
pub fn replay_trace(c: &CoherentConfiguration, trace: &[TraceStep]) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut stack = vec![root(c)];
    let mut steps = trace.iter();
    let bad = |s: &str| Error::Internal(format!("trace does not replay: {s}"));
    while let Some(item) = stack.pop() {
        let step = steps.next().ok_or_else(|| bad("ended early"))?;
        let item = match step {
            TraceStep::SplitComponents { parts } => {
                let ps = split(&item);
                if ps.len() != *parts {
                    return Err(bad("component count"));
                }
                stack.extend(ps.into_iter().rev());
                continue;
            }
            _ => item,
        };
        match *step {
            TraceStep::CutMatching { fiber, partner } => {
                let r = cut_matching_mapped(&item.config, fiber_by_name(&item, fiber)?, fiber_by_name(&item, partner)?)?;
                stack.push(compose(&item, r));
            }
            TraceStep::CutTwoFiber { fiber } => {
                let r = cut_two_fiber_mapped(&item.config, fiber_by_name(&item, fiber)?)?;
                stack.push(compose(&item, r));
            }
            TraceStep::CutC8Pair { x, y } => {
                let r = cut_c8_pair_mapped(&item.config, fiber_by_name(&item, x)?, fiber_by_name(&item, y)?)?;
                stack.push(compose(&item, r));
            }
            TraceStep::BaseCaseSeparable(_) => {}
            TraceStep::IrredundantHandoff { component } => {
                if component != out.len() {
                    return Err(bad("component numbering"));
                }
                out.push(item.points);
            }
            TraceStep::SplitComponents { .. } => unreachable!(),
        }
    }
    if steps.next().is_some() {
        return Err(bad("unused steps"));
    }
    Ok(out)
}

/// A switch generator `f_{X,C}` of an irredundant component not induced by any
/// combinatorial automorphism.
#[derive(Clone, Debug)]
pub struct NonSeparableWitness {
    pub component: Restriction,
    /// Fiber index within the component.
    pub fiber: usize,
    /// Hyperedge index within the component's dcc hypergraph.
    pub hyperedge: usize,
    /// The generator as a class permutation of the component.
    pub generator: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum Separability {
    Separable,
    NonSeparable(Box<NonSeparableWitness>),
}

impl Separability {
    pub fn is_separable(&self) -> bool {
        matches!(self, Separability::Separable)
    }
}

/// Class permutation switching the interspaces between `x` and the other fibers of `members`.
fn generator_map(c: &CoherentConfiguration, x: usize, members: &[usize]) -> Vec<usize> {
    let mut map: Vec<usize> = (0..c.num_classes()).collect();
    for &y in members.iter().filter(|&&y| y != x) {
        for (a, b) in [(x, y), (y, x)] {
            let bl = c.block(a, b);
            map[bl[0]] = bl[1];
            map[bl[1]] = bl[0];
        }
    }
    map
}

pub fn decide_separable(c: &CoherentConfiguration) -> Result<Separability> {
    Ok(decide_separable_traced(c)?.0)
}

/// Verdict together with the reduction it was based on.
pub fn decide_separable_traced(c: &CoherentConfiguration) -> Result<(Separability, Reduction)> {
    let red = reduce_to_irredundant(c)?;
    for comp in &red.components {
        let sys = switch_system(&comp.config)?;
        if let IrredundantVerdict::NonSeparable { fiber, hyperedge } = decide_with_system(&sys) {
            let generator = generator_map(&comp.config, fiber, &sys.dcc.hyperedges[hyperedge]);
            let w = NonSeparableWitness { component: comp.clone(), fiber, hyperedge, generator };
            return Ok((Separability::NonSeparable(Box::new(w)), red));
        }
    }
    Ok((Separability::Separable, red))
}

/// Algebraic automorphism of `c` fixing every fiber and agreeing with `forced`
/// wherever it is set, found by backtracking over blocks.
pub fn extend_algebraic_automorphism(c: &CoherentConfiguration, forced: &[Option<usize>]) -> Option<Vec<usize>> {
    let f = c.num_fibers();
    let k = c.num_classes();
    // units: unordered fiber pairs; a unit's assignment fixes both blocks
    let mut units: Vec<(usize, usize)> = (0..f).flat_map(|x| (x..f).map(move |y| (x, y))).collect();
    let cands: Vec<Vec<Vec<usize>>> = units.iter().map(|&(x, y)| unit_candidates(c, x, y, forced)).collect();
    if cands.iter().any(Vec::is_empty) {
        return None;
    }
    // forced and small units first, then grow along fibers already touched
    let mut order: Vec<usize> = Vec::with_capacity(units.len());
    let mut touched = vec![false; f];
    let mut done = vec![false; units.len()];
    while order.len() < units.len() {
        let next = (0..units.len())
            .filter(|&u| !done[u])
            .min_by_key(|&u| {
                let (x, y) = units[u];
                let t = touched[x] as usize + touched[y] as usize;
                (cands[u].len() > 1, 2 - t, cands[u].len(), u)
            })
            .unwrap();
        done[next] = true;
        touched[units[next].0] = true;
        touched[units[next].1] = true;
        order.push(next);
    }
    let cands: Vec<Vec<Vec<usize>>> = order.iter().map(|&u| cands[u].clone()).collect();
    units = order.iter().map(|&u| units[u]).collect();
    let mut map = vec![usize::MAX; k];
    let mut assigned = vec![false; f * f];
    if search_units(c, &units, &cands, 0, &mut map, &mut assigned) {
        Some(map)
    } else {
        None
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Candidate class maps on the blocks `(x, y)` and `(y, x)`, as `(class, image)` lists flattened
/// into `[c0, img0, c1, img1, ...]`.
fn unit_candidates(c: &CoherentConfiguration, x: usize, y: usize, forced: &[Option<usize>]) -> Vec<Vec<usize>> {
    let block = c.block(x, y);
    let mut out = Vec::new();
    for p in permutations(block) {
        let mut pairs: Vec<(usize, usize)> = block.iter().copied().zip(p.iter().copied()).collect();
        if x != y {
            for &(a, b) in &pairs.clone() {
                pairs.push((c.meta(a).transpose, c.meta(b).transpose));
            }
        }
        let ok = pairs.iter().all(|&(a, b)| {
            let (ma, mb) = (c.meta(a), c.meta(b));
            forced[a].is_none_or(|v| v == b)
                && ma.valency == mb.valency
                && ma.size == mb.size
                && ma.reflexive == mb.reflexive
                && pairs.iter().any(|&(a2, b2)| a2 == ma.transpose && b2 == mb.transpose)
        });
        if ok {
            out.push(pairs.into_iter().flat_map(|(a, b)| [a, b]).collect());
        }
    }
    out
}

fn triple_ok(c: &CoherentConfiguration, map: &[usize], x: usize, y: usize, z: usize) -> bool {
    for &t in c.block(x, z) {
        for &r in c.block(x, y) {
            for &s in c.block(y, z) {
                if c.p(t, r, s) != c.p(map[t], map[r], map[s]) {
                    return false;
                }
            }
        }
    }
    true
}

fn search_units(
    c: &CoherentConfiguration,
    units: &[(usize, usize)],
    cands: &[Vec<Vec<usize>>],
    i: usize,
    map: &mut Vec<usize>,
    assigned: &mut Vec<bool>,
) -> bool {
    if i == units.len() {
        return true;
    }
    let f = c.num_fibers();
    let (x, y) = units[i];
    for cand in &cands[i] {
        for pair in cand.chunks(2) {
            map[pair[0]] = pair[1];
        }
        assigned[x * f + y] = true;
        assigned[y * f + x] = true;
        let is = |a: usize, b: usize| assigned[a * f + b];
        let mut ok = true;
        'check: for z in 0..f {
            for (a, b, d) in [(x, y, z), (y, x, z), (x, z, y), (y, z, x), (z, x, y), (z, y, x)] {
                if is(a, b) && is(b, d) && is(a, d) && !triple_ok(c, map, a, b, d) {
                    ok = false;
                    break 'check;
                }
            }
        }
        if ok && search_units(c, units, cands, i + 1, map, assigned) {
            return true;
        }
        assigned[x * f + y] = false;
        assigned[y * f + x] = false;
    }
    false
}

#[derive(Clone, Debug)]
pub enum Amenability {
    Amenable,
    /// A WL2-equivalent, non-isomorphic companion graph.
    NonAmenable(ColoredSquareMatrix),
}

impl Amenability {
    pub fn is_amenable(&self) -> bool {
        matches!(self, Amenability::Amenable)
    }
}

pub fn decide_amenable(g: &ColoredSquareMatrix) -> Result<Amenability> {
    let diags = validate_colored_graph(g);
    if !diags.is_empty() {
        return Err(Error::InvalidColoring(diags));
    }
    let m = g.color_multiplicity();
    if m > 4 {
        return Err(Precondition::ColorMultiplicity(m).into());
    }
    let cl = closure_of_graph(g)?;
    let c = &cl.config;
    let Separability::NonSeparable(w) = decide_separable(c)? else {
        return Ok(Amenability::Amenable);
    };
    let mut forced = vec![None; c.num_classes()];
    for (z, &img) in w.generator.iter().enumerate() {
        forced[w.component.class_origin[z]] = Some(w.component.class_origin[img]);
    }
    let f = extend_algebraic_automorphism(c, &forced)
        .ok_or_else(|| Error::Internal("switch generator does not extend to the closure".into()))?;
    let mut inv = vec![0; f.len()];
    for (z, &img) in f.iter().enumerate() {
        inv[img] = z;
    }
    let mut h = ColoredSquareMatrix::from_fn(g.n(), |u, v| cl.lineage[inv[c.class_of(u, v)]] as u32);
    for (&id, name) in g.names() {
        h.set_name(id, name.clone());
    }
    if wl2_equivalent(g, &h)?.is_none() {
        return Err(Error::Internal("companion is not WL2-equivalent".into()));
    }
    if g.n() <= GRAPH_ISO_MAX_POINTS && graph_iso(g, &h, true)?.is_some() {
        return Err(Error::Internal("companion is isomorphic".into()));
    }
    Ok(Amenability::NonAmenable(h))
}
