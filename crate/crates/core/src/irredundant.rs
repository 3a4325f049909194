//! Separability of irredundant configurations via switch generators and a GF(2) system.
//!
//! A combinatorial automorphism fixing every cell class acts on each fiber `X` by a
//! permutation that either keeps or exchanges the two pairs of each determined matching.
//! Variable `a(X, C)` records whether the matching determined at `X` by hyperedge `C` is
//! exchanged. The interspace `{X, Y}` inside `C` is switched exactly when
//! `a(X, C) ⊕ a(Y, C) = 1`. On an F4 cell all three bits have even parity; with fewer
//! than three determined matchings every pattern is realizable by the cell.

use crate::config::CoherentConfiguration;
use crate::error::{Error, Precondition, Result};
use crate::gf2::{Elimination, Gf2Solution};
use crate::matrix::ColoredSquareMatrix;
use crate::structure::{classify_cell, dcc, fiber_graph, CellClass, DccHypergraph, FiberGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SwitchVariable {
    pub fiber: usize,
    pub hyperedge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRow {
    pub edge: (usize, usize),
    pub hyperedge: usize,
    pub vars: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct SwitchSystem {
    pub variables: Vec<SwitchVariable>,
    /// Variable triples of degree-3 fibers.
    pub parity_rows: Vec<[usize; 3]>,
    /// One row per fiber-graph edge, in edge order.
    pub edge_rows: Vec<EdgeRow>,
    pub dcc: DccHypergraph,
    pub fiber_graph: FiberGraph,
    elimination: Elimination,
}

impl SwitchSystem {
    pub fn variable_index(&self, fiber: usize, hyperedge: usize) -> Option<usize> {
        self.variables.iter().position(|v| v.fiber == fiber && v.hyperedge == hyperedge)
    }

    pub fn num_rows(&self) -> usize {
        self.parity_rows.len() + self.edge_rows.len()
    }

    /// Coefficient rows: parity rows first, then edge rows.
    pub fn rows(&self) -> Vec<Vec<bool>> {
        let nv = self.variables.len();
        let mut out = Vec::with_capacity(self.num_rows());
        for p in &self.parity_rows {
            let mut r = vec![false; nv];
            for &v in p {
                r[v] = true;
            }
            out.push(r);
        }
        for e in &self.edge_rows {
            let mut r = vec![false; nv];
            r[e.vars.0] = true;
            r[e.vars.1] = true;
            out.push(r);
        }
        out
    }

    /// Solves with zero parity right-hand sides and `edge_rhs` on the edge rows.
    pub fn solve(&self, edge_rhs: &[bool]) -> Result<Gf2Solution> {
        if edge_rhs.len() != self.edge_rows.len() {
            return Err(Precondition::DimensionMismatch.into());
        }
        let mut rhs = vec![false; self.parity_rows.len()];
        rhs.extend_from_slice(edge_rhs);
        self.elimination.solve(&rhs)
    }

    pub fn kernel_dim(&self) -> usize {
        self.elimination.kernel_dim()
    }

    /// Switch pattern over fiber-graph edges of `f_{X,C}`.
    pub fn rhs_for_generator(&self, x: usize, h: usize) -> Result<Vec<bool>> {
        let members = self.dcc.hyperedges.get(h).ok_or(Precondition::FiberNotInHyperedge)?;
        if !members.contains(&x) {
            return Err(Precondition::FiberNotInHyperedge.into());
        }
        Ok(self
            .fiber_graph
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| self.dcc.edge_hyperedge[e] == h && (a == x || b == x))
            .collect())
    }
}

fn require_irredundant(c: &CoherentConfiguration) -> Result<DccHypergraph> {
    dcc(c)
}

pub fn switch_system(c: &CoherentConfiguration) -> Result<SwitchSystem> {
    let h = require_irredundant(c)?;
    let fg = fiber_graph(c);
    let mut variables = Vec::new();
    for (x, inc) in h.incidence.iter().enumerate() {
        for &(he, _) in inc {
            variables.push(SwitchVariable { fiber: x, hyperedge: he });
        }
    }
    let index = |x: usize, he: usize| variables.iter().position(|v| v.fiber == x && v.hyperedge == he).unwrap();
    let mut parity_rows = Vec::new();
    for (x, inc) in h.incidence.iter().enumerate() {
        if inc.len() == 3 {
            if classify_cell(c, x)? != CellClass::F4 {
                return Err(Error::Internal("fiber with three determined matchings is not F4".into()));
            }
            parity_rows.push([index(x, inc[0].0), index(x, inc[1].0), index(x, inc[2].0)]);
        }
    }
    let edge_rows: Vec<EdgeRow> = fg
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let he = h.edge_hyperedge[e];
            EdgeRow { edge: (a, b), hyperedge: he, vars: (index(a, he), index(b, he)) }
        })
        .collect();
    let nv = variables.len();
    let mut sys = SwitchSystem {
        variables,
        parity_rows,
        edge_rows,
        dcc: h,
        fiber_graph: fg,
        elimination: Elimination::new(&[], 0)?,
    };
    sys.elimination = Elimination::new(&sys.rows(), nv)?;
    Ok(sys)
}

pub fn rhs_for_generator(c: &CoherentConfiguration, x: usize, h: usize) -> Result<Vec<bool>> {
    switch_system(c)?.rhs_for_generator(x, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrredundantVerdict {
    Separable,
    /// The first generator `f_{X,C}` (fiber, hyperedge) not induced by a combinatorial automorphism.
    NonSeparable { fiber: usize, hyperedge: usize },
}

impl IrredundantVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, IrredundantVerdict::Separable)
    }
}

pub fn decide_separable_irredundant(c: &CoherentConfiguration) -> Result<IrredundantVerdict> {
    let sys = switch_system(c)?;
    Ok(decide_with_system(&sys))
}

pub fn decide_with_system(sys: &SwitchSystem) -> IrredundantVerdict {
    for v in &sys.variables {
        let rhs = sys.rhs_for_generator(v.fiber, v.hyperedge).expect("incidence is valid");
        if !sys.solve(&rhs).expect("dimensions agree").is_solvable() {
            return IrredundantVerdict::NonSeparable { fiber: v.fiber, hyperedge: v.hyperedge };
        }
    }
    IrredundantVerdict::Separable
}

/// `log₂` of the number of strict algebraic automorphisms: `Σ_C (|C| − 1)`.
pub fn saa_order_log2(c: &CoherentConfiguration) -> Result<usize> {
    Ok(require_irredundant(c)?.hyperedges.iter().map(|h| h.len() - 1).sum())
}

/// `log₂` of the number of color-preserving automorphisms when every fiber is an F4
/// cell with three determined matchings.
pub fn scac_order_log2_all_f4(c: &CoherentConfiguration) -> Result<usize> {
    let sys = switch_system(c)?;
    if sys.dcc.incidence.iter().any(|inc| inc.len() != 3) {
        return Err(Precondition::NotAllF4DegreeThree.into());
    }
    Ok(sys.kernel_dim())
}

/// A vertex-colored graph with the fibers as color classes and, for each non-uniform
/// interspace, the pairs of its least class as edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Companion {
    pub graph: ColoredSquareMatrix,
    /// `(X, Y, class)` for each realized interspace block.
    pub registry: Vec<(usize, usize, usize)>,
}

pub fn build_companion(c: &CoherentConfiguration) -> Result<Companion> {
    require_irredundant(c)?;
    let fg = fiber_graph(c);
    let f = c.num_fibers() as u32;
    let mut registry = Vec::new();
    let mut adj = vec![false; c.n() * c.n()];
    for &(x, y) in &fg.edges {
        let r = c.block(x, y)[0];
        registry.push((x, y, r));
        for &u in c.fiber(x) {
            for &v in c.fiber(y) {
                if c.class_of(u, v) == r {
                    adj[u * c.n() + v] = true;
                    adj[v * c.n() + u] = true;
                }
            }
        }
    }
    let graph = ColoredSquareMatrix::from_fn(c.n(), |u, v| {
        if u == v {
            c.fiber_of(u) as u32
        } else {
            f + adj[u * c.n() + v] as u32
        }
    });
    Ok(Companion { graph, registry })
}
