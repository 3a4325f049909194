use std::fmt;

use crate::config::CoherenceWitness;
use crate::matrix::Diagnostic;
use crate::structure::IrredundantReason;

/// Unmet precondition of a library operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Precondition {
    NoMatchingInInterspace,
    Decomposable,
    TooFewPoints,
    FiberSizesNotTwoOrFour,
    MatchingInterspacePresent,
    NotTwoPointFiber,
    FiberSizeNotFour,
    NeedsThreeFibers,
    NotC8,
    NotDeterminingInterspace,
    NoSharedFiber,
    NotIrredundant(IrredundantReason),
    FiberNotInHyperedge,
    NotAllF4DegreeThree,
    TooManyInterspaces(usize),
    TooManyFibers(usize),
    DimensionMismatch,
    InvalidPls(String),
    DegreeTooLarge,
    Disconnected,
    CyclicTooSmall,
    ColorMultiplicity(usize),
    CellOptionNotDegreeOne(usize),
    SameFiber,
    SizeTooLarge(usize),
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Precondition::*;
        match self {
            NoMatchingInInterspace => write!(f, "interspace contains no matching"),
            Decomposable => write!(f, "decomposable"),
            TooFewPoints => write!(f, "too few points"),
            FiberSizesNotTwoOrFour => write!(f, "fiber sizes must be 2 or 4"),
            MatchingInterspacePresent => write!(f, "matching interspace present"),
            NotTwoPointFiber => write!(f, "fiber is not of size 2"),
            FiberSizeNotFour => write!(f, "all fibers must have size 4"),
            NeedsThreeFibers => write!(f, "needs >= 3 fibers"),
            NotC8 => write!(f, "interspace is not C8"),
            NotDeterminingInterspace => {
                write!(f, "interspace does not determine a matching")
            }
            NoSharedFiber => write!(f, "interspaces do not share the middle fiber"),
            NotIrredundant(r) => write!(f, "not irredundant: {r}"),
            FiberNotInHyperedge => write!(f, "fiber not in hyperedge"),
            NotAllF4DegreeThree => {
                write!(f, "every cell must be F4 with three determined matchings")
            }
            TooManyInterspaces(k) => write!(f, "too many non-uniform interspaces ({k})"),
            TooManyFibers(k) => write!(f, "too many fibers ({k})"),
            DimensionMismatch => write!(f, "dimension mismatch"),
            InvalidPls(s) => write!(f, "invalid partial linear space: {s}"),
            DegreeTooLarge => write!(f, "maximum degree exceeds 3"),
            Disconnected => write!(f, "graph is disconnected"),
            CyclicTooSmall => write!(f, "cyclic configuration needs n >= 7"),
            ColorMultiplicity(m) => write!(f, "color multiplicity {m} exceeds 4"),
            CellOptionNotDegreeOne(p) => {
                write!(f, "cell option given for point {p} of degree != 1")
            }
            SameFiber => write!(f, "fibers must be distinct"),
            SizeTooLarge(n) => write!(f, "instance too large ({n} points)"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid colored graph: {}", first_diag(.0))]
    InvalidColoring(Vec<Diagnostic>),
    #[error("not a rainbow: {0}")]
    NotRainbow(String),
    #[error("not coherent: {0}")]
    NotCoherent(Box<CoherenceWitness>),
    #[error("class id {0} out of range")]
    ClassOutOfRange(usize),
    #[error("point subset is not a union of fibers")]
    NotFiberAligned,
    #[error("point map is not a bijection")]
    NotBijective,
    #[error("fiber of size {0} exceeds 4")]
    FiberTooLarge(usize),
    #[error("precondition violated: {0}")]
    Precondition(Precondition),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn first_diag(d: &[Diagnostic]) -> String {
    match d.first() {
        Some(x) if d.len() == 1 => x.to_string(),
        Some(x) => format!("{x} (and {} more)", d.len() - 1),
        None => String::new(),
    }
}

impl From<Precondition> for Error {
    fn from(p: Precondition) -> Self {
        Error::Precondition(p)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
