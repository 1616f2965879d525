use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // measure
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("moment of order {k} exceeds the cap {cap}")]
    UnsupportedMoment { k: usize, cap: usize },
    #[error("grid density has unresolved mass at the grid boundary")]
    NonIntegrable,
    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),
    #[error("atomic measures have no density")]
    AtomicDensity,

    // transforms
    #[error("evaluation point {re}+{im}i is not in the upper half-plane")]
    LowerHalfPlane { re: f64, im: f64 },
    #[error("moment recovery lost precision (k = {k}, y = {y})")]
    PrecisionLoss { k: usize, y: f64 },
    #[error("truncation removed all of the tau mass")]
    EmptyTau,
    #[error("measure is not centered (m1 = {0})")]
    NotCentered(f64),

    // subordination
    #[error("fixed-point solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("root tracking became ambiguous at z = {re}+{im}i")]
    PathAmbiguity { re: f64, im: f64 },

    // density
    #[error("grid too coarse: unresolved concentrated mass at x = {x}")]
    GridTooCoarse { x: f64 },
    #[error("profiles have disjoint supports")]
    DisjointGrids,
    #[error("support window is empty (margin {margin} >= half-width {half_width})")]
    EmptyWindow { margin: f64, half_width: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    // expansion
    #[error("moments are inconsistent: m4 = {m4} < 1 + m3^2 = {bound}")]
    MomentInconsistency { m4: f64, bound: f64 },
    #[error("coefficients out of range for n = {n}: {reason}")]
    CoefficientRange { n: usize, reason: String },

    // entropy
    #[error("profile has unbounded support")]
    UnboundedSupport,
    #[error("p^3 is not integrable (fitted edge exponent {alpha})")]
    NonIntegrableCube { alpha: f64 },
    #[error("x = {0} lies outside [-2, 2]")]
    OutsideSupport(f64),

    // cli
    #[error("parse error at byte {offset}: expected {expected}")]
    ParseError { offset: usize, expected: String },
}

impl Error {
    /// Module that raised the error, for diagnostics.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidMeasure(_) | UnsupportedMoment { .. } | NonIntegrable | DegenerateMeasure(_)
            | AtomicDensity => "measure",
            LowerHalfPlane { .. } | PrecisionLoss { .. } | EmptyTau | NotCentered(_) => {
                "transforms"
            }
            NoConvergence { .. } | PathAmbiguity { .. } => "subordination",
            GridTooCoarse { .. } | DisjointGrids | EmptyWindow { .. } | InvalidGrid(_) => {
                "density"
            }
            MomentInconsistency { .. } | CoefficientRange { .. } => "expansion",
            UnboundedSupport | NonIntegrableCube { .. } | OutsideSupport(_) => "entropy",
            ParseError { .. } => "cli",
        }
    }

    /// Variant name, e.g. `NoConvergence`.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidMeasure(_) => "InvalidMeasure",
            UnsupportedMoment { .. } => "UnsupportedMoment",
            NonIntegrable => "NonIntegrable",
            DegenerateMeasure(_) => "DegenerateMeasure",
            AtomicDensity => "AtomicDensity",
            LowerHalfPlane { .. } => "LowerHalfPlane",
            PrecisionLoss { .. } => "PrecisionLoss",
            EmptyTau => "EmptyTau",
            NotCentered(_) => "NotCentered",
            NoConvergence { .. } => "NoConvergence",
            PathAmbiguity { .. } => "PathAmbiguity",
            GridTooCoarse { .. } => "GridTooCoarse",
            DisjointGrids => "DisjointGrids",
            EmptyWindow { .. } => "EmptyWindow",
            InvalidGrid(_) => "InvalidGrid",
            MomentInconsistency { .. } => "MomentInconsistency",
            CoefficientRange { .. } => "CoefficientRange",
            UnboundedSupport => "UnboundedSupport",
            NonIntegrableCube { .. } => "NonIntegrableCube",
            OutsideSupport(_) => "OutsideSupport",
            ParseError { .. } => "ParseError",
        }
    }

    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::PathAmbiguity { .. })
    }
}
