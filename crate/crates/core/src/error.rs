use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes do not fit together, or an input is empty.
    Dimension(&'static str),
    /// QR breakdown: a column is numerically dependent on its predecessors.
    Rank { column: usize, magnitude: f64 },
    /// An iterative routine hit its cap; `estimate` is the last iterate.
    NonConvergence { estimate: f64, iterations: usize },
    /// A spectral gap required by a bound is not positive.
    Gap(f64),
    /// Invalid configuration value.
    Config(&'static str),
    /// The start subspace is orthogonal to the target (`d0 = 1`).
    DegenerateStart,
    /// The spectrum does not hold the eigenvalues a bound needs.
    InsufficientSpectrum { needed: usize, available: usize },
    /// The tail eigenvalue is not positive.
    UnsupportedSpectrum(f64),
    ZeroVector,
    /// Conductance of the empty set or of the whole vertex set.
    UndefinedCut,
    EmptyCluster(usize),
    /// The pivot block in CPQR clustering is singular.
    DegenerateEmbedding,
    /// Two rankings over different node sets.
    MismatchedUniverse,
    /// Graph must be reduced to its largest connected component first.
    Disconnected { components: usize },
    /// A node with zero degree in an unregularized normalized operator.
    ZeroDegree(usize),
    /// Tail orthogonalization kept collapsing.
    OrthogonalizationBreakdown,
    EmptyGraph,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(what) => write!(f, "dimension mismatch: {what}"),
            Error::Rank { column, magnitude } => {
                write!(f, "rank deficient at column {column} (|r_jj| = {magnitude:e})")
            }
            Error::NonConvergence { estimate, iterations } => write!(
                f,
                "no convergence after {iterations} iterations (last estimate {estimate:e})"
            ),
            Error::Gap(g) => write!(f, "nonpositive spectral gap {g:e}"),
            Error::Config(what) => write!(f, "invalid configuration: {what}"),
            Error::DegenerateStart => write!(f, "start subspace is orthogonal to the target (d0 = 1)"),
            Error::InsufficientSpectrum { needed, available } => write!(
                f,
                "spectrum holds {available} eigenvalues, {needed} required"
            ),
            Error::UnsupportedSpectrum(l) => {
                write!(f, "tail eigenvalue {l:e} is not positive")
            }
            Error::ZeroVector => write!(f, "zero vector"),
            Error::UndefinedCut => write!(f, "cut undefined for empty set or full vertex set"),
            Error::EmptyCluster(k) => write!(f, "cluster {k} is empty"),
            Error::DegenerateEmbedding => write!(f, "pivot block of the embedding is singular"),
            Error::MismatchedUniverse => write!(f, "rankings cover different node sets"),
            Error::Disconnected { components } => write!(
                f,
                "graph has {components} connected components; extract the largest one first"
            ),
            Error::ZeroDegree(i) => write!(f, "node {i} has zero degree"),
            Error::OrthogonalizationBreakdown => {
                write!(f, "tail orthogonalization broke down after repeated retries")
            }
            Error::EmptyGraph => write!(f, "graph has no edges"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
