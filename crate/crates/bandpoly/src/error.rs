use core::fmt;

/// Everything that can go wrong, from config validation to theta poles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Bands `left` and `right` intersect or are out of order.
    Overlap { left: usize, right: usize },
    /// An endpoint exponent of band `band` is `<= -1`.
    Exponent { band: usize },
    /// Point mass `mass` sits inside a band.
    MassPlacement { mass: usize },
    /// `x` is in no band.
    OutOfSupport { x: f64 },
    Domain(&'static str),
    Convergence(&'static str),
    /// Modified Chebyshev produced `b_k^2 <= 0` at index `index`.
    Instability { index: usize },
    /// A recurrence reduction ran out of rank at index `index`.
    Breakdown { index: usize },
    Pole,
    SingularSystem(&'static str),
    /// Evaluation point too close to a branch point.
    Path,
    /// Riemann matrix is not negative definite.
    Divergence,
    RootBracket { gap: usize },
    ThetaPole,
    NearSingularity,
    OutOfNeighborhood,
    MissingDerivatives,
    Overflow,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Overlap { left, right } => {
                write!(f, "bands {left} and {right} overlap or are unsorted")
            }
            Error::Exponent { band } => write!(f, "band {band}: exponents must exceed -1"),
            Error::MassPlacement { mass } => write!(f, "point mass {mass} lies inside a band"),
            Error::OutOfSupport { x } => write!(f, "x = {x} is outside every band"),
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::Convergence(s) => write!(f, "no convergence: {s}"),
            Error::Instability { index } => {
                write!(f, "modified Chebyshev lost positivity at k = {index}")
            }
            Error::Breakdown { index } => write!(f, "recurrence breakdown at k = {index}"),
            Error::Pole => write!(f, "evaluation at a pole"),
            Error::SingularSystem(s) => write!(f, "singular linear system: {s}"),
            Error::Path => write!(f, "integration path ends at a branch point"),
            Error::Divergence => write!(f, "tau is not negative definite"),
            Error::RootBracket { gap } => write!(f, "no sign change for gamma - 1/gamma on gap {gap}"),
            Error::ThetaPole => write!(f, "theta denominator vanishes"),
            Error::NearSingularity => write!(f, "point too close to the real axis; give a side"),
            Error::OutOfNeighborhood => write!(f, "point outside the endpoint neighborhood"),
            Error::MissingDerivatives => write!(f, "derivatives of h unavailable at the endpoint"),
            Error::Overflow => write!(f, "overflow"),
        }
    }
}

impl core::error::Error for Error {}
