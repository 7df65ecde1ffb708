use core::fmt;

/// Errors raised by the numerical kernels, the analytic age model and the
/// simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition.
    InvalidInput(&'static str),
    /// An iterative method ran out of budget; `best` is the last estimate.
    NonConvergence { what: &'static str, best: f64 },
    /// `h(0) <= target` in a decreasing root problem.
    NoPositiveRoot { h0: f64, target: f64 },
    /// Bracket doubling hit its limit before `h` crossed the target.
    BracketNotFound { last_upper: f64 },
    /// A survival function does not drop below the cutoff before overflow.
    NonIntegrableTail,
    /// Eigenvectors need an absolutely continuous rate law.
    DensityRequired,
    /// A perturbation derivative needs a non-degenerate baseline.
    DegenerateBaseline,
    /// A rejection sampler exceeded its attempt budget.
    RejectionBudget { what: &'static str, attempts: u64 },
    /// Tree size exceeded the configured memory cap.
    HorizonTooLarge { cells: usize, cap: usize },
    /// Asked for the population at a time beyond the simulated horizon.
    BeyondHorizon { t: f64, horizon: f64 },
    /// Population empty at an observation time.
    EmptyPopulation { t: f64 },
    /// Division size smaller than birth size.
    NonMonotoneGrowth { birth: f64, division: f64 },
    /// A Monte Carlo replicate failed; the stream index reproduces it.
    Replicate { stream: u64, source: alloc::boxed::Box<Error> },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NonConvergence { what, best } => {
                write!(f, "{what} did not converge (best estimate {best})")
            }
            Error::NoPositiveRoot { h0, target } => {
                write!(f, "no positive root: h(0) = {h0} <= target {target}")
            }
            Error::BracketNotFound { last_upper } => {
                write!(f, "root bracket not found up to {last_upper}")
            }
            Error::NonIntegrableTail => write!(f, "non-integrable tail"),
            Error::DensityRequired => write!(f, "eigenvectors require a density"),
            Error::DegenerateBaseline => {
                write!(f, "perturbation needs a non-degenerate baseline law")
            }
            Error::RejectionBudget { what, attempts } => {
                write!(f, "{what}: rejection budget exhausted after {attempts} attempts")
            }
            Error::HorizonTooLarge { cells, cap } => {
                write!(f, "horizon too large: {cells} cells exceeds cap {cap}")
            }
            Error::BeyondHorizon { t, horizon } => {
                write!(f, "time {t} is beyond the simulated horizon {horizon}")
            }
            Error::EmptyPopulation { t } => {
                write!(f, "extinct or horizon mismatch: empty population at t = {t}")
            }
            Error::NonMonotoneGrowth { birth, division } => {
                write!(f, "division size {division} below birth size {birth}")
            }
            Error::Replicate { stream, source } => {
                write!(f, "replicate on stream {stream} failed: {source}")
            }
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Replicate { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
