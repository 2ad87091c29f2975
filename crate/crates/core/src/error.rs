use core::fmt;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Adaptive quadrature stopped with an error estimate above tolerance.
    Quadrature { estimate: f64, tolerance: f64 },
    /// Rate sampling failed at a specific grid point.
    RateSample { t: f64, estimate: f64, tolerance: f64 },
    /// The adaptive ODE integrator could not make progress.
    StepSizeCollapse { t: f64, step: f64 },
    /// Dense eigendecomposition produced non-finite output.
    Eigen,
    /// The requested system is larger than the dense representation cap.
    Resource { requested: usize, max: usize },
    /// A caller violated a documented precondition.
    Contract(&'static str),
    /// Phase variance is undefined for a non-positive Fisher information.
    UndefinedVariance { fisher: f64 },
    /// A search found no transition in the requested range.
    NotFound(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::Quadrature { estimate, tolerance } => {
                write!(f, "quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")
            }
            Error::RateSample { t, estimate, tolerance } => {
                write!(f, "rate quadrature failed at t = {t}: error estimate {estimate:e} above tolerance {tolerance:e}")
            }
            Error::StepSizeCollapse { t, step } => {
                write!(f, "ODE step size collapsed to {step:e} at t = {t}")
            }
            Error::Eigen => f.write_str("eigendecomposition produced non-finite values"),
            Error::Resource { requested, max } => write!(f, "{requested} qubits exceed the cap of {max}"),
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
            Error::UndefinedVariance { fisher } => {
                write!(f, "phase variance undefined for Fisher information {fisher}")
            }
            Error::NotFound(what) => write!(f, "not found: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
