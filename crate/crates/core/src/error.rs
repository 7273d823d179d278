use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {value} (must be positive and finite)")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("inputs are in {found:?} units but {expected:?} was requested")]
    UnitMismatch {
        expected: crate::units::UnitSystem,
        found: crate::units::UnitSystem,
    },

    #[error("H_{n}({y}) overflows f64; use the normalized Hermite functions instead")]
    HermiteOverflow { n: u64, y: f64 },

    #[error("position {x} lies outside the open orbit interval (-{amplitude}, {amplitude})")]
    OutsideOrbit { x: f64, amplitude: f64 },

    #[error("quadrature did not converge within depth {max_depth}; best estimate {estimate}")]
    QuadratureNotConverged { estimate: f64, max_depth: u32 },

    #[error("moment order {0} is not supported (expected 0, 1, 2 or 4)")]
    UnsupportedMomentOrder(u32),

    #[error(
        "truncation needs more than {cap} terms at theta = {theta}; \
         best achievable tolerance is {achievable:e}"
    )]
    TruncationCapExceeded {
        cap: u64,
        theta: f64,
        achievable: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
