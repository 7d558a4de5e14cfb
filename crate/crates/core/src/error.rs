//! Error type shared by all evaluators.

use std::fmt;

use num_complex::Complex64;

/// An error produced by an evaluator or a geometric construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point that is required to lie in the open upper half-plane does not.
    InvalidTau { im: f64 },
    /// The generators have a real ratio and span no rank-2 lattice.
    DegenerateLattice,
    /// The evaluation point is too close to a lattice point.
    PoleAtLatticePoint { u: Complex64 },
    /// The requested tolerance cannot be met at the configured maximum order.
    ToleranceUnreachable { requested: f64, achievable: f64 },
    /// Exact integer arithmetic overflowed.
    Overflow,
    /// Lattice Eisenstein sums are only provided for weights 4 and 6.
    InvalidWeight { k: u32 },
    /// Discriminant roots are only provided for exponents dividing 24.
    InvalidRoot { k: u32 },
    /// Fundamental-domain reduction did not terminate.
    IterationLimit,
    /// The bracket endpoints do not enclose a sign change.
    InvalidBracket { lo: f64, hi: f64 },
    /// Division by a quantity that vanishes to machine precision.
    DivisionByZero,
    /// No Newton start converged to the requested target.
    NotFound { diagnostics: String },
    /// The evaluation point is below the direct-series regime.
    OutOfRegime { im: f64 },
    /// The point is inside the exclusion zone around a singular value of J.
    SingularPoint { j: Complex64 },
    /// Fewer than three distinct points were supplied.
    CoincidentPoints,
    /// The two circles at the zero-angle vertex do not touch there.
    NotALune,
    /// The triangle's angles match neither admissible profile.
    WrongAngles { angles: [f64; 3] },
    /// The winding sum is too far from an integer to round safely.
    AmbiguousWinding { value: f64 },
    /// The truncation cap does not separate the target from infinity.
    CapTooLow { min_abs_on_cap: f64, required: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidTau { im } => {
                write!(f, "point must have positive imaginary part (got Im = {im})")
            }
            Error::DegenerateLattice => {
                write!(f, "generators are linearly dependent over the reals")
            }
            Error::PoleAtLatticePoint { u } => {
                write!(f, "evaluation point {u} is too close to a lattice point")
            }
            Error::ToleranceUnreachable {
                requested,
                achievable,
            } => write!(
                f,
                "tolerance {requested:.3e} unreachable at the configured order (best bound {achievable:.3e})"
            ),
            Error::Overflow => write!(f, "integer overflow in exact arithmetic"),
            Error::InvalidWeight { k } => write!(f, "unsupported Eisenstein weight {k}"),
            Error::InvalidRoot { k } => write!(f, "root exponent {k} does not divide 24"),
            Error::IterationLimit => write!(f, "fundamental-domain reduction did not terminate"),
            Error::InvalidBracket { lo, hi } => {
                write!(f, "no sign change on the bracket ({lo}, {hi})")
            }
            Error::DivisionByZero => write!(f, "division by a vanishing quantity"),
            Error::NotFound { diagnostics } => write!(f, "no solution found: {diagnostics}"),
            Error::OutOfRegime { im } => write!(
                f,
                "Im = {im} is below the direct-series regime for this operation"
            ),
            Error::SingularPoint { j } => {
                write!(f, "J = {j} is inside the exclusion zone around 0 or 1")
            }
            Error::CoincidentPoints => write!(f, "points are not pairwise distinct"),
            Error::NotALune => write!(
                f,
                "the circles at the zero-angle vertex are not tangent there"
            ),
            Error::WrongAngles { angles } => write!(
                f,
                "angle profile ({:.6}, {:.6}, {:.6}) matches no admissible triangle",
                angles[0], angles[1], angles[2]
            ),
            Error::AmbiguousWinding { value } => {
                write!(f, "winding sum {value} is too far from an integer")
            }
            Error::CapTooLow {
                min_abs_on_cap,
                required,
            } => write!(
                f,
                "cap image modulus {min_abs_on_cap:.3e} does not exceed the required {required:.3e}"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
