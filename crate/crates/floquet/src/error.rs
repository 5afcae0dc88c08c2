//! Error type shared by every operation in the crate.

use num_complex::Complex64;

/// Errors reported by propagation, Floquet and spectral computations.
///
/// Structural problems with a system description are *not* reported here;
/// [`crate::measure::validate_system`] collects those into a
/// [`crate::measure::ValidationReport`] instead. The variants below cover
/// failures that can only be discovered while computing.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The system description is too malformed to compute with
    /// (wrong dimensions, non-finite entries, empty period, ...).
    #[error("malformed system: {0}")]
    Structure(String),

    /// The system fails hypothesis validation (see `validate_system`).
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    /// The jump condition at an atom is singular at this spectral parameter:
    /// `lambda` lies in the singular set.
    #[error("lambda = {lambda} lies in the singular set at atom {position}")]
    SingularAtom { position: f64, lambda: Complex64 },

    /// A jump factor `B+` is not invertible; raised by the low-level
    /// transfer routines which do not know the atom position.
    #[error("singular jump condition at lambda = {lambda}")]
    SingularJump { lambda: Complex64 },

    /// An integration or propagation anchor coincides with an atom,
    /// where one-sided limits differ.
    #[error("anchor {0} coincides with an atom position")]
    AnchorAtAtom(f64),

    /// The monodromy matrix is a Jordan block: there is a single Floquet
    /// solution and a generalized one, but no second Floquet solution.
    #[error("monodromy at lambda = {lambda} is a Jordan block; use the generalized chain")]
    JordanStructure { lambda: Complex64 },

    /// The monodromy matrix has two distinct eigenvalues, so there is no
    /// generalized chain to compute.
    #[error("monodromy at lambda = {lambda} has distinct multipliers; no Jordan chain exists")]
    NotJordan { lambda: Complex64 },

    /// A resolvent-side object (Green's function, resolvent application)
    /// was requested at a point of the spectrum or of the singular set.
    #[error("lambda = {lambda} is not in the resolvent set: {reason}")]
    OnSpectrum { lambda: Complex64, reason: String },

    /// The problem is non-definite: the degenerate subspace is non-trivial
    /// and the requested object is not defined.
    #[error("non-definite problem: the degenerate subspace has dimension {dimension}")]
    NonDefinite { dimension: usize },

    /// The operation is only defined for planar (n = 2) systems.
    #[error("operation requires a planar (n = 2) system; scalar systems use the `scalar` module")]
    NotPlanar,

    /// The operation is only defined for scalar (n = 1) systems.
    #[error("operation requires a scalar (n = 1) system")]
    NotScalar,

    /// The weight measure vanishes identically.
    #[error("weight measure is identically zero")]
    TrivialWeight,

    /// A numerical guard tripped (overflow fold-back, failed refinement, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),
}
