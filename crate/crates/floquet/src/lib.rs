//! Floquet theory for periodic canonical systems with measure coefficients.
//!
//! This crate computes monodromy matrices, Floquet multipliers and
//! discriminants, spectral bands, and Green's functions for systems
//! `J u' + q u = lambda w u` on the line whose coefficients `q` (symmetric)
//! and `w` (positive semidefinite) are periodic matrix measures: finitely
//! many point masses per period plus a piecewise constant density. Solutions
//! jump at the point masses; all evaluations expose both one-sided limits
//! and their balanced mean.
//!
//! Start with [`CanonicalSystem`] to describe a problem, then:
//! - [`fundamental_matrix`] / [`solution_value`] for initial value problems,
//! - [`monodromy`] / [`discriminant`] / [`floquet_data`] for period maps,
//! - [`stability_bands`] for the spectral bands,
//! - [`greens_function`] / [`resolvent_apply`] off the spectrum,
//! - [`validate_system`] for the structural and spectral hypotheses.
//!
//! All routines are pure functions of their inputs; the types are plain data
//! and `Send + Sync`, so sweeps parallelize from the outside.

pub mod error;
pub mod greens;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod monodromy;
pub mod propagate;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::Error;
pub use greens::{greens_function, resolvent_apply, GreensValue, ResolventData, ResolventPoint};
pub use io::{
    bands_json, check_example, discriminant_sweep, find_example, greens_json, monodromy_json,
    parse_problem, registry, render_report, resolve_params, serialize_problem, sweep_csv, to_json,
    to_json_pretty, CheckOutcome, ExampleEntry, ExampleParam, ProblemError, ProblemFile, SweepRow,
};
pub use measure::{
    default_base_point, density_at, jump_at, singular_set, validate_system, Atom, CanonicalSystem,
    MatrixMeasureSpec, RealMat, Segment, SingularAtom, SingularSet, ValidationReport, Violation,
    ViolationCode,
};
pub use monodromy::{
    discriminant, discriminant_derivative, floquet_data, floquet_solution, generalized_floquet,
    monodromy, t_matrix, Branch, FloquetData, FloquetStructure, MonodromyData,
};
pub use propagate::{
    fundamental_matrix, solution_value, transfer_between, BalancedValue, TransferMatrix,
};
pub use quadrature::{gauss_legendre, period_integral, CMat, QuadOptions};
pub use scalar::{
    scalar_floquet, scalar_multiplier, scalar_solution_value, scalar_spectrum, ScalarFloquet,
    ScalarValue,
};
pub use spectral::{
    classify_lambda, detect_degenerate_subspace, stability_bands, Band, BandEdge, BandFlags,
    BandOptions, BandReport, DegenerateSubspace, EdgeKind, LambdaClass,
};
