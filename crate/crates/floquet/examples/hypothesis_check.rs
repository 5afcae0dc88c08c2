//! Validate systems against the admissibility hypotheses.
//!
//! `validate_system` checks structure (dimensions, period layout, atom
//! placement) and the working hypotheses: `q` symmetric, `w` positive
//! semidefinite, no atom identically singular, and no singular parameter
//! on the real axis. Nothing panics and nothing is repaired — every
//! finding becomes a reported violation.

use floquet::{validate_system, CanonicalSystem, MatrixMeasureSpec};
use floquet::io::render_report;
use floquet::measure::dmat2;

fn check(label: &str, sys: &CanonicalSystem) {
    println!("--- {label}");
    print!("{}", render_report(&validate_system(sys)));
    println!();
}

fn main() {
    // a healthy system: full point coupling, identity point weight
    let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[0.0, 1.0], [1.0, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 1.0]]));
    check("valid", &CanonicalSystem::planar(1.0, q, w, None));

    // an asymmetric coupling matrix violates symmetry
    let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[0.0, 1.0], [2.0, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 1.0]]));
    check("asymmetric coupling", &CanonicalSystem::planar(1.0, q, w, None));

    // a sign-indefinite weight violates positive semidefiniteness
    let q = MatrixMeasureSpec::new(2, 1.0);
    let w = MatrixMeasureSpec::new(2, 1.0).with_density(0.0, 1.0, dmat2([[1.0, 0.0], [0.0, -1.0]]));
    check("indefinite weight", &CanonicalSystem::planar(1.0, q, w, None));

    // strong coupling pushes the singular parameters onto the real axis
    // (here lambda = +/- sqrt(5)): unique continuation fails there and the
    // system is rejected
    let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[0.0, 3.0], [3.0, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 1.0]]));
    check("real singular parameter", &CanonicalSystem::planar(1.0, q, w, None));

    // alternating-sign coupling atoms degenerate at every parameter
    let q = MatrixMeasureSpec::new(2, 2.0)
        .with_atom(0.0, dmat2([[0.0, 2.0], [2.0, 0.0]]))
        .with_atom(1.0, dmat2([[0.0, -2.0], [-2.0, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 2.0)
        .with_atom(0.0, dmat2([[2.0, 0.0], [0.0, 0.0]]))
        .with_atom(1.0, dmat2([[2.0, 0.0], [0.0, 0.0]]));
    check("identically singular", &CanonicalSystem::planar(1.0, q, w, None));
}
