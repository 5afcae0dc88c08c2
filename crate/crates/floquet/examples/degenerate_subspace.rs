//! Detect the degenerate solution subspace of a non-definite system.
//!
//! Solutions of the homogeneous equation that the weight measure cannot
//! see (`w u = 0` along the whole line) form a subspace of dimension 0, 1,
//! or 2. When it is non-trivial the discriminant degenerates to a constant
//! and resolvent-side objects are undefined. `detect_degenerate_subspace`
//! finds this subspace and confirms each direction pointwise.

use floquet::{
    detect_degenerate_subspace, stability_bands, BandOptions, CanonicalSystem, MatrixMeasureSpec,
    QuadOptions,
};
use floquet::measure::dmat2;

fn show(label: &str, sys: &CanonicalSystem) {
    let l0 = detect_degenerate_subspace(sys, &QuadOptions::default()).expect("structurally valid");
    println!("{label}");
    println!("  dimension: {}", l0.dimension);
    for (v, s) in l0.basis.iter().zip(&l0.seminorms) {
        println!(
            "    direction ({:+.4}, {:+.4}) with weighted seminorm {:.2e}",
            v[0].re, v[1].re, s
        );
    }
    let report = stability_bands(sys, -5.0, 5.0, &BandOptions::default()).expect("valid");
    match report.flags.constant_d {
        Some(d) => println!("  discriminant is constant: D = {d:.6}"),
        None => println!("  discriminant is non-constant"),
    }
    println!();
}

fn main() {
    // rank-one constant coupling with rank-one weight: one invisible
    // direction, D = 2 cosh(0.6) constant
    let q = MatrixMeasureSpec::new(2, 1.0).with_density(0.0, 1.0, dmat2([[0.0, 0.6], [0.6, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_density(0.0, 1.0, dmat2([[1.0, 0.0], [0.0, 0.0]]));
    show(
        "constant rank-one coupling, rank-one weight:",
        &CanonicalSystem::planar(1.0, q, w, None),
    );

    // zero weight: every solution is invisible, dimension 2
    let q = MatrixMeasureSpec::new(2, 1.0).with_density(0.0, 1.0, dmat2([[0.3, 1.0], [1.0, -0.2]]));
    let w = MatrixMeasureSpec::new(2, 1.0);
    show(
        "zero weight measure:",
        &CanonicalSystem::planar(1.0, q, w, None),
    );

    // definite comparison: point weight of full rank sees everything
    let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[0.0, 1.0], [1.0, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 1.0]]));
    show(
        "definite comparison (full-rank point weight):",
        &CanonicalSystem::planar(1.0, q, w, None),
    );

    println!("a one-dimensional degenerate subspace forces the constant");
    println!("discriminant to stay outside (-2, 2); with dimension two the");
    println!("constant can be anything.");
}
