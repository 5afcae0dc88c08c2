//! Locate spectral bands, their edges, and degenerate touching points.
//!
//! `stability_bands` sweeps the discriminant over a window, bisects the
//! crossings of the levels +2 and -2, and classifies each edge: `Simple`
//! edges are transversal crossings, `Degenerate` edges are parameters
//! where the monodromy matrix is exactly plus or minus the identity (there
//! the bands touch and the gap closes).

use floquet::{stability_bands, BandOptions, CanonicalSystem, MatrixMeasureSpec};
use floquet::measure::dmat2;

fn main() {
    // the free second-order operator -y'' = lambda y in system form:
    // spectrum [0, oo) with closed gaps at (k pi)^2
    let q = MatrixMeasureSpec::new(2, 1.0).with_density(0.0, 1.0, dmat2([[0.0, 0.0], [0.0, -1.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_density(0.0, 1.0, dmat2([[1.0, 0.0], [0.0, 0.0]]));
    let sys = CanonicalSystem::planar(1.0, q, w, None);

    let report = stability_bands(&sys, -5.0, 50.0, &BandOptions::default()).expect("valid system");

    println!("window: [{}, {}]", report.window.0, report.window.1);
    println!();
    println!("bands:");
    for band in &report.bands {
        let lo_mark = if band.clipped_lo { " (clipped)" } else { "" };
        let hi_mark = if band.clipped_hi { " (clipped)" } else { "" };
        println!("  [{:.9}{lo_mark}, {:.9}{hi_mark}]", band.lo, band.hi);
    }
    println!();
    println!("edges:");
    for edge in &report.edges {
        println!(
            "  lambda = {:>12.9}   D = {:+.0}   {:?}",
            edge.lambda, edge.level, edge.kind
        );
    }
    println!();
    println!("the degenerate edges at (k pi)^2 = 9.8696..., 39.478... are");
    println!("parameters where the monodromy matrix equals +/- identity:");
    println!("the discriminant touches the level without crossing it, and");
    println!("the adjacent bands merge through the closed gap.");
}
