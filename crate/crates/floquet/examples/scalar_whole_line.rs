//! The one-dimensional case: no spectral gaps at all.
//!
//! For `n = 1` every transfer factor at a real parameter has modulus one —
//! atoms contribute Moebius factors `(J - c)/(J + c)` with imaginary `J`
//! and real `c`, intervals contribute imaginary exponentials. The
//! multiplier never leaves the unit circle, so a scalar system with
//! nontrivial weight has the whole real line as spectrum.

use floquet::{scalar_floquet, scalar_multiplier, scalar_spectrum, CanonicalSystem};
use floquet::measure::{dmat1, MatrixMeasureSpec};
use floquet::linalg::{c, cr};

fn main() {
    // J = i, a point coupling of strength 2 on the integers, Lebesgue weight
    let q = MatrixMeasureSpec::new(1, 1.0).with_atom(0.0, dmat1(2.0));
    let w = MatrixMeasureSpec::new(1, 1.0).with_density(0.0, 1.0, dmat1(1.0));
    let sys = CanonicalSystem::scalar(1.0, q, w, None);

    println!("multiplier rho(lambda) = i e^(-i lambda) for this system:");
    println!();
    println!("{:>8}  {:>24}  {:>14}", "lambda", "rho", "| |rho| - 1 |");
    for lambda in [-4.0, -1.0, 0.0, 2.5, 10.0] {
        let rho = scalar_multiplier(&sys, cr(lambda)).expect("real parameters are regular");
        println!(
            "{lambda:>8.2}  {:>24.6}  {:>14.2e}",
            rho,
            (rho.norm() - 1.0).abs()
        );
    }

    // compare against the closed form at one point
    let rho = scalar_multiplier(&sys, cr(1.0)).expect("regular");
    let expected = c(0.0, 1.0) * c(0.0, -1.0).exp();
    println!();
    println!("closed-form check at lambda = 1: |rho - i e^(-i)| = {:.2e}", (rho - expected).norm());

    let f = scalar_floquet(&sys, cr(1.0)).expect("regular");
    println!("Floquet exponent at lambda = 1: alpha = {:.6}", f.alpha);

    // the window-level report carries the whole-line flag
    let report = scalar_spectrum(&sys, -20.0, 20.0, 201).expect("nontrivial weight");
    println!();
    println!(
        "spectrum on [-20, 20]: one band [{}, {}], whole-line flag: {}",
        report.bands[0].lo, report.bands[0].hi, report.flags.scalar_whole_line
    );
    println!(
        "worst deviation of |rho| from 1 over 201 samples: {:.2e}",
        report.max_multiplier_deviation.unwrap()
    );
}
