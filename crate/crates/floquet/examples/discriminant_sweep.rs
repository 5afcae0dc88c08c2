//! Sample the discriminant of a periodic system over a parameter window.
//!
//! The discriminant `D(lambda)` is the trace of the monodromy matrix; the
//! spectrum of the full-line operator is exactly `{lambda : |D| <= 2}`.
//! This sweeps one of the built-in examples and prints a small table
//! together with where each sample sits relative to the bands.

use floquet::{discriminant_sweep, find_example, resolve_params};
use std::collections::BTreeMap;

fn main() {
    // a point coupling with an identity point weight on the integers:
    // D(lambda) = 16 / (lambda^2 + 3) - 2 for the default parameters
    let entry = find_example("dirac-comb-full").expect("registry entry");
    let params = resolve_params(entry, &BTreeMap::new()).expect("defaults");
    let sys = (entry.build)(&params);

    println!("system: {}  ({})", entry.name, entry.summary);
    println!();
    println!("{:>10}  {:>12}  {:>12}  location", "lambda", "D", "|rho_1|");
    for row in discriminant_sweep(&sys, -6.0, 6.0, 13) {
        let d = row.re_d.expect("real sweep of a valid system");
        let rho = row.abs_rho1.expect("leading multiplier");
        let location = if d.abs() < 2.0 {
            "band interior"
        } else if d.abs() == 2.0 {
            "band edge"
        } else {
            "gap"
        };
        println!("{:>10.3}  {:>12.6}  {:>12.6}  {}", row.lambda, d, rho, location);
    }
    println!();
    println!("inside a band both multipliers sit on the unit circle, so");
    println!("|rho_1| = 1 there and |rho_1| > 1 in the gaps.");
}
