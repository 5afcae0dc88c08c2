//! Monodromy matrices, Floquet multipliers, and exponents.
//!
//! The monodromy matrix `M(lambda)` propagates solutions over one period.
//! Its eigenvalues — the Floquet multipliers `rho_1, rho_2` — always
//! multiply to one, and their logarithms give the Floquet exponents that
//! control growth and decay of solutions across periods.

use floquet::{floquet_data, find_example, resolve_params, FloquetStructure};
use floquet::linalg::c;
use std::collections::BTreeMap;

fn main() {
    let entry = find_example("dirac-comb-scalar-weight").expect("registry entry");
    let params = resolve_params(entry, &BTreeMap::new()).expect("defaults");
    let sys = (entry.build)(&params);

    println!("system: {}  (D(lambda) = 3 - lambda for the defaults)", entry.name);
    println!();

    for lambda in [c(0.0, 0.0), c(3.0, 0.0), c(7.0, 0.0), c(3.0, 2.0)] {
        let data = floquet_data(&sys, lambda).expect("off the singular set");
        let m = data.monodromy.full();
        let e = |i: usize, j: usize| format!("{:+.4}{:+.4}i", m[(i, j)].re, m[(i, j)].im);
        println!("lambda = {lambda}");
        println!(
            "  M = [{} {}; {} {}]   det M = {:.12}",
            e(0, 0),
            e(0, 1),
            e(1, 0),
            e(1, 1),
            data.monodromy.det.re
        );
        println!("  D = {:.6}", data.monodromy.discriminant);
        println!(
            "  rho_1 = {:.6}  (|rho_1| = {:.6}),  rho_2 = {:.6}",
            data.rho.0,
            data.rho.0.norm(),
            data.rho.1
        );
        println!(
            "  exponents: alpha_1 = {:.6}, alpha_2 = {:.6}",
            data.alpha.0, data.alpha.1
        );
        let tag = match data.structure {
            FloquetStructure::Distinct { .. } => "distinct multipliers",
            FloquetStructure::DoubleDiagonal { .. } => "double multiplier, diagonal",
            FloquetStructure::DoubleJordan { .. } => "double multiplier, Jordan block",
        };
        println!("  structure: {tag}");
        println!();
    }

    println!("note: rho_1 rho_2 = 1 always; |D| < 2 puts both multipliers on");
    println!("the unit circle (bounded solutions), |D| > 2 splits them into a");
    println!("growing and a decaying one.");
}
