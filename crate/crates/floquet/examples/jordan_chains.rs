//! Generalized Floquet solutions where the monodromy is a Jordan block.
//!
//! At a band edge the two multipliers collide at +1 or -1. When the
//! monodromy matrix is not diagonalizable there, no second Floquet
//! solution exists; instead there is a chain: a true Floquet solution
//! `v1` and a generalized one `v2` satisfying
//!
//!     v2(x + omega) = rho v2(x) + v1(x).
//!
//! This example finds such a point and verifies the chain relation by
//! direct propagation.

use floquet::{
    find_example, floquet_data, floquet_solution, generalized_floquet, resolve_params, Branch,
    Error, FloquetStructure,
};
use floquet::linalg::cr;
use std::collections::BTreeMap;

fn main() {
    let entry = find_example("dirac-comb-scalar-weight").expect("registry entry");
    let params = resolve_params(entry, &BTreeMap::new()).expect("defaults");
    let sys = (entry.build)(&params);

    // D(lambda) = 3 - lambda meets the level +2 at lambda = 1
    let lambda = cr(1.0);
    let data = floquet_data(&sys, lambda).expect("off the singular set");
    match &data.structure {
        FloquetStructure::DoubleJordan { c, c_gen } => {
            println!("lambda = 1: double multiplier rho = {}", data.rho.0);
            println!("  chain vectors at the base point:");
            println!("    c     = ({:.6}, {:.6})", c[0], c[1]);
            println!("    c_gen = ({:.6}, {:.6})", c_gen[0], c_gen[1]);
        }
        other => panic!("expected a Jordan block at lambda = 1, got {other:?}"),
    }

    // a plain Floquet solution request reports the obstruction
    match floquet_solution(&sys, lambda, Branch::Second, 0.5) {
        Err(Error::JordanStructure { .. }) => {
            println!("  floquet_solution(Second) correctly refuses: Jordan block")
        }
        other => panic!("expected the Jordan refusal, got {other:?}"),
    }

    // the generalized pair satisfies v2(x + omega) = rho v2(x) + v1(x)
    let rho = data.rho.0;
    println!();
    println!("chain relation residuals |v2(x+1) - rho v2(x) - v1(x)|:");
    for x in [0.3, 0.5, 1.7, -2.4] {
        let (v1_x, v2_x) = generalized_floquet(&sys, lambda, x).expect("Jordan point");
        let (v1_x1, v2_x1) = generalized_floquet(&sys, lambda, x + 1.0).expect("Jordan point");
        let residual = (v2_x1.minus - v2_x.minus * rho - v1_x.minus).norm();
        let periodic = (v1_x1.minus - v1_x.minus * rho).norm();
        println!(
            "  x = {x:>5}: chain residual {residual:.2e}, v1 periodicity residual {periodic:.2e}"
        );
    }
    println!();
    println!("v1 is an honest Floquet solution (v1(x+1) = rho v1(x)); v2 picks");
    println!("up a copy of v1 every period, the hallmark of linear growth at a");
    println!("band edge with a Jordan monodromy.");
}
