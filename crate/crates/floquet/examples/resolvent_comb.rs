//! Apply the resolvent to a source supported on weight atoms.
//!
//! For a function `f` carried by finitely many weight atoms, the resolvent
//! image `u = (L - lambda)^{-1} f` solves the inhomogeneous jump relation
//! `B+ u(+) - B- u(-) = dw f` at every atom and propagates homogeneously
//! in between, decaying in both directions. `resolvent_apply` computes `u`
//! and reports the worst defect of those two defining relations as checked
//! residuals.

use floquet::{find_example, resolve_params, resolvent_apply};
use floquet::linalg::{cr, CVec2};
use std::collections::BTreeMap;

fn main() {
    let entry = find_example("dirac-comb-full").expect("registry entry");
    let params = resolve_params(entry, &BTreeMap::new()).expect("defaults");
    let sys = (entry.build)(&params);

    // a unit source in the first coordinate at the atom x = 0
    let lambda = cr(0.0);
    let source = vec![(0.0, CVec2::new(cr(1.0), cr(0.0)))];
    let eval: Vec<f64> = (-6..=6).map(|k| 0.5 * k as f64).collect();

    let data = resolvent_apply(&sys, lambda, &source, &eval).expect("resolvent point");

    println!("u = resolvent of a point source e_1 at x = 0, lambda = 0");
    println!();
    println!("{:>6}  {:>22}  {:>10}", "x", "u(x-)  (both components)", "|u(x-)|");
    for pt in &data.points {
        println!(
            "{:>6.1}  ({:>9.6}, {:>9.6})  {:>10.6}",
            pt.x,
            pt.minus[0].re,
            pt.minus[1].re,
            pt.minus.norm()
        );
    }
    println!();
    println!("decay rate: {:.6} per unit", data.decay_rate);
    println!("worst jump-relation residual:     {:.2e}", data.max_jump_residual);
    println!("worst propagation residual:       {:.2e}", data.max_interior_residual);
    println!();
    println!("this particular source couples only to the left-decaying branch,");
    println!("so u vanishes identically to the right of the source and decays");
    println!("by the multiplier 1/3 per period to the left.");
}
