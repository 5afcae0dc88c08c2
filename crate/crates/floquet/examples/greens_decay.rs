//! Green's function values and their exponential off-diagonal decay.
//!
//! Off the spectrum the Floquet solutions split into one decaying to the
//! left and one decaying to the right; the Green's function is their outer
//! product and inherits geometric decay in the distance |x - y|. For the
//! integer comb with identity point weight at lambda = 0 the multipliers
//! are 3 and 1/3, so every unit of separation costs a factor of 3.

use floquet::{find_example, greens_function, resolve_params};
use floquet::linalg::cr;
use std::collections::BTreeMap;

fn main() {
    let entry = find_example("dirac-comb-full").expect("registry entry");
    let params = resolve_params(entry, &BTreeMap::new()).expect("defaults");
    let sys = (entry.build)(&params);

    let lambda = cr(0.0); // in the spectral gap (-1, 1)

    println!("G(x, y) at lambda = 0 for the integer comb (gap around 0):");
    println!();
    let g = greens_function(&sys, lambda, 0.6, 0.4).expect("resolvent point");
    println!("  decay rate: {:.6} per unit (= ln 3)", g.decay_rate);
    println!();
    println!("{:>6} {:>6}  {:>12}  ratio to previous", "x", "y", "|G(x,y)|");
    let mut previous: Option<f64> = None;
    for k in 0..6 {
        let x = 0.6 + k as f64;
        let g = greens_function(&sys, lambda, x, 0.4).expect("resolvent point");
        let norm = g.matrix.norm();
        match previous {
            Some(p) => println!("{x:>6.1} {:>6.1}  {norm:>12.6e}  {:.6}", 0.4, norm / p),
            None => println!("{x:>6.1} {:>6.1}  {norm:>12.6e}", 0.4),
        }
        previous = Some(norm);
    }

    // symmetry: G(x, y) = G(y, x)^T
    let g_xy = greens_function(&sys, lambda, 1.3, 0.4).expect("resolvent point");
    let g_yx = greens_function(&sys, lambda, 0.4, 1.3).expect("resolvent point");
    let sym = (g_xy.matrix - g_yx.matrix.transpose()).norm();
    println!();
    println!("symmetry residual |G(1.3, 0.4) - G(0.4, 1.3)^T| = {sym:.2e}");

    // on the spectrum there is no Green's function
    match greens_function(&sys, cr(2.0), 0.6, 0.4) {
        Err(e) => println!("at lambda = 2 (inside a band): {e}"),
        Ok(_) => panic!("lambda = 2 should be on the spectrum"),
    }
}
