//! Gauss-Legendre quadrature and integration against matrix measures.
//!
//! Densities in this crate are piecewise constant, so the only smooth factor
//! under an integral is the integrand supplied by the caller (typically a
//! product of solution values, entire in both position and parameter). A
//! moderate-order Gauss rule on each constancy piece, with an optional cap
//! on piece length, resolves these to near machine precision for the
//! parameter ranges the band and derivative routines work in.

use crate::error::Error;
use crate::measure::{
    density_at, jump_at, position_tolerance, reduce_mod, snap_tol, steps_between,
    MatrixMeasureSpec, Step,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Complex matrix values produced by integrands.
pub type CMat = DMatrix<Complex64>;

/// Knobs for measure integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Number of Gauss-Legendre nodes per piece (exact for polynomial
    /// integrands of degree `2 * order - 1`).
    pub order: usize,
    /// Pieces longer than this are subdivided before applying the rule, so
    /// oscillatory integrands at large parameters stay resolved.
    pub max_piece_len: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            order: 8,
            max_piece_len: 0.25,
        }
    }
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre polynomial from Chebyshev starting
/// points. Nodes come out in increasing order.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 1..n {
            let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Split `[a, b]` into equal subpieces no longer than `max_len`.
pub(crate) fn subpieces(a: f64, b: f64, max_len: f64) -> Vec<(f64, f64)> {
    let len = b - a;
    let k = if max_len > 0.0 && len > max_len {
        (len / max_len).ceil() as usize
    } else {
        1
    };
    (0..k)
        .map(|i| {
            (
                a + len * i as f64 / k as f64,
                a + len * (i + 1) as f64 / k as f64,
            )
        })
        .collect()
}

/// Integral of `g` against one period of the measure `m`, anchored at a
/// continuity point: atoms in `[anchor, anchor + period)` contribute
/// `g(p) * jump(p)` and each density piece contributes a Gauss-Legendre sum
/// right-multiplied by the (constant) density value.
///
/// Fails with [`Error::AnchorAtAtom`] when `anchor` sits on an atom (the
/// two half-open conventions would disagree there) and with
/// [`Error::Structure`] when the density list does not tile the period.
pub fn period_integral<G>(
    m: &MatrixMeasureSpec,
    g: G,
    anchor: f64,
    opts: &QuadOptions,
) -> Result<CMat, Error>
where
    G: Fn(f64) -> CMat,
{
    let omega = m.period;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Structure(format!("bad period {omega}")));
    }
    let tol = position_tolerance(omega);
    let anchor_r = reduce_mod(anchor, omega);
    let mut atom_pos = Vec::with_capacity(m.atoms.len());
    for a in &m.atoms {
        let p = reduce_mod(a.position, omega);
        if (p - anchor_r).abs() <= tol || (p - anchor_r + omega).abs() <= tol {
            return Err(Error::AnchorAtAtom(anchor));
        }
        atom_pos.push(p);
    }
    let snap = snap_tol(omega, 0.0, omega);
    let mut cuts = vec![0.0];
    if !m.density.is_empty() {
        if m.density[0].from.abs() > snap || (m.density.last().unwrap().to - omega).abs() > snap {
            return Err(Error::Structure(
                "density pieces do not cover the period".to_string(),
            ));
        }
        for s in &m.density {
            cuts.push(s.to);
        }
    }
    let rule = gauss_legendre(opts.order);
    let shape = g(anchor);
    let (rows, cols) = (shape.nrows(), shape.ncols());
    if cols != m.dim {
        return Err(Error::Structure(format!(
            "integrand produces {rows} x {cols} values but the measure has dimension {}",
            m.dim
        )));
    }
    let mut acc = CMat::zeros(rows, cols);
    for step in steps_between(&atom_pos, &cuts, omega, anchor, anchor + omega) {
        match step {
            Step::Jump(p) => {
                let jump = jump_at(m, p).map(|v| Complex64::new(v, 0.0));
                acc += g(p) * jump;
            }
            Step::Drift(a, b) => {
                let dens = density_at(m, 0.5 * (a + b));
                if dens.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let dens_c = dens.map(|v| Complex64::new(v, 0.0));
                for (pa, pb) in subpieces(a, b, opts.max_piece_len) {
                    let (mid, half) = (0.5 * (pa + pb), 0.5 * (pb - pa));
                    let mut smooth = CMat::zeros(rows, cols);
                    for &(node, weight) in &rule {
                        smooth += g(mid + half * node) * Complex64::new(weight * half, 0.0);
                    }
                    acc += smooth * &dens_c;
                }
            }
        }
    }
    Ok(acc)
}
