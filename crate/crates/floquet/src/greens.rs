//! Green's function and resolvent off the spectrum.
//!
//! At a parameter with `|rho_1| > 1 > |rho_2|` the two Floquet solutions
//! separate the line: `psi_1` (multiplier `rho_1`) decays toward `-oo`,
//! `psi_2` (multiplier `rho_2`) decays toward `+oo`. With the normalization
//! `c_1^T J c_2 = 1` (parameter-independent along the line, since the
//! fundamental matrix is `J`-symplectic) the Green's function is the outer
//! product of the two, decaying side toward each argument:
//!
//! - `G(x, y) = psi_2(x) psi_1(y)^T` for `y < x`,
//! - `G(x, y) = psi_1(x) psi_2(y)^T` for `x < y`,
//! - the symmetrized mean on the diagonal,
//!
//! with balanced solution values throughout. Applying the resolvent to a
//! function supported on finitely many weight atoms reduces to prefix sums
//! of the scalar couplings `g_i(s) = psi_i(s)^T dw(s) f(s)`.

use crate::error::Error;
use crate::linalg::{cr, CVec2, Mat2, C64};
use crate::measure::{position_tolerance, CanonicalSystem, Planar};
use crate::monodromy::{floquet_from_monodromy, monodromy_planar, FloquetStructure};
use crate::propagate::{balanced_value, transfer, BalancedValue};
use crate::quadrature::QuadOptions;
use crate::spectral::detect_degenerate_subspace;

/// One value of the Green's function.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensValue {
    pub lambda: C64,
    pub x: f64,
    pub y: f64,
    pub matrix: Mat2,
    /// exponential decay rate away from the diagonal: `ln |rho_1| / omega`
    pub decay_rate: f64,
}

/// The separated Floquet pair at one parameter: multipliers and initial
/// vectors with `c1` attached to the expanding multiplier and `c2` scaled so
/// that `c1^T J c2 = 1`.
struct SeparatedPair {
    rho1: C64,
    rho2: C64,
    c1: CVec2,
    c2: CVec2,
}

fn separated_pair(p: &Planar, lambda: C64) -> Result<SeparatedPair, Error> {
    let data = floquet_from_monodromy(monodromy_planar(p, lambda)?, p.omega);
    let (c1, c2) = match &data.structure {
        FloquetStructure::Distinct { c1, c2 } => (*c1, *c2),
        _ => {
            return Err(Error::OnSpectrum {
                lambda,
                reason: "the monodromy matrix has coincident multipliers".to_string(),
            })
        }
    };
    let (rho1, rho2) = data.rho;
    if rho1.norm() <= 1.0 + 1e-9 {
        return Err(Error::OnSpectrum {
            lambda,
            reason: "both multipliers lie on the unit circle".to_string(),
        });
    }
    // c1^T J c2 with J = r [[0, -1], [1, 0]]
    let pairing = cr(p.r) * (c1[1] * c2[0] - c1[0] * c2[1]);
    if pairing.norm() <= 1e-14 * (c1.norm() * c2.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::Numeric(
            "the Floquet eigenvectors are numerically parallel".to_string(),
        ));
    }
    Ok(SeparatedPair {
        rho1,
        rho2,
        c1,
        c2: c2 / pairing,
    })
}

/// Balanced Floquet value at `x` via reduction into the base period:
/// `psi(x + k omega) = rho^k psi(x)`.
fn floquet_value(
    p: &Planar,
    lambda: C64,
    rho: C64,
    c: &CVec2,
    x: f64,
) -> Result<BalancedValue, Error> {
    let k = ((x - p.x0) / p.omega).floor();
    let x_red = x - k * p.omega;
    let v = balanced_value(p, lambda, c, x_red)?;
    let factor = (rho.ln() * cr(k)).exp();
    Ok(BalancedValue {
        x,
        minus: v.minus * factor,
        plus: v.plus * factor,
    })
}

/// Green's function of the whole-line operator at a resolvent parameter.
///
/// Requires a definite system (trivial degenerate subspace) and a parameter
/// with separated multipliers: [`Error::NonDefinite`] and
/// [`Error::OnSpectrum`] report the two failure modes, and parameters in
/// the singular set surface as [`Error::SingularAtom`].
pub fn greens_function(
    sys: &CanonicalSystem,
    lambda: C64,
    x: f64,
    y: f64,
) -> Result<GreensValue, Error> {
    let p = Planar::try_new(sys)?;
    let l0 = detect_degenerate_subspace(sys, &QuadOptions::default())?;
    if l0.dimension > 0 {
        return Err(Error::NonDefinite {
            dimension: l0.dimension,
        });
    }
    let pair = separated_pair(&p, lambda)?;
    let psi = |rho: C64, c: &CVec2, at: f64| floquet_value(&p, lambda, rho, c, at);
    let tol = position_tolerance(p.omega);
    let matrix = if (x - y).abs() <= tol {
        let p1 = psi(pair.rho1, &pair.c1, x)?.balanced();
        let p2 = psi(pair.rho2, &pair.c2, x)?.balanced();
        (p2 * p1.transpose() + p1 * p2.transpose()) * cr(0.5)
    } else if y < x {
        let p2x = psi(pair.rho2, &pair.c2, x)?.balanced();
        let p1y = psi(pair.rho1, &pair.c1, y)?.balanced();
        p2x * p1y.transpose()
    } else {
        let p1x = psi(pair.rho1, &pair.c1, x)?.balanced();
        let p2y = psi(pair.rho2, &pair.c2, y)?.balanced();
        p1x * p2y.transpose()
    };
    Ok(GreensValue {
        lambda,
        x,
        y,
        matrix,
        decay_rate: pair.rho1.norm().ln() / p.omega,
    })
}

/// One evaluation of a resolvent image, with both one-sided values and the
/// defect of the jump relation at that point (when it is an atom).
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventPoint {
    pub x: f64,
    pub minus: CVec2,
    pub plus: CVec2,
    /// at atoms: `|B+ u(+) - B- u(-) - dw f| / (1 + |u|)`; `None` at
    /// continuity points
    pub jump_residual: Option<f64>,
}

impl ResolventPoint {
    pub fn balanced(&self) -> CVec2 {
        (self.minus + self.plus) * cr(0.5)
    }
}

/// Resolvent image of an atom-supported function.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventData {
    pub lambda: C64,
    /// exponential decay rate of the image away from the support
    pub decay_rate: f64,
    pub points: Vec<ResolventPoint>,
    /// worst jump defect over all evaluated atoms
    pub max_jump_residual: f64,
    /// worst defect of the homogeneous propagation between evaluation
    /// points free of support
    pub max_interior_residual: f64,
}

/// Apply the resolvent to the function carried by `support`: finitely many
/// pairs `(position, vector)`, each position sitting on an atom of the
/// weight measure (globally, not per period). The image is evaluated at the
/// union of the support positions and `eval_points`.
///
/// The returned residuals are direct checks of the defining equations: at
/// every atom the jump relation `B+ u(+) - B- u(-) = dw f` (with `f = 0`
/// off the support), and between evaluation points the homogeneous
/// propagation of `u`.
pub fn resolvent_apply(
    sys: &CanonicalSystem,
    lambda: C64,
    support: &[(f64, CVec2)],
    eval_points: &[f64],
) -> Result<ResolventData, Error> {
    let p = Planar::try_new(sys)?;
    let l0 = detect_degenerate_subspace(sys, &QuadOptions::default())?;
    if l0.dimension > 0 {
        return Err(Error::NonDefinite {
            dimension: l0.dimension,
        });
    }
    let pair = separated_pair(&p, lambda)?;
    let tol = position_tolerance(p.omega);

    // validate and order the support
    let mut sup: Vec<(f64, CVec2)> = support.to_vec();
    sup.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for pair_w in sup.windows(2) {
        if (pair_w[1].0 - pair_w[0].0).abs() <= tol {
            return Err(Error::Structure(format!(
                "duplicate support point at {}",
                pair_w[0].0
            )));
        }
    }
    let mut dw_at = Vec::with_capacity(sup.len());
    for (s, _) in &sup {
        match p.jumps_at(*s) {
            Some((_, dw)) if dw.norm() > 0.0 => {
                dw_at.push(Mat2::new(cr(dw[(0, 0)]), cr(dw[(0, 1)]), cr(dw[(1, 0)]), cr(dw[(1, 1)])))
            }
            _ => {
                return Err(Error::Structure(format!(
                    "support point at {s} does not sit on a weight atom"
                )))
            }
        }
    }

    // scalar couplings of each support point to the two Floquet solutions
    let mut g1 = Vec::with_capacity(sup.len());
    let mut g2 = Vec::with_capacity(sup.len());
    for (i, (s, f)) in sup.iter().enumerate() {
        let p1 = floquet_value(&p, lambda, pair.rho1, &pair.c1, *s)?.balanced();
        let p2 = floquet_value(&p, lambda, pair.rho2, &pair.c2, *s)?.balanced();
        let wf = dw_at[i] * f;
        g1.push((p1.transpose() * wf)[(0, 0)]);
        g2.push((p2.transpose() * wf)[(0, 0)]);
    }

    // evaluation set: support plus requested points
    let mut xs: Vec<f64> = sup.iter().map(|(s, _)| *s).chain(eval_points.iter().copied()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let find_support = |x: f64| sup.iter().position(|(s, _)| (s - x).abs() <= tol);

    let mut points = Vec::with_capacity(xs.len());
    let mut max_jump = 0.0f64;
    for &x in &xs {
        let p1 = floquet_value(&p, lambda, pair.rho1, &pair.c1, x)?;
        let p2 = floquet_value(&p, lambda, pair.rho2, &pair.c2, x)?;
        let mut s1_lt = cr(0.0); // sum of g1 over support strictly below x
        let mut s1_le = cr(0.0);
        let mut s2_gt = cr(0.0);
        let mut s2_ge = cr(0.0);
        for (i, (s, _)) in sup.iter().enumerate() {
            if *s < x - tol {
                s1_lt += g1[i];
                s1_le += g1[i];
            } else if (*s - x).abs() <= tol {
                s1_le += g1[i];
                s2_ge += g2[i];
            } else {
                s2_gt += g2[i];
                s2_ge += g2[i];
            }
        }
        let minus = p2.minus * s1_lt + p1.minus * s2_ge;
        let plus = p2.plus * s1_le + p1.plus * s2_gt;
        let jump_residual = match p.jumps_at(x) {
            Some((dq, dw)) => {
                let half = |m: &crate::linalg::RMat2| {
                    Mat2::new(cr(m[(0, 0)]), cr(m[(0, 1)]), cr(m[(1, 0)]), cr(m[(1, 1)]))
                };
                let j = Mat2::new(cr(0.0), cr(-p.r), cr(p.r), cr(0.0));
                let c_half = (half(dq) - half(dw) * lambda) * cr(0.5);
                let b_plus = j + c_half;
                let b_minus = j - c_half;
                let rhs = match find_support(x) {
                    Some(i) => half(dw) * sup[i].1,
                    None => CVec2::zeros(),
                };
                let defect = b_plus * plus - b_minus * minus - rhs;
                let scale = 1.0 + minus.norm() + plus.norm();
                let res = defect.norm() / scale;
                max_jump = max_jump.max(res);
                Some(res)
            }
            None => None,
        };
        points.push(ResolventPoint {
            x,
            minus,
            plus,
            jump_residual,
        });
    }

    // homogeneous propagation between evaluation points with no support
    // strictly inside nor at the left endpoint
    let mut max_interior = 0.0f64;
    for i in 0..points.len().saturating_sub(1) {
        let (a, b) = (points[i].x, points[i + 1].x);
        if sup.iter().any(|(s, _)| *s >= a - tol && *s < b - tol) {
            continue;
        }
        let t = transfer(&p, lambda, a, b)?;
        let propagated = t.full() * points[i].minus;
        let res = (propagated - points[i + 1].minus).norm() / (1.0 + points[i + 1].minus.norm());
        max_interior = max_interior.max(res);
    }

    Ok(ResolventData {
        lambda,
        decay_rate: pair.rho1.norm().ln() / p.omega,
        points,
        max_jump_residual: max_jump,
        max_interior_residual: max_interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::measure::{dmat2, MatrixMeasureSpec};
    use approx::assert_abs_diff_eq;

    fn full_comb(a: f64, b: f64, d: f64) -> CanonicalSystem {
        let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[a, b], [b, d]]));
        let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 1.0]]));
        CanonicalSystem::planar(1.0, q, w, None)
    }

    fn free_schroedinger() -> CanonicalSystem {
        let q = MatrixMeasureSpec::new(2, 1.0).with_density(
            0.0,
            1.0,
            dmat2([[0.0, 0.0], [0.0, -1.0]]),
        );
        let w = MatrixMeasureSpec::new(2, 1.0).with_density(
            0.0,
            1.0,
            dmat2([[1.0, 0.0], [0.0, 0.0]]),
        );
        CanonicalSystem::planar(1.0, q, w, None)
    }

    fn rank_one_constant() -> CanonicalSystem {
        let q = MatrixMeasureSpec::new(2, 1.0).with_density(
            0.0,
            1.0,
            dmat2([[0.8, 0.6], [0.6, 0.0]]),
        );
        let w = MatrixMeasureSpec::new(2, 1.0).with_density(
            0.0,
            1.0,
            dmat2([[1.0, 0.0], [0.0, 0.0]]),
        );
        CanonicalSystem::planar(1.0, q, w, None)
    }

    // At lambda = 0 the unit-coupled comb has monodromy diag(1/3, 3) from
    // base point 1/2: psi_1 = U e_2 (multiplier 3), psi_2 = U e_1
    // (multiplier 1/3), both piecewise constant, and c1^T J c2 = 1 already.

    #[test]
    fn greens_values_of_the_comb_are_piecewise_exact() {
        let sys = full_comb(0.0, 1.0, 0.0);
        let lambda = cr(0.0);
        // same cell, x < y: psi_1(x) psi_2(y)^T = e2 e1^T
        let g = greens_function(&sys, lambda, 0.6, 0.7).unwrap();
        assert!((g.matrix - Mat2::new(cr(0.0), cr(0.0), cr(1.0), cr(0.0))).norm() < 1e-12);
        // swap the arguments: the transpose
        let gt = greens_function(&sys, lambda, 0.7, 0.6).unwrap();
        assert!((gt.matrix - g.matrix.transpose()).norm() < 1e-12);
        // one atom between x and y: decay by 1/3
        let g13 = greens_function(&sys, lambda, 1.3, 0.6).unwrap();
        assert!(
            (g13.matrix - Mat2::new(cr(0.0), cr(1.0 / 3.0), cr(0.0), cr(0.0))).norm() < 1e-12
        );
        // diagonal: symmetrized mean
        let gd = greens_function(&sys, lambda, 0.6, 0.6).unwrap();
        assert!((gd.matrix - Mat2::new(cr(0.0), cr(0.5), cr(0.5), cr(0.0))).norm() < 1e-12);
        assert_abs_diff_eq!(gd.decay_rate, 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn greens_decays_geometrically_across_atoms() {
        let sys = full_comb(0.0, 1.0, 0.0);
        let lambda = cr(0.0);
        let base = greens_function(&sys, lambda, 0.6, 0.4).unwrap().matrix.norm();
        for k in 1..6 {
            let further = greens_function(&sys, lambda, 0.6 + k as f64, 0.4)
                .unwrap()
                .matrix
                .norm();
            assert_abs_diff_eq!(further / base, (1.0f64 / 3.0).powi(k), epsilon = 1e-10);
        }
    }

    #[test]
    fn greens_is_symmetric_at_complex_parameters() {
        let sys = full_comb(0.4, 1.0, -0.2);
        let lambda = c(0.8, 0.9);
        for (x, y) in [(0.3, 2.6), (-1.2, 0.9), (0.25, 0.25)] {
            let g = greens_function(&sys, lambda, x, y).unwrap();
            let h = greens_function(&sys, lambda, y, x).unwrap();
            assert!((g.matrix - h.matrix.transpose()).norm() < 1e-10 * g.matrix.norm());
        }
    }

    #[test]
    fn greens_rejects_spectrum_and_indefiniteness() {
        // inside a band of the free system the multipliers are unimodular
        assert!(matches!(
            greens_function(&free_schroedinger(), cr(4.0), 0.3, 0.6),
            Err(Error::OnSpectrum { .. })
        ));
        // non-definite system
        assert!(matches!(
            greens_function(&rank_one_constant(), c(0.0, 1.0), 0.3, 0.6),
            Err(Error::NonDefinite { dimension: 1 })
        ));
        // singular parameter of the comb: lambda = i sqrt(3)
        assert!(matches!(
            greens_function(&full_comb(0.0, 1.0, 0.0), c(0.0, 3.0f64.sqrt()), 0.3, 0.6),
            Err(Error::SingularAtom { .. })
        ));
    }

    #[test]
    fn resolvent_of_a_single_atom_source_is_one_sided() {
        // lambda = 0, f = e1 at the atom 0: psi_1 couples through
        // dw f = e1 only via its first component, which vanishes, so the
        // image is 2 psi_1 below the source and zero above it
        let sys = full_comb(0.0, 1.0, 0.0);
        let lambda = cr(0.0);
        let f = CVec2::new(cr(1.0), cr(0.0));
        let eval: Vec<f64> = (-8..=8).map(|k| 0.5 * k as f64).collect();
        let data = resolvent_apply(&sys, lambda, &[(0.0, f)], &eval).unwrap();
        assert!(data.max_jump_residual < 1e-12, "jump {}", data.max_jump_residual);
        assert!(
            data.max_interior_residual < 1e-12,
            "interior {}",
            data.max_interior_residual
        );
        assert_abs_diff_eq!(data.decay_rate, 3.0f64.ln(), epsilon = 1e-12);
        let at = |x: f64| {
            data.points
                .iter()
                .find(|pt| (pt.x - x).abs() < 1e-9)
                .unwrap()
        };
        // exact values at the source
        let src = at(0.0);
        assert!((src.minus - CVec2::new(cr(0.0), cr(2.0 / 3.0))).norm() < 1e-12);
        assert!(src.plus.norm() < 1e-12);
        assert!(src.jump_residual.is_some());
        // zero on the right, geometric decay on the left
        assert!(at(2.5).minus.norm() < 1e-14);
        let left1 = at(-0.5).minus.norm();
        let left2 = at(-1.5).minus.norm();
        assert_abs_diff_eq!(left2 / left1, 1.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn resolvent_residuals_vanish_for_generic_sources() {
        let sys = full_comb(0.4, 1.0, -0.2);
        let lambda = c(0.3, 0.8);
        let support = vec![
            (0.0, CVec2::new(cr(0.7), cr(-0.2))),
            (2.0, CVec2::new(c(0.1, 0.4), cr(1.0))),
        ];
        let eval: Vec<f64> = (-10..=12).map(|k| 0.5 * k as f64).collect();
        let data = resolvent_apply(&sys, lambda, &support, &eval).unwrap();
        assert!(data.max_jump_residual < 1e-10, "jump {}", data.max_jump_residual);
        assert!(
            data.max_interior_residual < 1e-10,
            "interior {}",
            data.max_interior_residual
        );
        // every atom in the evaluation set carries a jump report
        for pt in &data.points {
            if (pt.x - pt.x.round()).abs() < 1e-9 {
                assert!(pt.jump_residual.is_some());
            } else {
                assert!(pt.jump_residual.is_none());
            }
        }
    }

    #[test]
    fn resolvent_validates_its_support() {
        let sys = full_comb(0.0, 1.0, 0.0);
        let f = CVec2::new(cr(1.0), cr(0.0));
        // not an atom at all
        assert!(matches!(
            resolvent_apply(&sys, cr(0.0), &[(0.3, f)], &[]),
            Err(Error::Structure(_))
        ));
        // duplicate support
        assert!(matches!(
            resolvent_apply(&sys, cr(0.0), &[(1.0, f), (1.0, f)], &[]),
            Err(Error::Structure(_))
        ));
    }
}
