//! Transfer matrices and solution values for planar systems.
//!
//! Solutions of `J u' + q u = lambda w u` with measure coefficients are
//! left-continuous with a jump at every atom: writing `B(+/-) = J +/- (dq -
//! lambda dw) / 2`, the two one-sided values at an atom are linked by
//! `B+ u(+) = B- u(-)`, so crossing the atom multiplies by `A = B+^{-1} B-`.
//! Between atoms the coefficients are constant matrices and the solution
//! follows the exponential of `J^{-1} (lambda w - q) h`.
//!
//! A transfer over `[a, b)` is the ordered product of these factors. The
//! convention is half-open on the right: an atom sitting exactly at `a` is
//! crossed, one exactly at `b` is not, so a transfer maps the left limit at
//! `a` to the left limit at `b` and transfers compose exactly.

use crate::error::Error;
use crate::linalg::{cr, inv2, CVec2, Mat2, RMat2, C64};
use crate::measure::{reduce_mod, CanonicalSystem, Planar, Step};

/// Transfer matrix of the system over `[from, to)` at one parameter value,
/// stored with a split-off scale so long spans cannot overflow: the actual
/// matrix is `exp(log_scale) * matrix`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub lambda: C64,
    pub from: f64,
    pub to: f64,
    pub matrix: Mat2,
    pub log_scale: f64,
}

impl TransferMatrix {
    /// The plain matrix with the scale folded back in. Overflows to infinity
    /// when `log_scale` exceeds roughly `709`; prefer working with the pair
    /// for long spans at non-real parameters.
    pub fn full(&self) -> Mat2 {
        self.matrix * cr(self.log_scale.exp())
    }

    /// Apply to a left-limit value at `from`, producing the left-limit value
    /// at `to` together with its own split-off scale.
    pub fn apply(&self, v: &CVec2) -> (CVec2, f64) {
        (self.matrix * v, self.log_scale)
    }
}

/// Factor norms above which the running product is renormalized into the
/// `log_scale` exponent.
const RESCALE_NORM: f64 = 1e150;

/// Jump factor `B+^{-1} B-` across an atom with weight jumps `dq`, `dw`.
pub(crate) fn atom_transfer(r: f64, dq: &RMat2, dw: &RMat2, lambda: C64) -> Result<Mat2, Error> {
    let half = |i: usize, j: usize| (cr(dq[(i, j)]) - lambda * dw[(i, j)]) * 0.5;
    let j = Mat2::new(cr(0.0), cr(-r), cr(r), cr(0.0));
    let h = Mat2::new(half(0, 0), half(0, 1), half(1, 0), half(1, 1));
    let bp = j + h;
    let bm = j - h;
    let det = bp.determinant();
    let scale = r * r + 0.25 * (dq.norm() + lambda.norm() * dw.norm()).powi(2);
    if det.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularJump { lambda });
    }
    // adjugate / det inverse keeps the factor exact where the data is exact
    let inv_bp = Mat2::new(bp[(1, 1)], -bp[(0, 1)], -bp[(1, 0)], bp[(0, 0)]) / det;
    Ok(inv_bp * bm)
}

/// Exponential factor `exp(h J^{-1} (lambda wd - qd))` for a drift of length
/// `h` across densities `qd`, `wd`.
pub(crate) fn segment_transfer(r: f64, qd: &RMat2, wd: &RMat2, lambda: C64, h: f64) -> Mat2 {
    let s00 = lambda * wd[(0, 0)] - cr(qd[(0, 0)]);
    let s01 = lambda * wd[(0, 1)] - cr(qd[(0, 1)]);
    let s10 = lambda * wd[(1, 0)] - cr(qd[(1, 0)]);
    let s11 = lambda * wd[(1, 1)] - cr(qd[(1, 1)]);
    // J^{-1} = (1/r) [[0, 1], [-1, 0]] applied on the left
    let k = Mat2::new(s10, s11, -s00, -s01) / cr(r);
    crate::linalg::expm2(&(k * cr(h)))
}

/// Transfer over `[a, b)` (inverted when `b < a`), with automatic rescaling
/// into `log_scale` on long spans. A parameter in the singular set of an
/// atom inside the span fails with [`Error::SingularAtom`].
pub(crate) fn transfer(p: &Planar, lambda: C64, a: f64, b: f64) -> Result<TransferMatrix, Error> {
    if b < a {
        let fwd = transfer(p, lambda, b, a)?;
        let inv = inv2(&fwd.matrix).ok_or_else(|| {
            Error::Numeric(format!(
                "transfer over [{b}, {a}) is numerically singular and cannot be reversed"
            ))
        })?;
        return Ok(TransferMatrix {
            lambda,
            from: a,
            to: b,
            matrix: inv,
            log_scale: -fwd.log_scale,
        });
    }
    let mut m = Mat2::identity();
    let mut log_scale = 0.0;
    for step in p.steps(a, b) {
        match step {
            Step::Jump(pos) => {
                let (dq, dw) = p.jumps_at(pos).ok_or_else(|| {
                    Error::Numeric(format!("lost track of the atom at {pos}"))
                })?;
                let factor = atom_transfer(p.r, dq, dw, lambda).map_err(|_| {
                    Error::SingularAtom {
                        position: reduce_mod(pos, p.omega),
                        lambda,
                    }
                })?;
                m = factor * m;
            }
            Step::Drift(da, db) => {
                let (qd, wd) = p.densities_at(0.5 * (da + db));
                m = segment_transfer(p.r, qd, wd, lambda, db - da) * m;
            }
        }
        let norm = m.norm();
        if norm > RESCALE_NORM {
            m /= cr(norm);
            log_scale += norm.ln();
        }
    }
    Ok(TransferMatrix {
        lambda,
        from: a,
        to: b,
        matrix: m,
        log_scale,
    })
}

/// Fundamental matrix `U(x, lambda)` of the system: the transfer from the
/// base point to `x`, normalized to the identity at the base point. For
/// `x` below the base point this is the inverse of the upward transfer.
pub fn fundamental_matrix(
    sys: &CanonicalSystem,
    lambda: C64,
    x: f64,
) -> Result<TransferMatrix, Error> {
    let p = Planar::try_new(sys)?;
    transfer(&p, lambda, p.x0, x)
}

/// Transfer matrix between two arbitrary points (it maps left limits to
/// left limits; see the module notes for the atom convention).
pub fn transfer_between(
    sys: &CanonicalSystem,
    lambda: C64,
    from: f64,
    to: f64,
) -> Result<TransferMatrix, Error> {
    let p = Planar::try_new(sys)?;
    transfer(&p, lambda, from, to)
}

/// Left limit, right limit and their mean at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedValue {
    pub x: f64,
    pub minus: CVec2,
    pub plus: CVec2,
}

impl BalancedValue {
    /// The balanced value `(u(-) + u(+)) / 2`, the natural evaluation of a
    /// solution at an atom.
    pub fn balanced(&self) -> CVec2 {
        (self.minus + self.plus) * cr(0.5)
    }
}

/// Both one-sided values at `x` of the solution with value `c` at the base
/// point. At continuity points the two sides agree.
pub fn solution_value(
    sys: &CanonicalSystem,
    lambda: C64,
    c: &CVec2,
    x: f64,
) -> Result<BalancedValue, Error> {
    let p = Planar::try_new(sys)?;
    balanced_value(&p, lambda, c, x)
}

/// Internal worker for [`solution_value`] on a prepared planar view.
pub(crate) fn balanced_value(
    p: &Planar,
    lambda: C64,
    c: &CVec2,
    x: f64,
) -> Result<BalancedValue, Error> {
    let t = transfer(p, lambda, p.x0, x)?;
    let minus = t.matrix * cr(t.log_scale.exp()) * c;
    let plus = match p.jumps_at(x) {
        Some((dq, dw)) => {
            let a = atom_transfer(p.r, dq, dw, lambda).map_err(|_| Error::SingularAtom {
                position: reduce_mod(x, p.omega),
                lambda,
            })?;
            a * minus
        }
        None => minus,
    };
    Ok(BalancedValue { x, minus, plus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};
    use crate::measure::{dmat2, CanonicalSystem, MatrixMeasureSpec, Planar};
    use approx::assert_abs_diff_eq;

    /// free one-dimensional Schroedinger operator in canonical form:
    /// q = diag(0, -1) dx, w = diag(1, 0) dx, period 1
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

    /// comb with a scalar coupling `a` and weight scale `alpha` on the first
    /// coordinate, Lebesgue elsewhere in q
    fn weighted_comb(a: f64, alpha: f64) -> CanonicalSystem {
        let q = MatrixMeasureSpec::new(2, 1.0)
            .with_atom(0.0, dmat2([[a, 0.0], [0.0, 0.0]]))
            .with_density(0.0, 1.0, dmat2([[0.0, 0.0], [0.0, -1.0]]));
        let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[alpha, 0.0], [0.0, 0.0]]));
        CanonicalSystem::planar(1.0, q, w, None)
    }

    #[test]
    fn drift_factor_matches_harmonic_rotation() {
        // K = [[0, 1], [-lambda, 0]]: for lambda = 4, over h = 1 the factor
        // is [[cos 2, sin(2)/2], [-2 sin 2, cos 2]]
        let qd = RMat2::new(0.0, 0.0, 0.0, -1.0);
        let wd = RMat2::new(1.0, 0.0, 0.0, 0.0);
        let m = segment_transfer(1.0, &qd, &wd, cr(4.0), 1.0);
        assert_abs_diff_eq!(m[(0, 0)].re, 2.0f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(m[(0, 1)].re, 2.0f64.sin() / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 0)].re, -2.0 * 2.0f64.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 1)].re, 2.0f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(m.map(|v| v.im).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn scalar_weight_atom_is_a_shear() {
        // dq = diag(a, 0), dw = diag(alpha, 0) gives [[1, 0], [a - lambda alpha, 1]]
        let (a, alpha) = (1.3, 0.7);
        let dq = RMat2::new(a, 0.0, 0.0, 0.0);
        let dw = RMat2::new(alpha, 0.0, 0.0, 0.0);
        for lambda in [cr(0.0), cr(2.5), c(1.0, 1.0)] {
            let m = atom_transfer(1.0, &dq, &dw, lambda).unwrap();
            let shear = cr(a) - lambda * alpha;
            assert!((m[(0, 0)] - cr(1.0)).norm() < 1e-15);
            assert!((m[(0, 1)]).norm() < 1e-15);
            assert!((m[(1, 0)] - shear).norm() < 1e-15);
            assert!((m[(1, 1)] - cr(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rank_one_coupled_atom_matches_closed_form() {
        // dq = [[a, b], [b, 0]], dw = diag(1, 0), r = 1:
        // det B+ = 1 - b^2 / 4 and the factor is
        // (1/det) [[(1 - b/2)^2, 0], [a - lambda, (1 + b/2)^2]]
        let (a, b) = (0.4, 1.0);
        let dq = RMat2::new(a, b, b, 0.0);
        let dw = RMat2::new(1.0, 0.0, 0.0, 0.0);
        let lambda = cr(0.3);
        let m = atom_transfer(1.0, &dq, &dw, lambda).unwrap();
        let det = 1.0 - b * b / 4.0;
        assert_abs_diff_eq!(m[(0, 0)].re, (1.0 - b / 2.0).powi(2) / det, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 1)].re, (1.0 + b / 2.0).powi(2) / det, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 0)].re, (a - lambda.re) / det, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        // determinant of the jump factor is exactly one
        assert_abs_diff_eq!(m.determinant().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_parameter_is_rejected() {
        // dq = 0, dw = I: singular exactly at lambda = +-2i (det = (4 + lambda^2)/4)
        let dq = RMat2::zeros();
        let dw = RMat2::identity();
        assert!(matches!(
            atom_transfer(1.0, &dq, &dw, c(0.0, 2.0)),
            Err(Error::SingularJump { .. })
        ));
        assert!(atom_transfer(1.0, &dq, &dw, c(0.0, 1.9)).is_ok());
    }

    #[test]
    fn fundamental_matrix_of_free_system_is_trigonometric() {
        let sys = free_schroedinger();
        for lambda in [1.0f64, 4.0, 9.0, 17.3] {
            let s = lambda.sqrt();
            for x in [0.3, 1.0, 2.7] {
                let u = fundamental_matrix(&sys, cr(lambda), x).unwrap();
                assert_eq!(u.log_scale, 0.0);
                let m = u.matrix;
                assert_abs_diff_eq!(m[(0, 0)].re, (s * x).cos(), epsilon = 1e-12);
                assert_abs_diff_eq!(m[(0, 1)].re, (s * x).sin() / s, epsilon = 1e-12);
                assert_abs_diff_eq!(m[(1, 0)].re, -s * (s * x).sin(), epsilon = 1e-12);
                assert_abs_diff_eq!(m[(1, 1)].re, (s * x).cos(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn transfers_compose_and_invert() {
        let sys = weighted_comb(1.0, 1.0);
        let p = Planar::try_new(&sys).unwrap();
        let lambda = c(0.7, 0.2);
        let t_ac = transfer(&p, lambda, -0.8, 2.3).unwrap();
        let t_ab = transfer(&p, lambda, -0.8, 1.1).unwrap();
        let t_bc = transfer(&p, lambda, 1.1, 2.3).unwrap();
        let composed = t_bc.matrix * t_ab.matrix;
        assert!((composed - t_ac.matrix).norm() < 1e-12 * t_ac.matrix.norm());

        let back = transfer(&p, lambda, 2.3, -0.8).unwrap();
        let round = back.matrix * t_ac.matrix;
        assert!((round - Mat2::identity()).norm() < 1e-12);
    }

    #[test]
    fn atom_at_span_start_is_crossed_once() {
        let sys = weighted_comb(1.0, 1.0);
        let p = Planar::try_new(&sys).unwrap();
        let lambda = cr(0.0);
        // [0, 1) crosses only the atom at 0; with a = 1, lambda = 0 the comb
        // contributes the shear [[1,0],[1,1]] and the drift contributes
        // [[1, sin-like], ...]; composing [0, 1) and [1, 2) must equal [0, 2)
        let t01 = transfer(&p, lambda, 0.0, 1.0).unwrap();
        let t12 = transfer(&p, lambda, 1.0, 2.0).unwrap();
        let t02 = transfer(&p, lambda, 0.0, 2.0).unwrap();
        assert!((t12.matrix * t01.matrix - t02.matrix).norm() < 1e-13);
        // periodicity of the coefficients: the two unit transfers agree
        assert!((t01.matrix - t12.matrix).norm() < 1e-13);
    }

    #[test]
    fn monodromy_of_weighted_comb_reproduces_discriminant_line() {
        // with q = a comb + diag(0, -1) dx and w = alpha comb, the unit
        // transfer from base point 1/2 has trace 2 + a - alpha lambda
        let (a, alpha) = (1.0, 1.0);
        let sys = weighted_comb(a, alpha);
        assert_eq!(sys.base_point, 0.5);
        for lambda in [-1.0, 0.0, 1.0, 3.7] {
            let m = fundamental_matrix(&sys, cr(lambda), sys.base_point + 1.0).unwrap();
            let d = m.matrix.trace();
            assert_abs_diff_eq!(d.re, 2.0 + a - alpha * lambda, epsilon = 1e-12);
            assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(m.matrix.determinant().re, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn explicit_monodromy_entries_at_zero_parameter() {
        // base point -1/2 (equivalently 1/2), a = alpha = 1, lambda = 0:
        // M = drift(1/2) * shear(1) * drift(1/2) with drift = [[1, t], [0, 1]]
        // equals [[3/2, 5/4], [1, 3/2]]
        let sys = weighted_comb(1.0, 1.0);
        let m = fundamental_matrix(&sys, cr(0.0), 1.5).unwrap().matrix;
        assert_abs_diff_eq!(m[(0, 0)].re, 1.5, epsilon = 1e-13);
        assert_abs_diff_eq!(m[(0, 1)].re, 1.25, epsilon = 1e-13);
        assert_abs_diff_eq!(m[(1, 0)].re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(m[(1, 1)].re, 1.5, epsilon = 1e-13);
    }

    #[test]
    fn balanced_values_straddle_atoms() {
        let sys = weighted_comb(1.0, 1.0);
        let lambda = cr(0.0);
        let cvec = CVec2::new(cr(1.0), cr(0.0));
        // at the atom x = 1 the plus side differs by the shear
        let v = solution_value(&sys, lambda, &cvec, 1.0).unwrap();
        let shear = v.plus - v.minus;
        assert_abs_diff_eq!(shear[0].norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(shear[1].re, v.minus[0].re, epsilon = 1e-13);
        // at a continuity point both sides agree
        let vc = solution_value(&sys, lambda, &cvec, 0.75).unwrap();
        assert_eq!(vc.minus, vc.plus);
        // balanced value is the mean
        assert_abs_diff_eq!(
            (v.balanced() - (v.minus + v.plus) * cr(0.5)).norm(),
            0.0,
            epsilon = 1e-16
        );
    }

    #[test]
    fn downward_evaluation_matches_inverse_transfer() {
        let sys = weighted_comb(0.7, 0.4);
        let lambda = c(0.3, 0.1);
        let cvec = CVec2::new(cr(0.8), cr(-0.5));
        let v = solution_value(&sys, lambda, &cvec, -2.3).unwrap();
        // pushing the value back up recovers c
        let t_up = transfer_between(&sys, lambda, -2.3, sys.base_point).unwrap();
        let back = t_up.matrix * v.minus;
        assert!((back - cvec).norm() < 1e-12);
    }
}
