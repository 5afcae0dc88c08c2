//! The one-dimensional case.
//!
//! For `n = 1` the matrix `J` is `i j` with a real `j != 0`, the solution
//! space at each parameter is one-dimensional, and every transfer factor is
//! a complex scalar:
//!
//! - an atom contributes `(J - c) / (J + c)` with `c = (dq - lambda dw)/2`,
//! - a constant-density piece of length `h` contributes
//!   `exp(h (lambda w - q) / J)`.
//!
//! For real `lambda` and real measure data every factor has modulus one, so
//! the multiplier `rho(lambda)` stays on the unit circle across the whole
//! real line: a system with nontrivial weight has no spectral gaps at all.
//! [`scalar_spectrum`] reports that while recording the worst numerical
//! deviation `||rho| - 1|` it saw.

use crate::error::Error;
use crate::linalg::{c, cr, C64};
use crate::measure::{reduce_mod, validate_system, CanonicalSystem, ScalarView, Step};
use crate::spectral::{Band, BandFlags, BandReport};

/// Both one-sided values of a scalar solution at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarValue {
    pub x: f64,
    pub minus: C64,
    pub plus: C64,
}

impl ScalarValue {
    pub fn balanced(&self) -> C64 {
        (self.minus + self.plus) * 0.5
    }
}

/// Multiplier and Floquet exponent of a scalar system at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarFloquet {
    pub rho: C64,
    /// principal exponent `ln(rho) / omega`
    pub alpha: C64,
}

/// `None` when the atom is singular at this parameter.
fn scalar_atom_factor(j_im: f64, dq: f64, dw: f64, lambda: C64) -> Option<C64> {
    let j = c(0.0, j_im);
    let half = (cr(dq) - lambda * dw) * 0.5;
    let denom = j + half;
    let scale = j_im.abs() + half.norm();
    if denom.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return None;
    }
    Some((j - half) / denom)
}

fn scalar_drift_factor(j_im: f64, qd: f64, wd: f64, lambda: C64, h: f64) -> C64 {
    ((lambda * wd - cr(qd)) / c(0.0, j_im) * cr(h)).exp()
}

/// Product of the transfer factors over `[a, b)`, with the same half-open
/// convention as the planar walk.
pub(crate) fn scalar_transfer(v: &ScalarView, lambda: C64, a: f64, b: f64) -> Result<C64, Error> {
    if b < a {
        let fwd = scalar_transfer(v, lambda, b, a)?;
        if fwd.norm() == 0.0 {
            return Err(Error::Numeric(format!(
                "transfer over [{b}, {a}) vanished and cannot be reversed"
            )));
        }
        return Ok(cr(1.0) / fwd);
    }
    let mut acc = cr(1.0);
    for step in v.steps(a, b) {
        match step {
            Step::Jump(pos) => {
                let (dq, dw) = v
                    .jumps_at(pos)
                    .ok_or_else(|| Error::Numeric(format!("lost track of the atom at {pos}")))?;
                let factor = scalar_atom_factor(v.j_im, dq, dw, lambda).ok_or_else(|| {
                    Error::SingularAtom {
                        position: reduce_mod(pos, v.omega),
                        lambda,
                    }
                })?;
                acc *= factor;
            }
            Step::Drift(da, db) => {
                let (qd, wd) = v.densities_at(0.5 * (da + db));
                acc *= scalar_drift_factor(v.j_im, qd, wd, lambda, db - da);
            }
        }
    }
    Ok(acc)
}

/// The multiplier `rho(lambda)`: the factor a solution picks up over one
/// period. Scalar products commute, so it does not depend on the base point.
pub fn scalar_multiplier(sys: &CanonicalSystem, lambda: C64) -> Result<C64, Error> {
    let v = ScalarView::try_new(sys)?;
    scalar_transfer(&v, lambda, v.x0, v.x0 + v.omega)
}

/// Multiplier together with its principal Floquet exponent.
pub fn scalar_floquet(sys: &CanonicalSystem, lambda: C64) -> Result<ScalarFloquet, Error> {
    let v = ScalarView::try_new(sys)?;
    let rho = scalar_transfer(&v, lambda, v.x0, v.x0 + v.omega)?;
    Ok(ScalarFloquet {
        rho,
        alpha: rho.ln() / v.omega,
    })
}

/// Both one-sided values at `x` of the solution with value `c0` at the base
/// point. Far evaluation points are reduced into the base period and paid
/// for with a power of the multiplier, which is exact here because scalar
/// factors commute.
pub fn scalar_solution_value(
    sys: &CanonicalSystem,
    lambda: C64,
    c0: C64,
    x: f64,
) -> Result<ScalarValue, Error> {
    let v = ScalarView::try_new(sys)?;
    let k = ((x - v.x0) / v.omega).floor();
    let x_red = x - k * v.omega;
    let factor = if k == 0.0 {
        cr(1.0)
    } else {
        let rho = scalar_transfer(&v, lambda, v.x0, v.x0 + v.omega)?;
        (rho.ln() * cr(k)).exp()
    };
    let minus = scalar_transfer(&v, lambda, v.x0, x_red)? * c0 * factor;
    let plus = match v.jumps_at(x) {
        Some((dq, dw)) => {
            let a = scalar_atom_factor(v.j_im, dq, dw, lambda).ok_or_else(|| {
                Error::SingularAtom {
                    position: reduce_mod(x, v.omega),
                    lambda,
                }
            })?;
            minus * a
        }
        None => minus,
    };
    Ok(ScalarValue { x, minus, plus })
}

/// Spectrum of a scalar system over a window.
///
/// A valid scalar system with nontrivial weight has purely real transfer
/// factors of modulus one at every real parameter, so the window is one
/// uninterrupted band. The report records the worst observed deviation of
/// `|rho|` from one over `samples` evenly spaced parameters as a numerical
/// cross-check, and flags the whole-line structure. A system with zero
/// weight has no spectrum to report and is rejected as [`Error::TrivialWeight`].
pub fn scalar_spectrum(
    sys: &CanonicalSystem,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<BandReport, Error> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Structure(format!("bad window [{lo}, {hi}]")));
    }
    let report = validate_system(sys);
    if !report.ok {
        return Err(Error::InvalidSystem(report.summary()));
    }
    let v = ScalarView::try_new(sys)?;
    if sys.w.is_zero() {
        return Err(Error::TrivialWeight);
    }
    let samples = samples.max(2);
    let mut dev = 0.0f64;
    for i in 0..samples {
        let lambda = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let rho = scalar_transfer(&v, cr(lambda), v.x0, v.x0 + v.omega)?;
        dev = dev.max((rho.norm() - 1.0).abs());
    }
    Ok(BandReport {
        window: (lo, hi),
        bands: vec![Band {
            lo,
            hi,
            clipped_lo: true,
            clipped_hi: true,
        }],
        edges: Vec::new(),
        flags: BandFlags {
            scalar_whole_line: true,
            ..BandFlags::default()
        },
        tolerance: 0.0,
        max_multiplier_deviation: Some(dev),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{dmat1, MatrixMeasureSpec};
    use approx::assert_abs_diff_eq;

    /// J = i, q = 2 * unit comb, w = Lebesgue: the atom contributes
    /// (i - 1)/(i + 1) = i and the drift contributes e^{-i lambda}, so
    /// rho(lambda) = i e^{-i lambda}.
    fn comb_with_lebesgue_weight() -> CanonicalSystem {
        let q = MatrixMeasureSpec::new(1, 1.0).with_atom(0.0, dmat1(2.0));
        let w = MatrixMeasureSpec::new(1, 1.0).with_density(0.0, 1.0, dmat1(1.0));
        CanonicalSystem::scalar(1.0, q, w, None)
    }

    #[test]
    fn multiplier_matches_the_closed_form() {
        let sys = comb_with_lebesgue_weight();
        for lambda in [0.0, 1.7, -3.2, 11.0] {
            let rho = scalar_multiplier(&sys, cr(lambda)).unwrap();
            let expected = c(0.0, 1.0) * c(0.0, -lambda).exp();
            assert!((rho - expected).norm() < 1e-12, "lambda = {lambda}");
            assert_abs_diff_eq!(rho.norm(), 1.0, epsilon = 1e-13);
        }
        // off the real axis the modulus grows like e^{Im lambda}
        let rho = scalar_multiplier(&sys, c(1.0, 1.0)).unwrap();
        let expected = c(0.0, 1.0) * (c(0.0, -1.0) * c(1.0, 1.0)).exp();
        assert!((rho - expected).norm() < 1e-12);
        assert_abs_diff_eq!(rho.norm(), 1.0f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn exponent_exponentiates_back_to_the_multiplier() {
        let sys = comb_with_lebesgue_weight();
        let f = scalar_floquet(&sys, cr(2.4)).unwrap();
        assert!(((f.alpha * sys.omega).exp() - f.rho).norm() < 1e-13);
    }

    #[test]
    fn far_values_match_the_direct_walk() {
        let sys = comb_with_lebesgue_weight();
        let v = ScalarView::try_new(&sys).unwrap();
        let lambda = c(0.7, 0.3);
        for x in [7.3, -4.1, 0.5, 1.0] {
            let val = scalar_solution_value(&sys, lambda, cr(1.0), x).unwrap();
            let direct = scalar_transfer(&v, lambda, v.x0, x).unwrap();
            assert!(
                (val.minus - direct).norm() < 1e-12 * (1.0 + direct.norm()),
                "x = {x}"
            );
        }
        // at an atom translate the two sides differ by the atom factor i
        let at_atom = scalar_solution_value(&sys, cr(0.0), cr(1.0), 3.0).unwrap();
        assert!((at_atom.plus - at_atom.minus * c(0.0, 1.0)).norm() < 1e-13);
        // at a continuity point they coincide
        let smooth = scalar_solution_value(&sys, cr(0.0), cr(1.0), 3.3).unwrap();
        assert_eq!(smooth.minus, smooth.plus);
        assert_eq!(smooth.balanced(), smooth.minus);
    }

    #[test]
    fn spectrum_is_the_whole_window() {
        let sys = comb_with_lebesgue_weight();
        let report = scalar_spectrum(&sys, -5.0, 5.0, 101).unwrap();
        assert_eq!(report.bands.len(), 1);
        let band = &report.bands[0];
        assert_eq!((band.lo, band.hi), (-5.0, 5.0));
        assert!(band.clipped_lo && band.clipped_hi);
        assert!(report.edges.is_empty());
        assert!(report.flags.scalar_whole_line);
        assert!(report.max_multiplier_deviation.unwrap() < 1e-12);
    }

    #[test]
    fn zero_weight_is_rejected() {
        let q = MatrixMeasureSpec::new(1, 1.0).with_atom(0.0, dmat1(2.0));
        let w = MatrixMeasureSpec::new(1, 1.0);
        let sys = CanonicalSystem::scalar(1.0, q, w, None);
        assert!(matches!(
            scalar_spectrum(&sys, -1.0, 1.0, 11),
            Err(Error::TrivialWeight)
        ));
    }

    #[test]
    fn planar_systems_are_rejected() {
        let q = MatrixMeasureSpec::new(2, 1.0);
        let w = MatrixMeasureSpec::new(2, 1.0).with_density(
            0.0,
            1.0,
            crate::measure::dmat2([[1.0, 0.0], [0.0, 1.0]]),
        );
        let sys = CanonicalSystem::planar(1.0, q, w, None);
        assert!(matches!(
            scalar_multiplier(&sys, cr(0.0)),
            Err(Error::NotScalar)
        ));
    }

    #[test]
    fn invalid_scalar_systems_are_rejected() {
        // negative weight atom: w fails positive semidefiniteness
        let q = MatrixMeasureSpec::new(1, 1.0);
        let w = MatrixMeasureSpec::new(1, 1.0).with_atom(0.0, dmat1(-1.0));
        let sys = CanonicalSystem::scalar(1.0, q, w, None);
        assert!(matches!(
            scalar_spectrum(&sys, -1.0, 1.0, 11),
            Err(Error::InvalidSystem(_))
        ));
    }

    #[test]
    fn singular_parameter_is_off_the_real_axis() {
        // dw = 1 at the atom: the single singular parameter is
        // dq / dw + 2 i j / dw = 1 + 2i
        let q = MatrixMeasureSpec::new(1, 1.0).with_atom(0.0, dmat1(1.0));
        let w = MatrixMeasureSpec::new(1, 1.0).with_atom(0.0, dmat1(1.0));
        let sys = CanonicalSystem::scalar(1.0, q, w, None);
        assert!(matches!(
            scalar_multiplier(&sys, c(1.0, 2.0)),
            Err(Error::SingularAtom { .. })
        ));
        assert!(scalar_multiplier(&sys, c(1.0, 1.9)).is_ok());
        assert!(scalar_multiplier(&sys, cr(1.0)).is_ok());
    }
}
