//! Monodromy, Floquet multipliers, and the discriminant derivative.
//!
//! The monodromy matrix `M(lambda)` is the transfer over one period from
//! the base point. Its trace is the discriminant `D(lambda)`; since
//! `det M = 1`, the Floquet multipliers are the roots of
//! `z^2 - D z + 1 = 0` and come in reciprocal pairs. The classification of
//! `M` (distinct multipliers, `+-I`, or a Jordan block) drives everything
//! downstream: band edges, degenerate touch points, and the existence of
//! genuine Floquet solutions.
//!
//! The derivative of the discriminant is computed without finite
//! differences through the weighted period integral
//! `T(lambda) = integral over one period of U^T w U` (with balanced values
//! at atoms), via `D'(lambda) = tr(M J^{-1} T)`.

use crate::error::Error;
use crate::linalg::{cr, eigvec2, jordan_chain2, CVec2, Mat2, C64, COINCIDENT_EIGS};
use crate::measure::{CanonicalSystem, Planar, Step};
use crate::propagate::{atom_transfer, balanced_value, segment_transfer, transfer, BalancedValue};
use crate::quadrature::{gauss_legendre, subpieces, QuadOptions};

/// Monodromy matrix of a planar system at one parameter value.
///
/// The true matrix is `exp(log_scale) * matrix`; the scale is zero except at
/// parameters so far from the real axis that one period already overflows.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyData {
    pub lambda: C64,
    pub base_point: f64,
    pub matrix: Mat2,
    pub log_scale: f64,
    /// determinant of the (rescaled) monodromy matrix; equals one up to
    /// roundoff for every admissible system
    pub det: C64,
    /// trace of the monodromy matrix
    pub discriminant: C64,
}

impl MonodromyData {
    /// The monodromy matrix with the scale folded back in.
    pub fn full(&self) -> Mat2 {
        self.matrix * cr(self.log_scale.exp())
    }
}

/// How the monodromy matrix splits at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum FloquetStructure {
    /// Two distinct multipliers with their eigenvectors (unit length).
    Distinct { c1: CVec2, c2: CVec2 },
    /// `M = sign * I`: every vector is an eigenvector.
    DoubleDiagonal { sign: f64 },
    /// A genuine Jordan block: `M c = rho c` and `M c_gen = rho c_gen + c`,
    /// with `c` of unit length. This fixes the chain uniquely up to the
    /// remaining freedom `c_gen -> c_gen + t c`, which is pinned by taking
    /// `c_gen` proportional to a coordinate vector before scaling.
    DoubleJordan { c: CVec2, c_gen: CVec2 },
}

/// Multipliers, exponents, and eigenstructure of the period map.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetData {
    /// multipliers ordered by `|rho_1| >= |rho_2|`, ties broken by
    /// `Im rho_1 >= 0`; always `rho_1 rho_2 = 1`
    pub rho: (C64, C64),
    /// Floquet exponents `alpha_i = log(rho_i) / omega` with the imaginary
    /// part in the principal strip `(-pi/omega, pi/omega]`
    pub alpha: (C64, C64),
    pub structure: FloquetStructure,
    /// true when the distinct/double decision sits close to its threshold,
    /// so the classification (not the multipliers) may be unstable
    pub borderline: bool,
    pub monodromy: MonodromyData,
}

/// Which Floquet branch to evaluate: the first or second multiplier in the
/// ordering of [`FloquetData::rho`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    First,
    Second,
}

/// Monodromy matrix over `[x0, x0 + omega)` from the system's base point.
pub fn monodromy(sys: &CanonicalSystem, lambda: C64) -> Result<MonodromyData, Error> {
    let p = Planar::try_new(sys)?;
    monodromy_planar(&p, lambda)
}

pub(crate) fn monodromy_planar(p: &Planar, lambda: C64) -> Result<MonodromyData, Error> {
    let t = transfer(p, lambda, p.x0, p.x0 + p.omega)?;
    Ok(MonodromyData {
        lambda,
        base_point: p.x0,
        matrix: t.matrix,
        log_scale: t.log_scale,
        det: t.matrix.determinant(),
        discriminant: t.matrix.trace() * cr(t.log_scale.exp()),
    })
}

/// The discriminant `D(lambda) = tr M(lambda)`. Real for real parameters;
/// entire in `lambda` off the singular set.
pub fn discriminant(sys: &CanonicalSystem, lambda: C64) -> Result<C64, Error> {
    Ok(monodromy(sys, lambda)?.discriminant)
}

/// Multipliers of a period map with unit determinant, from its trace:
/// the roots of `z^2 - d z + 1`, ordered by modulus (ties by `Im >= 0`).
/// The second is computed as the reciprocal of the first, so the product
/// is exactly one.
pub(crate) fn multipliers(d: C64) -> (C64, C64) {
    let mut sq = (d * d - cr(4.0)).sqrt();
    if (d.conj() * sq).re < 0.0 {
        sq = -sq;
    }
    let r1 = (d + sq) * cr(0.5);
    if r1.norm() <= f64::MIN_POSITIVE {
        // d = 0 collapses only if sq underflowed too; roots are +-i then
        return (C64::new(0.0, 1.0), C64::new(0.0, -1.0));
    }
    let r2 = cr(1.0) / r1;
    if (r1.norm() - r2.norm()).abs() <= 1e-12 * r1.norm() && r1.im < 0.0 {
        (r2, r1)
    } else {
        (r1, r2)
    }
}

/// Full Floquet data at one parameter: multipliers, principal exponents and
/// the eigenstructure of the monodromy matrix, with a `borderline` flag when
/// the distinct/double decision is within two orders of its threshold.
pub fn floquet_data(sys: &CanonicalSystem, lambda: C64) -> Result<FloquetData, Error> {
    let m = monodromy(sys, lambda)?;
    Ok(floquet_from_monodromy(m, sys.omega))
}

pub(crate) fn floquet_from_monodromy(m: MonodromyData, omega: f64) -> FloquetData {
    let d = m.discriminant;
    let full = m.full();
    let disc = d * d - cr(4.0);
    let threshold = COINCIDENT_EIGS * (1.0 + d.norm_sqr());
    let borderline = disc.norm() > threshold && disc.norm() <= 100.0 * threshold;
    let (rho, structure) = if disc.norm() <= threshold {
        // multipliers coincide; unit determinant forces rho = +-1
        let sign = if d.re >= 0.0 { 1.0 } else { -1.0 };
        let rho = cr(sign);
        let deviation = (full - Mat2::identity() * rho).norm();
        let structure = if deviation <= COINCIDENT_EIGS * full.norm().max(1.0) {
            FloquetStructure::DoubleDiagonal { sign }
        } else {
            match jordan_chain2(&full, rho) {
                Some((c, c_gen)) => FloquetStructure::DoubleJordan { c, c_gen },
                None => FloquetStructure::DoubleDiagonal { sign },
            }
        };
        ((rho, rho), structure)
    } else {
        let (r1, r2) = multipliers(d);
        let c1 = eigvec2(&full, r1);
        let c2 = eigvec2(&full, r2);
        ((r1, r2), FloquetStructure::Distinct { c1, c2 })
    };
    let alpha = (rho.0.ln() / cr(omega), rho.1.ln() / cr(omega));
    FloquetData {
        rho,
        alpha,
        structure,
        borderline,
        monodromy: m,
    }
}

/// Value of the Floquet solution `psi(x) = U(x) c` on the chosen branch,
/// evaluated through the quasi-periodicity `psi(x + k omega) =
/// rho^k psi(x)` so long ranges do not accumulate propagation error.
///
/// Fails with [`Error::JordanStructure`] when the monodromy matrix is a
/// Jordan block (no second genuine Floquet solution exists there) and picks
/// `c = e_1` in the `+-I` case, where every direction qualifies.
pub fn floquet_solution(
    sys: &CanonicalSystem,
    lambda: C64,
    branch: Branch,
    x: f64,
) -> Result<BalancedValue, Error> {
    let p = Planar::try_new(sys)?;
    let data = floquet_from_monodromy(monodromy_planar(&p, lambda)?, p.omega);
    let (rho, c) = match (&data.structure, branch) {
        (FloquetStructure::Distinct { c1, .. }, Branch::First) => (data.rho.0, *c1),
        (FloquetStructure::Distinct { c2, .. }, Branch::Second) => (data.rho.1, *c2),
        (FloquetStructure::DoubleDiagonal { .. }, Branch::First) => {
            (data.rho.0, CVec2::new(cr(1.0), cr(0.0)))
        }
        (FloquetStructure::DoubleDiagonal { .. }, Branch::Second) => {
            (data.rho.1, CVec2::new(cr(0.0), cr(1.0)))
        }
        (FloquetStructure::DoubleJordan { .. }, _) => {
            return Err(Error::JordanStructure { lambda })
        }
    };
    let k = ((x - p.x0) / p.omega).floor();
    let x_red = x - k * p.omega;
    let v = balanced_value(&p, lambda, &c, x_red)?;
    let factor = (rho.ln() * cr(k)).exp();
    Ok(BalancedValue {
        x,
        minus: v.minus * factor,
        plus: v.plus * factor,
    })
}

/// The pair `(v1, v2)` of solutions attached to a Jordan-block monodromy:
/// `v1` is the genuine Floquet solution for the chain vector `c` and `v2`
/// is the generalized solution grown from `c_gen`, satisfying
/// `v2(x + omega) = rho v2(x) + v1(x)`.
///
/// Evaluation reduces `x` into the base period and applies
/// `M^k = rho^k I + k rho^{k-1} N` on the chain coefficients exactly.
/// Fails with [`Error::NotJordan`] at parameters where the monodromy matrix
/// is not a Jordan block.
pub fn generalized_floquet(
    sys: &CanonicalSystem,
    lambda: C64,
    x: f64,
) -> Result<(BalancedValue, BalancedValue), Error> {
    let p = Planar::try_new(sys)?;
    let data = floquet_from_monodromy(monodromy_planar(&p, lambda)?, p.omega);
    let (c, c_gen) = match &data.structure {
        FloquetStructure::DoubleJordan { c, c_gen } => (*c, *c_gen),
        _ => return Err(Error::NotJordan { lambda }),
    };
    let rho = data.rho.0;
    let k = ((x - p.x0) / p.omega).floor();
    let x_red = x - k * p.omega;
    // M^k c = rho^k c ; M^k c_gen = rho^k c_gen + k rho^(k-1) c
    let rk = (rho.ln() * cr(k)).exp();
    let rk1 = if k == 0.0 { cr(0.0) } else { (rho.ln() * cr(k - 1.0)).exp() * cr(k) };
    let v1_red = balanced_value(&p, lambda, &c, x_red)?;
    let v2_red = balanced_value(&p, lambda, &c_gen, x_red)?;
    let v1 = BalancedValue {
        x,
        minus: v1_red.minus * rk,
        plus: v1_red.plus * rk,
    };
    let v2 = BalancedValue {
        x,
        minus: v2_red.minus * rk + v1_red.minus * rk1,
        plus: v2_red.plus * rk + v1_red.plus * rk1,
    };
    Ok((v1, v2))
}

/// Weighted period integral `T(lambda)`: the integral over one period,
/// anchored at the base point, of `U^T w U` with `U` the fundamental matrix
/// and balanced values at the atoms of `w`. `T` is complex symmetric, and
/// for real parameters it is real and positive semidefinite.
pub fn t_matrix(sys: &CanonicalSystem, lambda: C64, opts: &QuadOptions) -> Result<Mat2, Error> {
    let p = Planar::try_new(sys)?;
    t_matrix_planar(&p, lambda, opts)
}

pub(crate) fn t_matrix_planar(
    p: &Planar,
    lambda: C64,
    opts: &QuadOptions,
) -> Result<Mat2, Error> {
    let rule = gauss_legendre(opts.order);
    let mut acc = Mat2::zeros();
    // single walk across the period carrying the running fundamental matrix
    let mut u = Mat2::identity();
    let sandwich = |m: &Mat2, w: &Mat2| m.transpose() * w * m;
    for step in p.steps(p.x0, p.x0 + p.omega) {
        match step {
            Step::Jump(pos) => {
                let (dq, dw) = p
                    .jumps_at(pos)
                    .ok_or_else(|| Error::Numeric(format!("lost track of the atom at {pos}")))?;
                let a = atom_transfer(p.r, dq, dw, lambda).map_err(|_| Error::SingularAtom {
                    position: crate::measure::reduce_mod(pos, p.omega),
                    lambda,
                })?;
                let balanced = (Mat2::identity() + a) * cr(0.5) * u;
                let dw_c = Mat2::new(cr(dw[(0, 0)]), cr(dw[(0, 1)]), cr(dw[(1, 0)]), cr(dw[(1, 1)]));
                acc += sandwich(&balanced, &dw_c);
                u = a * u;
            }
            Step::Drift(a, b) => {
                let (qd, wd) = p.densities_at(0.5 * (a + b));
                let wd_norm = wd.norm();
                if wd_norm == 0.0 {
                    u = segment_transfer(p.r, qd, wd, lambda, b - a) * u;
                    continue;
                }
                let wd_c = Mat2::new(cr(wd[(0, 0)]), cr(wd[(0, 1)]), cr(wd[(1, 0)]), cr(wd[(1, 1)]));
                for (pa, pb) in subpieces(a, b, opts.max_piece_len) {
                    let (mid, half) = (0.5 * (pa + pb), 0.5 * (pb - pa));
                    for &(node, weight) in &rule {
                        let x = mid + half * node;
                        let u_x = segment_transfer(p.r, qd, wd, lambda, x - pa) * u;
                        acc += sandwich(&u_x, &wd_c) * cr(weight * half);
                    }
                    u = segment_transfer(p.r, qd, wd, lambda, pb - pa) * u;
                }
            }
        }
    }
    Ok(acc)
}

/// Derivative of the discriminant in the spectral parameter, through the
/// weighted period integral: `D'(lambda) = tr(M J^{-1} T)`.
pub fn discriminant_derivative(
    sys: &CanonicalSystem,
    lambda: C64,
    opts: &QuadOptions,
) -> Result<C64, Error> {
    let p = Planar::try_new(sys)?;
    discriminant_derivative_planar(&p, lambda, opts)
}

pub(crate) fn discriminant_derivative_planar(
    p: &Planar,
    lambda: C64,
    opts: &QuadOptions,
) -> Result<C64, Error> {
    let m = monodromy_planar(p, lambda)?;
    let t = t_matrix_planar(p, lambda, opts)?;
    let full = m.full();
    // J^{-1} = (1/r) [[0, 1], [-1, 0]]
    let j_inv = Mat2::new(cr(0.0), cr(1.0 / p.r), cr(-1.0 / p.r), cr(0.0));
    Ok((full * j_inv * t).trace())
}
