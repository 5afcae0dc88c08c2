//! Data model for periodic matrix measures and canonical systems.
//!
//! A coefficient measure on the line is `omega`-periodic and splits into a
//! finite list of atoms (point masses with matrix weights) plus a piecewise
//! constant density against Lebesgue measure. A canonical system
//! `J u' + q u = lambda w u` couples two such measures: a symmetric `q` and
//! a positive semidefinite weight `w`, with an invertible skew-symmetric
//! constant `J`.
//!
//! Structural and hypothesis checks never panic and never repair input:
//! [`validate_system`] reports everything it finds as [`Violation`]s,
//! including the spectral hypothesis that the singular set (parameters
//! where a jump factor `B+ = J + (dq - lambda dw)/2` degenerates) avoids
//! the real axis.

use crate::error::Error;
use crate::linalg::{sym_eig2, RMat2};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Real matrix storage for weights and densities (dimension checked, not typed).
pub type RealMat = DMatrix<f64>;

/// Absolute slack used when snapping positions that should coincide
/// (scaled by the period and the coordinates involved).
pub(crate) fn snap_tol(omega: f64, a: f64, b: f64) -> f64 {
    1e-12 * omega.max(1.0).max(a.abs()).max(b.abs())
}

/// Tolerance for matching a coordinate against an atom position.
pub fn position_tolerance(omega: f64) -> f64 {
    1e-9 * omega.max(1.0)
}

/// Reduce `x` into `[0, omega)`.
pub fn reduce_mod(x: f64, omega: f64) -> f64 {
    let r = x.rem_euclid(omega);
    if omega - r <= snap_tol(omega, x, 0.0) {
        0.0
    } else {
        r
    }
}

/// A point mass: weight matrix sitting at `position` (and all its
/// `omega`-translates).
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub weight: RealMat,
}

/// One maximal interval `[from, to)` on which the density is the constant
/// matrix `matrix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    pub matrix: RealMat,
}

/// An `omega`-periodic matrix measure: atoms plus piecewise constant density,
/// both described on the fundamental period `[0, omega)`.
///
/// Layout invariants (checked by [`validate_system`], not by construction):
/// atom positions strictly increasing inside `[0, omega)`; the density list
/// is either empty (zero density) or a contiguous partition with
/// `first.from = 0` and `last.to = omega`; all matrices are `dim x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasureSpec {
    pub dim: usize,
    pub period: f64,
    pub atoms: Vec<Atom>,
    pub density: Vec<Segment>,
}

impl MatrixMeasureSpec {
    pub fn new(dim: usize, period: f64) -> Self {
        MatrixMeasureSpec {
            dim,
            period,
            atoms: Vec::new(),
            density: Vec::new(),
        }
    }

    pub fn with_atom(mut self, position: f64, weight: RealMat) -> Self {
        self.atoms.push(Atom { position, weight });
        self
    }

    pub fn with_density(mut self, from: f64, to: f64, matrix: RealMat) -> Self {
        self.density.push(Segment { from, to, matrix });
        self
    }

    /// True when the measure has no atoms and every density piece vanishes.
    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.weight.iter().all(|&v| v == 0.0))
            && self.density.iter().all(|s| s.matrix.iter().all(|&v| v == 0.0))
    }
}

/// Atom weight of the measure at `x`, reduced modulo the period; the zero
/// matrix when `x` does not match an atom position.
pub fn jump_at(m: &MatrixMeasureSpec, x: f64) -> RealMat {
    let xr = reduce_mod(x, m.period);
    let tol = position_tolerance(m.period);
    for a in &m.atoms {
        if (a.position - xr).abs() <= tol || (a.position - xr + m.period).abs() <= tol {
            return a.weight.clone();
        }
    }
    RealMat::zeros(m.dim, m.dim)
}

/// Density value of the measure at `x` (reduced modulo the period); the zero
/// matrix when the density list is empty or `x` escapes the declared cover.
pub fn density_at(m: &MatrixMeasureSpec, x: f64) -> RealMat {
    let xr = reduce_mod(x, m.period);
    for s in &m.density {
        if xr >= s.from && xr < s.to {
            return s.matrix.clone();
        }
    }
    RealMat::zeros(m.dim, m.dim)
}

/// A canonical system `J u' + q u = lambda w u` with `omega`-periodic
/// measure coefficients.
///
/// `J` is stored through its single degree of freedom `j_scale`:
/// for `n = 2`, `J = j_scale * [[0, -1], [1, 0]]` (every invertible real
/// skew-symmetric 2 x 2 matrix has this form); for `n = 1`,
/// `J = i * j_scale` (a nonzero purely imaginary scalar).
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSystem {
    pub n: usize,
    pub j_scale: f64,
    pub q: MatrixMeasureSpec,
    pub w: MatrixMeasureSpec,
    pub omega: f64,
    pub base_point: f64,
}

impl CanonicalSystem {
    /// Planar (`n = 2`) system; the period is taken from `q`, and the base
    /// point defaults to the midpoint of the largest atom-free gap.
    pub fn planar(
        j_scale: f64,
        q: MatrixMeasureSpec,
        w: MatrixMeasureSpec,
        base_point: Option<f64>,
    ) -> Self {
        let omega = q.period;
        let x0 = base_point.unwrap_or_else(|| default_base_point(&q, &w));
        CanonicalSystem {
            n: 2,
            j_scale,
            q,
            w,
            omega,
            base_point: x0,
        }
    }

    /// Scalar (`n = 1`) system with `J = i * j_im`.
    pub fn scalar(
        j_im: f64,
        q: MatrixMeasureSpec,
        w: MatrixMeasureSpec,
        base_point: Option<f64>,
    ) -> Self {
        let omega = q.period;
        let x0 = base_point.unwrap_or_else(|| default_base_point(&q, &w));
        CanonicalSystem {
            n: 1,
            j_scale: j_im,
            q,
            w,
            omega,
            base_point: x0,
        }
    }
}

/// Midpoint of the largest atom-free gap of the merged `q`/`w` atom set on
/// the period circle; `0` when there are no atoms at all. Ties go to the
/// gap that starts first.
pub fn default_base_point(q: &MatrixMeasureSpec, w: &MatrixMeasureSpec) -> f64 {
    let omega = q.period;
    let tol = position_tolerance(omega);
    let mut pos: Vec<f64> = q
        .atoms
        .iter()
        .chain(w.atoms.iter())
        .map(|a| reduce_mod(a.position, omega))
        .collect();
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pos.dedup_by(|a, b| (*a - *b).abs() <= tol);
    if pos.is_empty() {
        return 0.0;
    }
    let mut best_len = -1.0;
    let mut best_mid = 0.0;
    for i in 0..pos.len() {
        let a = pos[i];
        let b = if i + 1 < pos.len() {
            pos[i + 1]
        } else {
            pos[0] + omega
        };
        if b - a > best_len {
            best_len = b - a;
            best_mid = reduce_mod(0.5 * (a + b), omega);
        }
    }
    best_mid
}

// ---------------------------------------------------------------------------
// Singular set
// ---------------------------------------------------------------------------

/// Roots of `det B+ = det(J + (dq - lambda dw)/2)` at one atom position.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularAtom {
    pub position: f64,
    pub roots: Vec<Complex64>,
}

/// Description of the singular set: the (conjugation-closed) parameters at
/// which some jump factor degenerates.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularSet {
    /// Finitely many roots, listed per atom position (positions without
    /// roots are omitted).
    Finite(Vec<SingularAtom>),
    /// Some atom has `det B+ = 0` identically in `lambda`: the singular set
    /// is the whole plane and the system is outside the admissible class.
    IdenticallySingular { position: f64 },
}

/// The polynomial `lambda -> det B+(p, lambda)` at one atom, with the scales
/// of its coefficients for relative zero tests.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JumpPoly {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    sc0: f64,
    sc1: f64,
    sc2: f64,
}

impl JumpPoly {
    /// `det(J + C - lambda D) = r^2 + det(dq - lambda dw)/4` expanded in
    /// `lambda` for the planar case, using the 2 x 2 mixed-determinant
    /// identity `det(A + tB) = det A + t * mix(A, B) + t^2 det B`.
    pub fn planar(r: f64, dq: &RMat2, dw: &RMat2) -> JumpPoly {
        let mix = dq[(0, 0)] * dw[(1, 1)] + dq[(1, 1)] * dw[(0, 0)]
            - dq[(0, 1)] * dw[(1, 0)]
            - dq[(1, 0)] * dw[(0, 1)];
        let (nq, nw) = (dq.norm(), dw.norm());
        JumpPoly {
            c0: r * r + 0.25 * dq.determinant(),
            c1: -0.25 * mix,
            c2: 0.25 * dw.determinant(),
            sc0: r * r + nq * nq,
            sc1: nq * nw,
            sc2: nw * nw,
        }
    }

    fn is_zero(v: f64, scale: f64) -> bool {
        v.abs() <= 1e-12 * scale
    }

    pub fn identically_singular(&self) -> bool {
        JumpPoly::is_zero(self.c0, self.sc0)
            && JumpPoly::is_zero(self.c1, self.sc1)
            && JumpPoly::is_zero(self.c2, self.sc2)
    }

    /// Roots of the (at most quadratic) polynomial; conjugation-closed
    /// because the coefficients are real.
    pub fn roots(&self) -> Vec<Complex64> {
        if self.identically_singular() {
            return Vec::new();
        }
        if !JumpPoly::is_zero(self.c2, self.sc2) {
            let disc = Complex64::new(self.c1 * self.c1 - 4.0 * self.c2 * self.c0, 0.0).sqrt();
            let mut roots = vec![
                (-self.c1 + disc) / (2.0 * self.c2),
                (-self.c1 - disc) / (2.0 * self.c2),
            ];
            roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
            roots
        } else if !JumpPoly::is_zero(self.c1, self.sc1) {
            vec![Complex64::new(-self.c0 / self.c1, 0.0)]
        } else {
            Vec::new()
        }
    }
}

/// Compute the singular set of a structurally well-formed system.
///
/// Planar atoms contribute the roots of a real quadratic (so at most two,
/// in conjugate pairs); scalar atoms with a weight jump contribute a single
/// root off the real axis. Returns [`SingularSet::IdenticallySingular`] as
/// soon as any atom degenerates identically.
pub fn singular_set(sys: &CanonicalSystem) -> Result<SingularSet, Error> {
    let merged = merged_atom_positions(&sys.q, &sys.w, sys.omega);
    let mut out = Vec::new();
    for &p in &merged {
        let dq = jump_at(&sys.q, p);
        let dw = jump_at(&sys.w, p);
        match sys.n {
            2 => {
                if dq.nrows() != 2 || dw.nrows() != 2 || dq.ncols() != 2 || dw.ncols() != 2 {
                    return Err(Error::Structure(format!(
                        "atom at {p} has a weight that is not 2 x 2"
                    )));
                }
                let poly = JumpPoly::planar(
                    sys.j_scale,
                    &RMat2::from_fn(|i, j| dq[(i, j)]),
                    &RMat2::from_fn(|i, j| dw[(i, j)]),
                );
                if poly.identically_singular() {
                    return Ok(SingularSet::IdenticallySingular { position: p });
                }
                let roots = poly.roots();
                if !roots.is_empty() {
                    out.push(SingularAtom { position: p, roots });
                }
            }
            1 => {
                // B+ = i j + (dq - lambda dw)/2 vanishes only when dw != 0,
                // at lambda = dq/dw + 2 i j / dw (never real since j != 0).
                let (dqv, dwv) = (dq[(0, 0)], dw[(0, 0)]);
                if dwv.abs() > 1e-300 {
                    out.push(SingularAtom {
                        position: p,
                        roots: vec![Complex64::new(dqv / dwv, 2.0 * sys.j_scale / dwv)],
                    });
                }
            }
            n => {
                return Err(Error::Structure(format!("unsupported dimension n = {n}")));
            }
        }
    }
    Ok(SingularSet::Finite(out))
}

/// Merged atom positions of two measures, reduced into `[0, omega)`,
/// sorted, with near-coincident positions collapsed.
pub(crate) fn merged_atom_positions(
    q: &MatrixMeasureSpec,
    w: &MatrixMeasureSpec,
    omega: f64,
) -> Vec<f64> {
    let tol = position_tolerance(omega);
    let mut pos: Vec<f64> = q
        .atoms
        .iter()
        .chain(w.atoms.iter())
        .map(|a| reduce_mod(a.position, omega))
        .collect();
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pos.dedup_by(|a, b| (*a - *b).abs() <= tol);
    pos
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Machine-readable classification of a validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    UnsupportedDimension,
    NonFinite,
    BadPeriod,
    PeriodMismatch,
    DimensionMismatch,
    AtomOutOfRange,
    AtomOrder,
    SegmentCover,
    QNotSymmetric,
    WNotPositive,
    JNotInvertible,
    BasePointAtAtom,
    RealSingularPoint,
    IdenticallySingular,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::UnsupportedDimension => "unsupported_dimension",
            ViolationCode::NonFinite => "non_finite",
            ViolationCode::BadPeriod => "bad_period",
            ViolationCode::PeriodMismatch => "period_mismatch",
            ViolationCode::DimensionMismatch => "dimension_mismatch",
            ViolationCode::AtomOutOfRange => "atom_out_of_range",
            ViolationCode::AtomOrder => "atom_order",
            ViolationCode::SegmentCover => "segment_cover",
            ViolationCode::QNotSymmetric => "q_not_symmetric",
            ViolationCode::WNotPositive => "w_not_positive",
            ViolationCode::JNotInvertible => "j_not_invertible",
            ViolationCode::BasePointAtAtom => "base_point_at_atom",
            ViolationCode::RealSingularPoint => "real_singular_point",
            ViolationCode::IdenticallySingular => "identically_singular",
        }
    }
}

/// One validation finding: what, where, and a human-readable message.
#[derive(Debug, Clone)]
pub struct Violation {
    pub code: ViolationCode,
    pub position: Option<f64>,
    pub message: String,
}

/// Outcome of [`validate_system`]: `ok` exactly when no violation was found.
/// The singular-set summary is included whenever the structure allowed
/// computing it.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub singular_set: Option<SingularSet>,
}

impl ValidationReport {
    /// Compact single-line summary of the violation codes.
    pub fn summary(&self) -> String {
        if self.ok {
            "ok".to_string()
        } else {
            self.violations
                .iter()
                .map(|v| v.code.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        }
    }
}

fn push(violations: &mut Vec<Violation>, code: ViolationCode, position: Option<f64>, msg: String) {
    violations.push(Violation {
        code,
        position,
        message: msg,
    });
}

fn validate_measure(
    label: &str,
    m: &MatrixMeasureSpec,
    n: usize,
    omega: f64,
    violations: &mut Vec<Violation>,
) -> bool {
    let mut structurally_ok = true;
    if m.dim != n {
        push(
            violations,
            ViolationCode::DimensionMismatch,
            None,
            format!("{label} declares dimension {} but the system has n = {n}", m.dim),
        );
        structurally_ok = false;
    }
    if !(m.period.is_finite() && m.period > 0.0) {
        push(
            violations,
            ViolationCode::BadPeriod,
            None,
            format!("{label} has period {} (must be positive and finite)", m.period),
        );
        structurally_ok = false;
    } else if (m.period - omega).abs() > 1e-12 * omega.max(1.0) {
        push(
            violations,
            ViolationCode::PeriodMismatch,
            None,
            format!("{label} has period {} but the system period is {omega}", m.period),
        );
        structurally_ok = false;
    }
    let tol = position_tolerance(omega);
    let mut prev: Option<f64> = None;
    for a in &m.atoms {
        if !a.position.is_finite() || a.weight.iter().any(|v| !v.is_finite()) {
            push(
                violations,
                ViolationCode::NonFinite,
                Some(a.position),
                format!("{label} has a non-finite atom entry near {}", a.position),
            );
            structurally_ok = false;
            continue;
        }
        if a.weight.nrows() != n || a.weight.ncols() != n {
            push(
                violations,
                ViolationCode::DimensionMismatch,
                Some(a.position),
                format!(
                    "{label} atom at {} has a {} x {} weight (expected {n} x {n})",
                    a.position,
                    a.weight.nrows(),
                    a.weight.ncols()
                ),
            );
            structurally_ok = false;
        }
        if !(0.0 <= a.position && a.position < omega) {
            push(
                violations,
                ViolationCode::AtomOutOfRange,
                Some(a.position),
                format!("{label} atom position {} escapes [0, {omega})", a.position),
            );
            structurally_ok = false;
        }
        if let Some(p) = prev {
            if a.position <= p + tol {
                push(
                    violations,
                    ViolationCode::AtomOrder,
                    Some(a.position),
                    format!(
                        "{label} atom positions must be strictly increasing ({} after {})",
                        a.position, p
                    ),
                );
                structurally_ok = false;
            }
        }
        prev = Some(a.position);
    }
    if !m.density.is_empty() {
        let snap = snap_tol(omega, 0.0, omega);
        let first = &m.density[0];
        if first.from.abs() > snap {
            push(
                violations,
                ViolationCode::SegmentCover,
                Some(first.from),
                format!("{label} density must start at 0, found {}", first.from),
            );
            structurally_ok = false;
        }
        let last = m.density.last().unwrap();
        if (last.to - omega).abs() > snap {
            push(
                violations,
                ViolationCode::SegmentCover,
                Some(last.to),
                format!("{label} density must end at {omega}, found {}", last.to),
            );
            structurally_ok = false;
        }
        for (i, s) in m.density.iter().enumerate() {
            if !(s.from.is_finite() && s.to.is_finite()) || s.matrix.iter().any(|v| !v.is_finite()) {
                push(
                    violations,
                    ViolationCode::NonFinite,
                    Some(s.from),
                    format!("{label} has a non-finite density entry near {}", s.from),
                );
                structurally_ok = false;
                continue;
            }
            if s.matrix.nrows() != n || s.matrix.ncols() != n {
                push(
                    violations,
                    ViolationCode::DimensionMismatch,
                    Some(s.from),
                    format!(
                        "{label} density piece at {} has a {} x {} matrix (expected {n} x {n})",
                        s.from,
                        s.matrix.nrows(),
                        s.matrix.ncols()
                    ),
                );
                structurally_ok = false;
            }
            if s.to <= s.from + snap {
                push(
                    violations,
                    ViolationCode::SegmentCover,
                    Some(s.from),
                    format!("{label} density piece [{}, {}) is empty", s.from, s.to),
                );
                structurally_ok = false;
            }
            if i > 0 {
                let gap = s.from - m.density[i - 1].to;
                if gap.abs() > snap {
                    push(
                        violations,
                        ViolationCode::SegmentCover,
                        Some(s.from),
                        format!(
                            "{label} density pieces must be contiguous (gap of {gap} before {})",
                            s.from
                        ),
                    );
                    structurally_ok = false;
                }
            }
        }
    }
    structurally_ok
}

fn matrix_symmetric(m: &RealMat) -> bool {
    let scale = m.norm().max(1.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

fn matrix_psd(m: &RealMat) -> bool {
    match m.nrows() {
        1 => m[(0, 0)] >= -1e-12 * m[(0, 0)].abs().max(1.0),
        2 => {
            let r = RMat2::from_fn(|i, j| m[(i, j)]);
            let (lo, _) = sym_eig2(&(0.5 * (r + r.transpose())));
            lo >= -1e-12 * r.norm().max(1.0)
        }
        _ => false,
    }
}

/// Check every structural invariant and the spectral hypotheses of a system.
///
/// Nothing is repaired and nothing panics: every finding becomes a
/// [`Violation`], and `ok` is true only for a clean report. The hypothesis
/// part asks that no atom be identically singular and that no singular-set
/// root lie on the real axis (within `|Im| <= 1e-9 (1 + |root|)`).
pub fn validate_system(sys: &CanonicalSystem) -> ValidationReport {
    let mut violations = Vec::new();
    if sys.n != 1 && sys.n != 2 {
        push(
            &mut violations,
            ViolationCode::UnsupportedDimension,
            None,
            format!("n = {} is not supported (only n = 1 and n = 2)", sys.n),
        );
        return ValidationReport {
            ok: false,
            violations,
            singular_set: None,
        };
    }
    if !(sys.omega.is_finite() && sys.omega > 0.0) {
        push(
            &mut violations,
            ViolationCode::BadPeriod,
            None,
            format!("system period {} must be positive and finite", sys.omega),
        );
        return ValidationReport {
            ok: false,
            violations,
            singular_set: None,
        };
    }
    if !sys.j_scale.is_finite() || sys.j_scale == 0.0 {
        push(
            &mut violations,
            ViolationCode::JNotInvertible,
            None,
            format!("J scale {} must be nonzero and finite", sys.j_scale),
        );
    }
    if !sys.base_point.is_finite() {
        push(
            &mut violations,
            ViolationCode::NonFinite,
            None,
            format!("base point {} is not finite", sys.base_point),
        );
    }
    let q_ok = validate_measure("q", &sys.q, sys.n, sys.omega, &mut violations);
    let w_ok = validate_measure("w", &sys.w, sys.n, sys.omega, &mut violations);

    // coefficient symmetry classes
    for a in &sys.q.atoms {
        if a.weight.nrows() == sys.n && a.weight.ncols() == sys.n && !matrix_symmetric(&a.weight) {
            push(
                &mut violations,
                ViolationCode::QNotSymmetric,
                Some(a.position),
                format!("q atom at {} is not symmetric", a.position),
            );
        }
    }
    for s in &sys.q.density {
        if s.matrix.nrows() == sys.n && s.matrix.ncols() == sys.n && !matrix_symmetric(&s.matrix) {
            push(
                &mut violations,
                ViolationCode::QNotSymmetric,
                Some(s.from),
                format!("q density on [{}, {}) is not symmetric", s.from, s.to),
            );
        }
    }
    for a in &sys.w.atoms {
        if a.weight.nrows() == sys.n
            && a.weight.ncols() == sys.n
            && (!matrix_symmetric(&a.weight) || !matrix_psd(&a.weight))
        {
            push(
                &mut violations,
                ViolationCode::WNotPositive,
                Some(a.position),
                format!("w atom at {} is not positive semidefinite", a.position),
            );
        }
    }
    for s in &sys.w.density {
        if s.matrix.nrows() == sys.n
            && s.matrix.ncols() == sys.n
            && (!matrix_symmetric(&s.matrix) || !matrix_psd(&s.matrix))
        {
            push(
                &mut violations,
                ViolationCode::WNotPositive,
                Some(s.from),
                format!("w density on [{}, {}) is not positive semidefinite", s.from, s.to),
            );
        }
    }

    // base point must be a continuity point
    if sys.base_point.is_finite() {
        let tol = position_tolerance(sys.omega);
        let x0 = reduce_mod(sys.base_point, sys.omega);
        for p in merged_atom_positions(&sys.q, &sys.w, sys.omega) {
            if (p - x0).abs() <= tol || (p - x0 + sys.omega).abs() <= tol {
                push(
                    &mut violations,
                    ViolationCode::BasePointAtAtom,
                    Some(sys.base_point),
                    format!("base point {} coincides with the atom at {p}", sys.base_point),
                );
            }
        }
    }

    // spectral hypotheses need a structurally sound system
    let singular = if q_ok && w_ok && sys.j_scale != 0.0 {
        match singular_set(sys) {
            Ok(SingularSet::IdenticallySingular { position }) => {
                push(
                    &mut violations,
                    ViolationCode::IdenticallySingular,
                    Some(position),
                    format!(
                        "atom at {position} is identically singular: det B+ vanishes for every lambda"
                    ),
                );
                Some(SingularSet::IdenticallySingular { position })
            }
            Ok(SingularSet::Finite(list)) => {
                for sa in &list {
                    for root in &sa.roots {
                        if root.im.abs() <= 1e-9 * (1.0 + root.norm()) {
                            push(
                                &mut violations,
                                ViolationCode::RealSingularPoint,
                                Some(sa.position),
                                format!(
                                    "singular set touches the real axis at lambda = {} (atom at {})",
                                    root.re, sa.position
                                ),
                            );
                        }
                    }
                }
                Some(SingularSet::Finite(list))
            }
            Err(_) => None,
        }
    } else {
        None
    };

    ValidationReport {
        ok: violations.is_empty(),
        violations,
        singular_set: singular,
    }
}

// ---------------------------------------------------------------------------
// Period layout shared by propagation and quadrature
// ---------------------------------------------------------------------------

/// One step of a walk across `[a, b)`: either an atom to jump across or a
/// maximal open interval on which both densities are constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Step {
    Jump(f64),
    Drift(f64, f64),
}

/// Ordered steps covering `[a, b)`: every translate of an atom position in
/// `[a, b)` (an atom exactly at `a` is included, one at `b` is not) and the
/// drift intervals between them, split at every density breakpoint.
pub(crate) fn steps_between(
    atom_positions: &[f64],
    cut_positions: &[f64],
    omega: f64,
    a: f64,
    b: f64,
) -> Vec<Step> {
    let snap = snap_tol(omega, a, b);
    if b - a <= snap {
        return Vec::new();
    }
    // (position, is_atom), atoms half-open in [a, b), cuts strictly inside
    let mut marks: Vec<(f64, bool)> = Vec::new();
    let mut collect = |base: &[f64], is_atom: bool| {
        for &p in base {
            let mut k = ((a - p) / omega).ceil();
            while p + (k - 1.0) * omega >= a - snap {
                k -= 1.0;
            }
            while p + k * omega < a - snap {
                k += 1.0;
            }
            let mut x = p + k * omega;
            if !is_atom && x - a <= snap {
                x += omega;
            }
            while x < b - snap {
                marks.push((x, is_atom));
                x += omega;
            }
        }
    };
    collect(atom_positions, true);
    collect(cut_positions, false);
    marks.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap());
    // collapse coincident marks; an atom mark wins over a plain cut
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for (x, is_atom) in marks {
        match merged.last_mut() {
            Some((px, pa)) if (x - *px).abs() <= snap => *pa |= is_atom,
            _ => merged.push((x, is_atom)),
        }
    }
    let mut steps = Vec::new();
    let mut prev = a;
    for (x, is_atom) in merged {
        if x > prev + snap {
            steps.push(Step::Drift(prev, x));
            prev = x;
        }
        if is_atom {
            steps.push(Step::Jump(x));
            prev = prev.max(x);
        }
    }
    if b > prev + snap {
        steps.push(Step::Drift(prev, b));
    }
    steps
}

// ---------------------------------------------------------------------------
// Fixed-size internal representations
// ---------------------------------------------------------------------------

/// Planar (`n = 2`) view of a system with fixed-size matrices and the merged
/// atom/segment skeleton used by propagation.
#[derive(Debug, Clone)]
pub(crate) struct Planar {
    pub r: f64,
    pub omega: f64,
    pub x0: f64,
    /// merged atoms: base position in `[0, omega)` with both weight jumps
    pub atoms: Vec<(f64, RMat2, RMat2)>,
    /// contiguous cover of `[0, omega]` with both density values
    pub segs: Vec<(f64, f64, RMat2, RMat2)>,
}

fn fixed2(m: &RealMat, what: &str) -> Result<RMat2, Error> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::Structure(format!(
            "{what} is {} x {}, expected 2 x 2",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(RMat2::from_fn(|i, j| m[(i, j)]))
}

fn density_cuts(m: &MatrixMeasureSpec, omega: f64) -> Result<Vec<f64>, Error> {
    if m.density.is_empty() {
        return Ok(vec![0.0, omega]);
    }
    let snap = snap_tol(omega, 0.0, omega);
    if m.density[0].from.abs() > snap
        || (m.density.last().unwrap().to - omega).abs() > snap
    {
        return Err(Error::Structure(
            "density pieces do not cover the period".to_string(),
        ));
    }
    let mut cuts = vec![0.0];
    for (i, s) in m.density.iter().enumerate() {
        if i > 0 && (s.from - m.density[i - 1].to).abs() > snap {
            return Err(Error::Structure(
                "density pieces are not contiguous".to_string(),
            ));
        }
        if s.to <= s.from + snap {
            return Err(Error::Structure("empty density piece".to_string()));
        }
        cuts.push(if i + 1 == m.density.len() { omega } else { s.to });
    }
    Ok(cuts)
}

impl Planar {
    pub fn try_new(sys: &CanonicalSystem) -> Result<Planar, Error> {
        if sys.n != 2 {
            return Err(Error::NotPlanar);
        }
        if !(sys.omega.is_finite() && sys.omega > 0.0) {
            return Err(Error::Structure(format!("bad period {}", sys.omega)));
        }
        if !sys.j_scale.is_finite() || sys.j_scale == 0.0 {
            return Err(Error::Structure("J is not invertible".to_string()));
        }
        let omega = sys.omega;
        let positions = merged_atom_positions(&sys.q, &sys.w, omega);
        let mut atoms = Vec::with_capacity(positions.len());
        for &p in &positions {
            atoms.push((
                p,
                fixed2(&jump_at(&sys.q, p), "q atom weight")?,
                fixed2(&jump_at(&sys.w, p), "w atom weight")?,
            ));
        }
        let mut cuts = density_cuts(&sys.q, omega)?;
        cuts.extend(density_cuts(&sys.w, omega)?);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let snap = snap_tol(omega, 0.0, omega);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= snap);
        let mut segs = Vec::with_capacity(cuts.len().saturating_sub(1));
        for win in cuts.windows(2) {
            let (from, to) = (win[0], win[1]);
            let mid = 0.5 * (from + to);
            segs.push((
                from,
                to,
                fixed2(&density_at(&sys.q, mid), "q density")?,
                fixed2(&density_at(&sys.w, mid), "w density")?,
            ));
        }
        Ok(Planar {
            r: sys.j_scale,
            omega,
            x0: sys.base_point,
            atoms,
            segs,
        })
    }

    /// Steps of a walk across `[a, b)`. The cut list includes the period
    /// boundary itself so drifts never straddle the wrap-around, where the
    /// density may be discontinuous.
    pub fn steps(&self, a: f64, b: f64) -> Vec<Step> {
        let atom_pos: Vec<f64> = self.atoms.iter().map(|t| t.0).collect();
        let cuts: Vec<f64> = self.segs.iter().map(|s| s.0).collect();
        steps_between(&atom_pos, &cuts, self.omega, a, b)
    }

    /// Weight jumps `(dq, dw)` at a global position known to be an atom.
    pub fn jumps_at(&self, x: f64) -> Option<(&RMat2, &RMat2)> {
        let xr = reduce_mod(x, self.omega);
        let tol = position_tolerance(self.omega);
        self.atoms
            .iter()
            .find(|(p, _, _)| (p - xr).abs() <= tol || (p - xr + self.omega).abs() <= tol)
            .map(|(_, dq, dw)| (dq, dw))
    }

    /// Density values `(qd, wd)` at a global continuity point.
    pub fn densities_at(&self, x: f64) -> (&RMat2, &RMat2) {
        let xr = reduce_mod(x, self.omega);
        for (from, to, qd, wd) in &self.segs {
            if xr >= *from && xr < *to {
                return (qd, wd);
            }
        }
        // xr == omega up to rounding: wrap to the first piece
        let (_, _, qd, wd) = &self.segs[0];
        (qd, wd)
    }
}

/// Scalar (`n = 1`) view of a system.
#[derive(Debug, Clone)]
pub(crate) struct ScalarView {
    pub j_im: f64,
    pub omega: f64,
    pub x0: f64,
    pub atoms: Vec<(f64, f64, f64)>,
    pub segs: Vec<(f64, f64, f64, f64)>,
}

fn fixed1(m: &RealMat, what: &str) -> Result<f64, Error> {
    if m.nrows() != 1 || m.ncols() != 1 {
        return Err(Error::Structure(format!(
            "{what} is {} x {}, expected 1 x 1",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m[(0, 0)])
}

impl ScalarView {
    pub fn try_new(sys: &CanonicalSystem) -> Result<ScalarView, Error> {
        if sys.n != 1 {
            return Err(Error::NotScalar);
        }
        if !(sys.omega.is_finite() && sys.omega > 0.0) {
            return Err(Error::Structure(format!("bad period {}", sys.omega)));
        }
        if !sys.j_scale.is_finite() || sys.j_scale == 0.0 {
            return Err(Error::Structure("J is not invertible".to_string()));
        }
        let omega = sys.omega;
        let positions = merged_atom_positions(&sys.q, &sys.w, omega);
        let mut atoms = Vec::with_capacity(positions.len());
        for &p in &positions {
            atoms.push((
                p,
                fixed1(&jump_at(&sys.q, p), "q atom weight")?,
                fixed1(&jump_at(&sys.w, p), "w atom weight")?,
            ));
        }
        let mut cuts = density_cuts(&sys.q, omega)?;
        cuts.extend(density_cuts(&sys.w, omega)?);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let snap = snap_tol(omega, 0.0, omega);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= snap);
        let mut segs = Vec::with_capacity(cuts.len().saturating_sub(1));
        for win in cuts.windows(2) {
            let (from, to) = (win[0], win[1]);
            let mid = 0.5 * (from + to);
            segs.push((
                from,
                to,
                fixed1(&density_at(&sys.q, mid), "q density")?,
                fixed1(&density_at(&sys.w, mid), "w density")?,
            ));
        }
        Ok(ScalarView {
            j_im: sys.j_scale,
            omega,
            x0: sys.base_point,
            atoms,
            segs,
        })
    }

    pub fn steps(&self, a: f64, b: f64) -> Vec<Step> {
        let atom_pos: Vec<f64> = self.atoms.iter().map(|t| t.0).collect();
        let cuts: Vec<f64> = self.segs.iter().map(|s| s.0).collect();
        steps_between(&atom_pos, &cuts, self.omega, a, b)
    }

    pub fn jumps_at(&self, x: f64) -> Option<(f64, f64)> {
        let xr = reduce_mod(x, self.omega);
        let tol = position_tolerance(self.omega);
        self.atoms
            .iter()
            .find(|(p, _, _)| (p - xr).abs() <= tol || (p - xr + self.omega).abs() <= tol)
            .map(|&(_, dq, dw)| (dq, dw))
    }

    pub fn densities_at(&self, x: f64) -> (f64, f64) {
        let xr = reduce_mod(x, self.omega);
        for &(from, to, qd, wd) in &self.segs {
            if xr >= from && xr < to {
                return (qd, wd);
            }
        }
        let &(_, _, qd, wd) = &self.segs[0];
        (qd, wd)
    }
}

// ---------------------------------------------------------------------------
// Small constructors used across tests, examples and the registry
// ---------------------------------------------------------------------------

/// 2 x 2 real matrix from rows.
pub fn dmat2(rows: [[f64; 2]; 2]) -> RealMat {
    RealMat::from_row_slice(2, 2, &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]])
}

/// 1 x 1 real matrix.
pub fn dmat1(v: f64) -> RealMat {
    RealMat::from_row_slice(1, 1, &[v])
}
