//! Spectral bands, parameter classification, and the degenerate subspace.
//!
//! For a definite system the spectrum of the whole-line operator is the
//! closure of `{lambda real : |D(lambda)| <= 2}`: a union of closed bands
//! whose endpoints are the solutions of `D = +-2`. Band edges come in two
//! kinds: simple crossings, where `D` passes transversally through `+-2`
//! (the monodromy matrix there is a Jordan block), and degenerate touch
//! points, where `D` reaches `+-2` with zero slope and the monodromy matrix
//! is `+-I` (two bands meeting with a closed gap, or an isolated point of
//! the spectrum).
//!
//! Definiteness itself is a property of the degenerate subspace: the space
//! of solutions of `J u' + q u = 0` annihilated by `w` everywhere. A
//! nontrivial such space forces the discriminant to be constant and the
//! operator-theoretic spectrum to differ from the band picture, so band
//! computation short-circuits with explicit flags in that case.

use crate::error::Error;
use crate::linalg::{cr, herm_eig2, CVec2, Mat2, C64, COINCIDENT_EIGS};
use crate::measure::{reduce_mod, CanonicalSystem, Planar, Step};
use crate::monodromy::{
    discriminant_derivative_planar, floquet_from_monodromy, monodromy_planar, t_matrix_planar,
    FloquetStructure,
};
use crate::propagate::{atom_transfer, segment_transfer};
use crate::quadrature::{gauss_legendre, subpieces, QuadOptions};

/// One spectral band `[lo, hi]`. A band that runs into the requested window
/// boundary is marked clipped on that side: the true band continues beyond
/// the window and the endpoint is not a spectral edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub clipped_lo: bool,
    pub clipped_hi: bool,
}

/// Kind of a band edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// `D` crosses `+-2` transversally; the gap on one side is open.
    Simple,
    /// `D` touches `+-2` with zero slope and `M = +-I`: a closed gap inside
    /// a band, or an isolated spectral point.
    Degenerate,
}

/// A located band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdge {
    pub lambda: f64,
    pub kind: EdgeKind,
    /// the value `+2` or `-2` the discriminant meets there
    pub level: f64,
}

/// Qualitative findings attached to a band report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BandFlags {
    /// the discriminant is constant on the window (its value); the band
    /// picture degenerates and `bands` is left empty
    pub constant_d: Option<f64>,
    /// the degenerate subspace is nontrivial: the system is not definite
    /// and operator spectrum and band picture part ways
    pub non_definite: bool,
    /// set by the scalar (`n = 1`) path: every real parameter has unimodular
    /// multipliers, so the spectrum is the whole line
    pub scalar_whole_line: bool,
}

/// Bands, edges, and flags found on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub window: (f64, f64),
    pub bands: Vec<Band>,
    pub edges: Vec<BandEdge>,
    pub flags: BandFlags,
    /// edge location tolerance actually used (relative, scaled by 1 + |lambda|)
    pub tolerance: f64,
    /// scalar path only: largest observed deviation of `|rho|` from 1
    pub max_multiplier_deviation: Option<f64>,
}

/// Options for the band scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandOptions {
    /// number of grid samples of the discriminant on the window
    pub grid: usize,
    /// relative tolerance for edge locations
    pub tol: f64,
    pub quad: QuadOptions,
}

impl Default for BandOptions {
    fn default() -> Self {
        BandOptions {
            grid: 2001,
            tol: 1e-10,
            quad: QuadOptions::default(),
        }
    }
}

fn real_discriminant(p: &Planar, lambda: f64) -> Result<f64, Error> {
    Ok(monodromy_planar(p, cr(lambda))?.discriminant.re)
}

/// Bisection for `D(lambda) = level` on a bracket with a sign change.
fn bisect_level(
    p: &Planar,
    level: f64,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64, Error> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= tol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        let fm = real_discriminant(p, mid)? - level;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection for a zero of the discriminant derivative on a bracket where
/// its sign changes, pushed well below the edge tolerance so the monodromy
/// test at the result is meaningful.
fn bisect_slope(p: &Planar, quad: &QuadOptions, mut a: f64, mut b: f64) -> Result<f64, Error> {
    let mut fa = discriminant_derivative_planar(p, cr(a), quad)?.re;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= 1e-12 * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        let fm = discriminant_derivative_planar(p, cr(mid), quad)?.re;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Compute the spectral bands of a planar system on `[lo, hi]`.
///
/// The system is validated first; any violation aborts with
/// [`Error::InvalidSystem`]. A constant discriminant short-circuits: no
/// bands are reported and the flags carry the constant value and the
/// definiteness finding instead.
pub fn stability_bands(
    sys: &CanonicalSystem,
    lo: f64,
    hi: f64,
    opts: &BandOptions,
) -> Result<BandReport, Error> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Structure(format!("bad window [{lo}, {hi}]")));
    }
    let report = crate::measure::validate_system(sys);
    if !report.ok {
        return Err(Error::InvalidSystem(report.summary()));
    }
    let p = Planar::try_new(sys)?;
    let n = opts.grid.max(3);
    let mut grid = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let lam = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        grid.push(lam);
        d.push(real_discriminant(&p, lam)?);
    }
    let d_max = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spread = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - d.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut flags = BandFlags::default();
    if spread <= 1e-10 * (1.0 + d_max) {
        let value = d.iter().sum::<f64>() / n as f64;
        flags.constant_d = Some(value);
        let l0 = detect_degenerate_subspace(sys, &opts.quad)?;
        flags.non_definite = l0.dimension > 0;
        return Ok(BandReport {
            window: (lo, hi),
            bands: Vec::new(),
            edges: Vec::new(),
            flags,
            tolerance: opts.tol,
            max_multiplier_deviation: None,
        });
    }

    let mut edges: Vec<BandEdge> = Vec::new();
    // transversal crossings of both levels; grid points landing exactly on
    // a level are recorded directly
    for level in [2.0, -2.0] {
        for i in 0..n {
            if d[i] - level == 0.0 {
                edges.push(BandEdge {
                    lambda: grid[i],
                    kind: EdgeKind::Simple,
                    level,
                });
            }
        }
        for i in 0..n - 1 {
            let (fa, fb) = (d[i] - level, d[i + 1] - level);
            if fa * fb < 0.0 {
                let lam = bisect_level(&p, level, grid[i], fa, grid[i + 1], opts.tol)?;
                edges.push(BandEdge {
                    lambda: lam,
                    kind: EdgeKind::Simple,
                    level,
                });
            }
        }
    }
    // extrema of D: candidates for degenerate touch points or for pairs of
    // crossings hidden inside one grid cell
    let edge_tol = |lam: f64| COINCIDENT_EIGS * (1.0 + lam.abs());
    for i in 1..n - 1 {
        let (s_left, s_right) = (d[i] - d[i - 1], d[i + 1] - d[i]);
        if s_left * s_right >= 0.0 {
            continue;
        }
        let lam_star = bisect_slope(&p, &opts.quad, grid[i - 1], grid[i + 1])?;
        let d_star = real_discriminant(&p, lam_star)?;
        let level = if d_star >= 0.0 { 2.0 } else { -2.0 };
        if (d_star - level).abs() <= edge_tol(lam_star) {
            let m = monodromy_planar(&p, cr(lam_star))?;
            let dev = (m.full() - Mat2::identity() * cr(0.5 * level)).norm();
            if dev <= 1e-6 * m.full().norm().max(1.0) {
                edges.push(BandEdge {
                    lambda: lam_star,
                    kind: EdgeKind::Degenerate,
                    level,
                });
            }
        } else if d_star.abs() < 2.0 - edge_tol(lam_star) {
            // the extremum dips through the level and back within one cell:
            // recover the two crossings the grid scan missed
            let f_left = d[i - 1] - level;
            let f_star = d_star - level;
            if f_left * f_star < 0.0 {
                let a = bisect_level(&p, level, grid[i - 1], f_left, lam_star, opts.tol)?;
                edges.push(BandEdge {
                    lambda: a,
                    kind: EdgeKind::Simple,
                    level,
                });
            }
            let f_right = d[i + 1] - level;
            if f_star * f_right < 0.0 {
                let b = bisect_level(&p, level, lam_star, f_star, grid[i + 1], opts.tol)?;
                edges.push(BandEdge {
                    lambda: b,
                    kind: EdgeKind::Simple,
                    level,
                });
            }
        }
    }
    edges.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    edges.dedup_by(|a, b| {
        if (a.lambda - b.lambda).abs() <= 1e-7 * (1.0 + b.lambda.abs()) {
            // a is removed; keep the degenerate label if either carried it
            if a.kind == EdgeKind::Degenerate {
                b.kind = EdgeKind::Degenerate;
            }
            true
        } else {
            false
        }
    });

    // assemble bands from the cells between consecutive breakpoints
    let mut breaks = vec![lo];
    breaks.extend(edges.iter().map(|e| e.lambda));
    breaks.push(hi);
    let mut bands: Vec<Band> = Vec::new();
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        if real_discriminant(&p, mid)?.abs() >= 2.0 {
            continue;
        }
        match bands.last_mut() {
            // contiguous cells merge across closed gaps
            Some(last) if (last.hi - a).abs() <= 1e-12 * (1.0 + a.abs()) => last.hi = b,
            _ => bands.push(Band {
                lo: a,
                hi: b,
                clipped_lo: false,
                clipped_hi: false,
            }),
        }
    }
    // a degenerate touch with no band cell on either side is an isolated
    // spectral point
    for e in &edges {
        if e.kind == EdgeKind::Degenerate
            && !bands.iter().any(|b| b.lo <= e.lambda && e.lambda <= b.hi)
        {
            bands.push(Band {
                lo: e.lambda,
                hi: e.lambda,
                clipped_lo: false,
                clipped_hi: false,
            });
        }
    }
    bands.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let edge_positions: Vec<f64> = edges.iter().map(|e| e.lambda).collect();
    let at_edge = |x: f64| {
        edge_positions
            .iter()
            .any(|&e| (e - x).abs() <= 1e-12 * (1.0 + x.abs()))
    };
    for b in &mut bands {
        b.clipped_lo = (b.lo - lo).abs() <= f64::EPSILON * (1.0 + lo.abs()) && !at_edge(b.lo);
        b.clipped_hi = (b.hi - hi).abs() <= f64::EPSILON * (1.0 + hi.abs()) && !at_edge(b.hi);
    }

    Ok(BandReport {
        window: (lo, hi),
        bands,
        edges,
        flags,
        tolerance: opts.tol,
        max_multiplier_deviation: None,
    })
}

/// Where one parameter value sits relative to the spectrum and the singular
/// set. The verdict is discriminant-based: for a non-definite system the
/// operator spectrum is thinner than the band picture (see
/// [`detect_degenerate_subspace`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaClass {
    /// some jump factor degenerates at this parameter (position of the atom)
    Singular { position: f64 },
    /// `|D| < 2` strictly: two unimodular multipliers, inside a band
    BandInterior,
    /// `|D| = 2` within tolerance: a band edge
    BandEdge,
    /// neither singular nor in a band: the resolvent set (this includes all
    /// non-real parameters off the singular set)
    Resolvent,
}

/// Classify one parameter value. Total: every finite `lambda` receives a
/// class.
pub fn classify_lambda(sys: &CanonicalSystem, lambda: C64) -> Result<LambdaClass, Error> {
    let p = Planar::try_new(sys)?;
    for (pos, dq, dw) in &p.atoms {
        if atom_transfer(p.r, dq, dw, lambda).is_err() {
            return Ok(LambdaClass::Singular { position: *pos });
        }
    }
    if lambda.im.abs() > 1e-12 * (1.0 + lambda.norm()) {
        return Ok(LambdaClass::Resolvent);
    }
    let d = monodromy_planar(&p, lambda)?.discriminant;
    let tol = COINCIDENT_EIGS * (1.0 + d.norm());
    if (d.norm() - 2.0).abs() <= tol {
        Ok(LambdaClass::BandEdge)
    } else if d.norm() < 2.0 {
        Ok(LambdaClass::BandInterior)
    } else {
        Ok(LambdaClass::Resolvent)
    }
}

/// The degenerate subspace: solutions of `J u' + q u = 0` that the weight
/// annihilates identically (`w u = 0` at every atom and along every density
/// piece). Its dimension is 0 for definite systems; any nontrivial
/// dimension forces a constant discriminant.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateSubspace {
    /// parameter at which the monodromy probe was taken (the subspace itself
    /// is parameter-independent)
    pub probe: C64,
    pub dimension: usize,
    /// initial values at the base point of the confirmed solutions
    pub basis: Vec<CVec2>,
    /// weighted seminorms `v* T v` of the confirmed directions (all below
    /// the detection threshold)
    pub seminorms: Vec<f64>,
}

/// Pointwise check that the solution seeded by `v` is annihilated by the
/// weight along one period: returns the largest residual `|w psi|` seen at
/// atoms (balanced values) and at quadrature nodes of density pieces,
/// normalized by the local solution size.
fn weight_annihilation_residual(
    p: &Planar,
    lambda: C64,
    v: &CVec2,
    quad: &QuadOptions,
) -> Result<f64, Error> {
    let rule = gauss_legendre(quad.order);
    let mut u = Mat2::identity();
    let mut worst = 0.0f64;
    let mut check = |w: &crate::linalg::RMat2, vec: &CVec2| {
        let w_c = Mat2::new(cr(w[(0, 0)]), cr(w[(0, 1)]), cr(w[(1, 0)]), cr(w[(1, 1)]));
        let res = (w_c * vec).norm() / (1.0 + w.norm()) / (1.0 + vec.norm());
        worst = worst.max(res);
    };
    for step in p.steps(p.x0, p.x0 + p.omega) {
        match step {
            Step::Jump(pos) => {
                let (dq, dw) = p
                    .jumps_at(pos)
                    .ok_or_else(|| Error::Numeric(format!("lost track of the atom at {pos}")))?;
                let a = atom_transfer(p.r, dq, dw, lambda).map_err(|_| Error::SingularAtom {
                    position: reduce_mod(pos, p.omega),
                    lambda,
                })?;
                let balanced = (Mat2::identity() + a) * cr(0.5) * u * v;
                check(dw, &balanced);
                u = a * u;
            }
            Step::Drift(a, b) => {
                let (qd, wd) = p.densities_at(0.5 * (a + b));
                if wd.norm() == 0.0 {
                    u = segment_transfer(p.r, qd, wd, lambda, b - a) * u;
                    continue;
                }
                for (pa, pb) in subpieces(a, b, quad.max_piece_len) {
                    let (mid, half) = (0.5 * (pa + pb), 0.5 * (pb - pa));
                    for &(node, _) in &rule {
                        let x = mid + half * node;
                        let u_x = segment_transfer(p.r, qd, wd, lambda, x - pa) * u * v;
                        check(wd, &u_x);
                    }
                    u = segment_transfer(p.r, qd, wd, lambda, pb - pa) * u;
                }
            }
        }
    }
    Ok(worst)
}

/// Detect the degenerate subspace by probing the monodromy matrix at one
/// parameter and testing the natural candidate directions against the
/// weighted period integral and pointwise annihilation.
///
/// Candidates: the two eigenvectors when the multipliers are distinct, the
/// eigenvectors of the (positive semidefinite) weighted period integral
/// when `M = +-I`, and the chain vectors of a Jordan block, where the
/// generalized direction can only qualify together with the genuine one.
pub fn detect_degenerate_subspace(
    sys: &CanonicalSystem,
    quad: &QuadOptions,
) -> Result<DegenerateSubspace, Error> {
    let p = Planar::try_new(sys)?;
    // move off the (finite) singular set if a probe happens to hit it
    let mut chosen = None;
    for probe_re in [0.0, 1.0, 2.0, 3.0] {
        let probe = cr(probe_re);
        match monodromy_planar(&p, probe) {
            Ok(m) => {
                chosen = Some((probe, m));
                break;
            }
            Err(Error::SingularAtom { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let (probe, m) = chosen.ok_or_else(|| {
        Error::Numeric("all probe parameters hit the singular set".to_string())
    })?;
    let t = t_matrix_planar(&p, probe, quad)?;
    let t_scale = t.norm();
    let data = floquet_from_monodromy(m, p.omega);
    // (candidate, requires confirmation of all earlier candidates)
    let candidates: Vec<(CVec2, bool)> = match &data.structure {
        FloquetStructure::Distinct { c1, c2 } => vec![(*c1, false), (*c2, false)],
        FloquetStructure::DoubleDiagonal { .. } => {
            let ((_, v_small), (_, v_large)) = herm_eig2(&t);
            vec![(v_small, false), (v_large, false)]
        }
        FloquetStructure::DoubleJordan { c, c_gen } => vec![(*c, false), (*c_gen, true)],
    };
    let mut basis = Vec::new();
    let mut seminorms = Vec::new();
    let mut all_prior_confirmed = true;
    for (v, needs_prior) in candidates {
        if needs_prior && !all_prior_confirmed {
            continue;
        }
        let seminorm = (v.adjoint() * t * v)[(0, 0)].norm();
        let confirmed = seminorm <= 1e-12 * (1.0 + t_scale)
            && weight_annihilation_residual(&p, probe, &v, quad)? <= 1e-9;
        if confirmed {
            basis.push(v);
            seminorms.push(seminorm);
        } else {
            all_prior_confirmed = false;
        }
    }
    Ok(DegenerateSubspace {
        probe,
        dimension: basis.len(),
        basis,
        seminorms,
    })
}
