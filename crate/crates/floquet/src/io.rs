//! Problem files, the named example registry, and machine-readable output.
//!
//! A problem file is a JSON document describing one periodic canonical
//! system (see [`ProblemFile`] for the schema). [`parse_problem`] turns it
//! into a validated [`CanonicalSystem`] or reports exactly what is wrong,
//! three ways: malformed text ([`ProblemError::Syntax`]), a well-formed
//! document that does not fit the schema ([`ProblemError::Schema`]), or a
//! schema-correct system that fails validation
//! ([`ProblemError::Invalid`], carrying the full report).
//!
//! The [`registry`] holds seven ready-made systems with closed-form
//! discriminants where they exist, used both as quick-start inputs and as
//! cross-checks of the numerics.
//!
//! All numeric output (JSON and CSV) prints floats with 17 significant
//! digits, so files and sweeps round-trip bit-for-bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{Mat2, C64};
use crate::measure::{
    dmat2, validate_system, CanonicalSystem, MatrixMeasureSpec, RealMat, SingularSet,
    ValidationReport,
};
use crate::monodromy::{discriminant, floquet_data, FloquetData, FloquetStructure};
use crate::spectral::{BandReport, EdgeKind};

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

/// One atom in a problem file: a position in `[0, period)` and a row-major
/// real weight matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomFile {
    pub position: f64,
    pub weight: Vec<Vec<f64>>,
}

/// One density piece in a problem file: a constant matrix on `[from, to)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    pub from: f64,
    pub to: f64,
    pub matrix: Vec<Vec<f64>>,
}

/// One measure in a problem file. Both parts default to empty.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density: Vec<DensityFile>,
}

/// The problem-file schema, version 1.
///
/// `n` is 1 or 2. The structure matrix is given either as the scale `r`
/// (meaning `J = r [[0,-1],[1,0]]` for `n = 2` and `J = i r` for `n = 1`)
/// or, for `n = 2` only, as the full matrix `j`, which must be skew with
/// zero diagonal. `base_point` is optional; when absent the midpoint of the
/// largest atom-free gap is used.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    pub n: usize,
    pub period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<f64>,
    #[serde(default)]
    pub q: MeasureFile,
    #[serde(default)]
    pub w: MeasureFile,
}

/// Why a problem file was rejected.
#[derive(Debug)]
pub enum ProblemError {
    /// the text is not well-formed JSON (or has wrong/unknown fields);
    /// positions are 1-based
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// well-formed, but the values do not describe a system
    Schema(Vec<String>),
    /// a complete system that fails validation
    Invalid(ValidationReport),
}

impl std::fmt::Display for ProblemError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProblemError::Syntax {
                line,
                column,
                message,
            } => write!(f, "syntax error at line {line}, column {column}: {message}"),
            ProblemError::Schema(errs) => {
                writeln!(f, "schema error:")?;
                for e in errs {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
            ProblemError::Invalid(report) => f.write_str(&render_report(report)),
        }
    }
}

impl std::error::Error for ProblemError {}

fn real_mat(rows: &[Vec<f64>], n: usize) -> Result<RealMat, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!(
            "{} x {}",
            rows.len(),
            rows.first().map_or(0, |r| r.len())
        ));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(RealMat::from_row_slice(n, n, &flat))
}

fn measure_from_file(
    mf: &MeasureFile,
    n: usize,
    period: f64,
    label: &str,
    errs: &mut Vec<String>,
) -> MatrixMeasureSpec {
    let mut spec = MatrixMeasureSpec::new(n, period);
    for (i, a) in mf.atoms.iter().enumerate() {
        match real_mat(&a.weight, n) {
            Ok(m) => spec = spec.with_atom(a.position, m),
            Err(shape) => errs.push(format!(
                "{label}.atoms[{i}].weight is {shape}, expected {n} x {n}"
            )),
        }
    }
    for (i, d) in mf.density.iter().enumerate() {
        match real_mat(&d.matrix, n) {
            Ok(m) => spec = spec.with_density(d.from, d.to, m),
            Err(shape) => errs.push(format!(
                "{label}.density[{i}].matrix is {shape}, expected {n} x {n}"
            )),
        }
    }
    spec
}

/// Interpret a parsed document as a validated system.
pub fn problem_to_system(file: &ProblemFile) -> Result<CanonicalSystem, ProblemError> {
    let mut errs = Vec::new();
    if file.schema_version != 1 {
        errs.push(format!(
            "unsupported schema_version {} (this tool reads version 1)",
            file.schema_version
        ));
    }
    let n = file.n;
    if n != 1 && n != 2 {
        errs.push(format!("n = {n} is not supported (only 1 and 2)"));
    }
    if !(file.period.is_finite() && file.period > 0.0) {
        errs.push(format!("period must be a positive number, got {}", file.period));
    }
    let mut scale = f64::NAN;
    match (file.r, &file.j) {
        (Some(r), None) => scale = r,
        (None, Some(j)) => {
            if n != 2 {
                errs.push("for n = 1 give the scale r (J = i r), not a matrix".to_string());
            } else if j.len() != 2 || j.iter().any(|row| row.len() != 2) {
                errs.push("j must be a 2 x 2 matrix".to_string());
            } else if j[0][0] != 0.0 || j[1][1] != 0.0 || j[0][1] != -j[1][0] {
                errs.push(
                    "j must be skew-symmetric with zero diagonal: [[0, -r], [r, 0]]".to_string(),
                );
            } else {
                scale = j[1][0];
            }
        }
        (Some(_), Some(_)) => errs.push("give exactly one of r and j, not both".to_string()),
        (None, None) => errs.push("one of r and j is required".to_string()),
    }
    let q = measure_from_file(&file.q, n.clamp(1, 2), file.period, "q", &mut errs);
    let w = measure_from_file(&file.w, n.clamp(1, 2), file.period, "w", &mut errs);
    if !errs.is_empty() {
        return Err(ProblemError::Schema(errs));
    }
    let sys = match n {
        1 => CanonicalSystem::scalar(scale, q, w, file.base_point),
        _ => CanonicalSystem::planar(scale, q, w, file.base_point),
    };
    let report = validate_system(&sys);
    if !report.ok {
        return Err(ProblemError::Invalid(report));
    }
    Ok(sys)
}

/// Parse a problem file into a validated system.
pub fn parse_problem(text: &str) -> Result<CanonicalSystem, ProblemError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    problem_to_system(&file)
}

fn nested(m: &RealMat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn measure_to_file(spec: &MatrixMeasureSpec) -> MeasureFile {
    MeasureFile {
        atoms: spec
            .atoms
            .iter()
            .map(|a| AtomFile {
                position: a.position,
                weight: nested(&a.weight),
            })
            .collect(),
        density: spec
            .density
            .iter()
            .map(|d| DensityFile {
                from: d.from,
                to: d.to,
                matrix: nested(&d.matrix),
            })
            .collect(),
    }
}

/// Write a system back out as a problem file. Floats carry 17 significant
/// digits, so `parse_problem(serialize_problem(sys))` reproduces the system
/// exactly.
pub fn serialize_problem(sys: &CanonicalSystem) -> String {
    let file = ProblemFile {
        schema_version: 1,
        n: sys.n,
        period: sys.omega,
        r: Some(sys.j_scale),
        j: None,
        base_point: Some(sys.base_point),
        q: measure_to_file(&sys.q),
        w: measure_to_file(&sys.w),
    };
    to_json_pretty(&file)
}

/// Human-readable rendering of a validation report, one line per finding,
/// followed by the singular set.
pub fn render_report(report: &ValidationReport) -> String {
    let mut s = String::new();
    if report.ok {
        s.push_str("valid problem\n");
    } else {
        let _ = writeln!(s, "invalid problem: {} violation(s)", report.violations.len());
        for v in &report.violations {
            let _ = writeln!(s, "  - [{}] {}", v.code.as_str(), v.message);
        }
    }
    match &report.singular_set {
        Some(SingularSet::Finite(list)) if list.is_empty() => {
            s.push_str("singular set: empty\n");
        }
        Some(SingularSet::Finite(list)) => {
            s.push_str("singular set:\n");
            for sa in list {
                let roots: Vec<String> = sa.roots.iter().map(|z| fmt_c_plain(*z)).collect();
                let _ = writeln!(s, "  atom at {}: {}", sa.position, roots.join(", "));
            }
        }
        Some(SingularSet::IdenticallySingular { position }) => {
            let _ = writeln!(
                s,
                "singular set: the whole plane (atom at {position} is identically singular)"
            );
        }
        None => s.push_str("singular set: not computed\n"),
    }
    s
}

fn fmt_c_plain(z: C64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

// ---------------------------------------------------------------------------
// JSON and CSV output
// ---------------------------------------------------------------------------

/// A float as text with 17 significant digits (exact round-trip).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter printing every float with 17 significant digits.
struct SciFloats<F> {
    inner: F,
}

impl<F: serde_json::ser::Formatter> serde_json::ser::Formatter for SciFloats<F> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
    fn begin_array<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array(w)
    }
    fn end_array<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array(w)
    }
    fn begin_array_value<W>(&mut self, w: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array_value(w)
    }
    fn begin_object<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object(w)
    }
    fn end_object<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object(w)
    }
    fn begin_object_key<W>(&mut self, w: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W>(&mut self, w: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object_value(w)
    }
}

fn to_json_with<F: serde_json::ser::Formatter, T: Serialize>(value: &T, fmt: F) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFloats { inner: fmt });
    value
        .serialize(&mut ser)
        .expect("serializing plain data cannot fail");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

/// Compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    to_json_with(value, serde_json::ser::CompactFormatter)
}

/// Indented JSON with 17-significant-digit floats.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    to_json_with(value, serde_json::ser::PrettyFormatter::new())
}

fn cpair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn mat_pairs(m: &Mat2) -> [[[f64; 2]; 2]; 2] {
    [
        [cpair(m[(0, 0)]), cpair(m[(0, 1)])],
        [cpair(m[(1, 0)]), cpair(m[(1, 1)])],
    ]
}

/// One row of a discriminant sweep. On failure the numeric fields are
/// absent and `error` explains why; the sweep itself never aborts.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_rho1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sample the discriminant and leading multiplier on an even grid; one row
/// per sample. `samples == 1` yields the single point `lo`.
pub fn discriminant_sweep(sys: &CanonicalSystem, lo: f64, hi: f64, samples: usize) -> Vec<SweepRow> {
    let samples = samples.max(1);
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let lambda = if samples == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (samples - 1) as f64
        };
        match floquet_data(sys, C64::new(lambda, 0.0)) {
            Ok(data) => rows.push(SweepRow {
                lambda,
                re_d: Some(data.monodromy.discriminant.re),
                im_d: Some(data.monodromy.discriminant.im),
                abs_rho1: Some(data.rho.0.norm()),
                error: None,
            }),
            Err(e) => rows.push(SweepRow {
                lambda,
                re_d: None,
                im_d: None,
                abs_rho1: None,
                error: Some(e.to_string()),
            }),
        }
    }
    rows
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Render sweep rows as CSV. The header is fixed; failed rows keep the
/// numeric fields empty and append the error message as an extra column.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("lambda,re_D,im_D,abs_rho1\n");
    for row in rows {
        match (&row.re_d, &row.im_d, &row.abs_rho1, &row.error) {
            (Some(re), Some(im), Some(rho), None) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_float(row.lambda),
                    fmt_float(*re),
                    fmt_float(*im),
                    fmt_float(*rho)
                );
            }
            _ => {
                let msg = row.error.as_deref().unwrap_or("unknown failure");
                let _ = writeln!(out, "{},,,,{}", fmt_float(row.lambda), csv_quote(msg));
            }
        }
    }
    out
}

/// Fixed JSON shape of a band report: `{bands, edges, flags}`.
#[derive(Debug, Serialize)]
pub struct BandsOut {
    pub bands: Vec<[f64; 2]>,
    pub edges: Vec<EdgeOut>,
    pub flags: FlagsOut,
}

#[derive(Debug, Serialize)]
pub struct EdgeOut {
    pub lambda: f64,
    #[serde(rename = "type")]
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct FlagsOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_d: Option<f64>,
    pub non_definite: bool,
    pub scalar_whole_line: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_multiplier_deviation: Option<f64>,
}

/// Project a band report onto the fixed JSON shape.
pub fn bands_json(report: &BandReport) -> BandsOut {
    BandsOut {
        bands: report.bands.iter().map(|b| [b.lo, b.hi]).collect(),
        edges: report
            .edges
            .iter()
            .map(|e| EdgeOut {
                lambda: e.lambda,
                kind: match e.kind {
                    EdgeKind::Simple => "simple",
                    EdgeKind::Degenerate => "degenerate",
                },
            })
            .collect(),
        flags: FlagsOut {
            constant_d: report.flags.constant_d,
            non_definite: report.flags.non_definite,
            scalar_whole_line: report.flags.scalar_whole_line,
            max_multiplier_deviation: report.max_multiplier_deviation,
        },
    }
}

/// JSON shape of a monodromy query: complex numbers as `[re, im]`,
/// matrices as nested arrays of such pairs.
#[derive(Debug, Serialize)]
pub struct MonodromyOut {
    pub lambda: [f64; 2],
    pub base_point: f64,
    pub matrix: [[[f64; 2]; 2]; 2],
    pub det_m: [f64; 2],
    pub discriminant: [f64; 2],
    pub multipliers: [[f64; 2]; 2],
    pub exponents: [[f64; 2]; 2],
    pub structure: &'static str,
    pub borderline: bool,
}

/// The tag used for a Floquet structure in JSON output.
pub fn structure_tag(s: &FloquetStructure) -> &'static str {
    match s {
        FloquetStructure::Distinct { .. } => "distinct",
        FloquetStructure::DoubleDiagonal { .. } => "double_diagonal",
        FloquetStructure::DoubleJordan { .. } => "double_jordan",
    }
}

/// Project Floquet data onto the monodromy JSON shape.
pub fn monodromy_json(data: &FloquetData) -> MonodromyOut {
    MonodromyOut {
        lambda: cpair(data.monodromy.lambda),
        base_point: data.monodromy.base_point,
        matrix: mat_pairs(&data.monodromy.full()),
        det_m: cpair(data.monodromy.det),
        discriminant: cpair(data.monodromy.discriminant),
        multipliers: [cpair(data.rho.0), cpair(data.rho.1)],
        exponents: [cpair(data.alpha.0), cpair(data.alpha.1)],
        structure: structure_tag(&data.structure),
        borderline: data.borderline,
    }
}

/// JSON shape of a Green's function query.
#[derive(Debug, Serialize)]
pub struct GreensOut {
    pub lambda: [f64; 2],
    pub x: f64,
    pub y: f64,
    pub matrix: [[[f64; 2]; 2]; 2],
    pub decay_rate: f64,
}

/// Project a Green's function value onto its JSON shape.
pub fn greens_json(value: &crate::greens::GreensValue) -> GreensOut {
    GreensOut {
        lambda: cpair(value.lambda),
        x: value.x,
        y: value.y,
        matrix: mat_pairs(&value.matrix),
        decay_rate: value.decay_rate,
    }
}

// ---------------------------------------------------------------------------
// The example registry
// ---------------------------------------------------------------------------

/// One adjustable parameter of a registry entry.
#[derive(Debug, Clone, Copy)]
pub struct ExampleParam {
    pub name: &'static str,
    pub default: f64,
}

/// Closed-form discriminant of a registry entry, as a function of the real
/// parameter and the (pre-merged) example parameters.
pub type ClosedForm = fn(f64, &BTreeMap<String, f64>) -> C64;

/// Closed-form band list of a registry entry within a window.
pub type ExpectedBands = fn(&BTreeMap<String, f64>, (f64, f64)) -> Vec<(f64, f64)>;

/// One named system in the registry.
pub struct ExampleEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ExampleParam],
    /// default parameter window for sweeps and checks
    pub default_window: (f64, f64),
    pub build: fn(&BTreeMap<String, f64>) -> CanonicalSystem,
    /// closed-form discriminant, where one exists
    pub closed_form: Option<ClosedForm>,
    /// closed-form band structure within a window, where one is known
    pub expected_bands: Option<ExpectedBands>,
}

fn p(map: &BTreeMap<String, f64>, key: &str) -> f64 {
    *map.get(key).expect("parameter defaults are pre-merged")
}

fn lebesgue(m: [[f64; 2]; 2], period: f64) -> MatrixMeasureSpec {
    MatrixMeasureSpec::new(2, period).with_density(0.0, period, dmat2(m))
}

fn build_free_schroedinger(_: &BTreeMap<String, f64>) -> CanonicalSystem {
    CanonicalSystem::planar(
        1.0,
        lebesgue([[0.0, 0.0], [0.0, -1.0]], 1.0),
        lebesgue([[1.0, 0.0], [0.0, 0.0]], 1.0),
        None,
    )
}

fn build_constant_q_zero_w(m: &BTreeMap<String, f64>) -> CanonicalSystem {
    let (a, b, d) = (p(m, "a"), p(m, "b"), p(m, "d"));
    CanonicalSystem::planar(
        1.0,
        lebesgue([[a, b], [b, d]], 1.0),
        MatrixMeasureSpec::new(2, 1.0),
        None,
    )
}

fn build_constant_q_rank_one_w(m: &BTreeMap<String, f64>) -> CanonicalSystem {
    let (a, b) = (p(m, "a"), p(m, "b"));
    CanonicalSystem::planar(
        1.0,
        lebesgue([[a, b], [b, 0.0]], 1.0),
        lebesgue([[1.0, 0.0], [0.0, 0.0]], 1.0),
        None,
    )
}

fn build_comb_scalar_weight(m: &BTreeMap<String, f64>) -> CanonicalSystem {
    let (a, alpha) = (p(m, "a"), p(m, "alpha"));
    let q = MatrixMeasureSpec::new(2, 1.0)
        .with_atom(0.0, dmat2([[a, 0.0], [0.0, 0.0]]))
        .with_density(0.0, 1.0, dmat2([[0.0, 0.0], [0.0, -1.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[alpha, 0.0], [0.0, 0.0]]));
    CanonicalSystem::planar(1.0, q, w, None)
}

fn build_comb_rank_one(m: &BTreeMap<String, f64>) -> CanonicalSystem {
    let (a, b) = (p(m, "a"), p(m, "b"));
    let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[a, b], [b, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 0.0]]));
    CanonicalSystem::planar(1.0, q, w, None)
}

fn build_comb_full(m: &BTreeMap<String, f64>) -> CanonicalSystem {
    let (a, b, d) = (p(m, "a"), p(m, "b"), p(m, "d"));
    let q = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[a, b], [b, d]]));
    let w = MatrixMeasureSpec::new(2, 1.0).with_atom(0.0, dmat2([[1.0, 0.0], [0.0, 1.0]]));
    CanonicalSystem::planar(1.0, q, w, None)
}

fn build_alternating_comb(_: &BTreeMap<String, f64>) -> CanonicalSystem {
    // period 2: the coupling atom flips sign at the half-integers of the
    // period while the weight atom repeats, making every jump factor
    // singular at every parameter
    let q = MatrixMeasureSpec::new(2, 2.0)
        .with_atom(0.0, dmat2([[0.0, 2.0], [2.0, 0.0]]))
        .with_atom(1.0, dmat2([[0.0, -2.0], [-2.0, 0.0]]));
    let w = MatrixMeasureSpec::new(2, 2.0)
        .with_atom(0.0, dmat2([[2.0, 0.0], [0.0, 0.0]]))
        .with_atom(1.0, dmat2([[2.0, 0.0], [0.0, 0.0]]));
    CanonicalSystem::planar(1.0, q, w, None)
}

fn d_free(lambda: f64, _: &BTreeMap<String, f64>) -> C64 {
    C64::new(lambda, 0.0).sqrt().cos() * 2.0
}

fn d_constant_q_zero_w(_: f64, m: &BTreeMap<String, f64>) -> C64 {
    let (a, b, d) = (p(m, "a"), p(m, "b"), p(m, "d"));
    C64::new(b * b - a * d, 0.0).sqrt().cosh() * 2.0
}

fn d_constant_q_rank_one_w(_: f64, m: &BTreeMap<String, f64>) -> C64 {
    C64::new(2.0 * p(m, "b").cosh(), 0.0)
}

fn d_comb_scalar_weight(lambda: f64, m: &BTreeMap<String, f64>) -> C64 {
    C64::new(2.0 + p(m, "a") - p(m, "alpha") * lambda, 0.0)
}

fn d_comb_rank_one(_: f64, m: &BTreeMap<String, f64>) -> C64 {
    let b2 = p(m, "b").powi(2);
    C64::new(2.0 * (4.0 + b2) / (4.0 - b2), 0.0)
}

fn d_comb_full(lambda: f64, m: &BTreeMap<String, f64>) -> C64 {
    let (a, b, d) = (p(m, "a"), p(m, "b"), p(m, "d"));
    C64::new(
        16.0 / (lambda * lambda - (a + d) * lambda + a * d - b * b + 4.0) - 2.0,
        0.0,
    )
}

fn clip(lo: f64, hi: f64, window: (f64, f64)) -> Option<(f64, f64)> {
    let (a, b) = (lo.max(window.0), hi.min(window.1));
    (a <= b).then_some((a, b))
}

fn bands_comb_scalar_weight(m: &BTreeMap<String, f64>, window: (f64, f64)) -> Vec<(f64, f64)> {
    let (a, alpha) = (p(m, "a"), p(m, "alpha"));
    if alpha <= 0.0 {
        return Vec::new();
    }
    clip(a / alpha, (4.0 + a) / alpha, window).into_iter().collect()
}

fn bands_comb_full(m: &BTreeMap<String, f64>, window: (f64, f64)) -> Vec<(f64, f64)> {
    let (a, b, d) = (p(m, "a"), p(m, "b"), p(m, "d"));
    // the discriminant equals 2 where lambda^2 - (a+d) lambda + ad - b^2 = 0
    let disc = (a - d) * (a - d) + 4.0 * b * b;
    let mid = 0.5 * (a + d);
    let half = 0.5 * disc.sqrt();
    if half == 0.0 {
        // the maximum touches 2 from below: no gap at all
        return clip(window.0, window.1, window).into_iter().collect();
    }
    [
        clip(window.0, mid - half, window),
        clip(mid + half, window.1, window),
    ]
    .into_iter()
    .flatten()
    .collect()
}

const REGISTRY: [ExampleEntry; 7] = [
    ExampleEntry {
        name: "schrodinger-free",
        summary: "free Schrodinger operator -y'' = lambda y in system form",
        params: &[],
        default_window: (-10.0, 40.0),
        build: build_free_schroedinger,
        closed_form: Some(d_free),
        expected_bands: None,
    },
    ExampleEntry {
        name: "constant-q-zero-w",
        summary: "constant coupling, zero weight: constant discriminant",
        params: &[
            ExampleParam { name: "a", default: 0.0 },
            ExampleParam { name: "b", default: 1.0 },
            ExampleParam { name: "d", default: 0.0 },
        ],
        default_window: (-10.0, 10.0),
        build: build_constant_q_zero_w,
        closed_form: Some(d_constant_q_zero_w),
        expected_bands: None,
    },
    ExampleEntry {
        name: "constant-q-rank-one-w",
        summary: "constant coupling with rank-one weight: one degenerate direction",
        params: &[
            ExampleParam { name: "a", default: 0.0 },
            ExampleParam { name: "b", default: 1.0 },
        ],
        default_window: (-10.0, 10.0),
        build: build_constant_q_rank_one_w,
        closed_form: Some(d_constant_q_rank_one_w),
        expected_bands: None,
    },
    ExampleEntry {
        name: "dirac-comb-scalar-weight",
        summary: "point couplings and point weights on the integers: one finite band",
        params: &[
            ExampleParam { name: "a", default: 1.0 },
            ExampleParam { name: "alpha", default: 1.0 },
        ],
        default_window: (-10.0, 10.0),
        build: build_comb_scalar_weight,
        closed_form: Some(d_comb_scalar_weight),
        expected_bands: Some(bands_comb_scalar_weight),
    },
    ExampleEntry {
        name: "dirac-comb-rank-one",
        summary: "rank-one point coupling and weight: constant discriminant outside [-2, 2)",
        params: &[
            ExampleParam { name: "a", default: 0.0 },
            ExampleParam { name: "b", default: 1.0 },
        ],
        default_window: (-10.0, 10.0),
        build: build_comb_rank_one,
        closed_form: Some(d_comb_rank_one),
        expected_bands: None,
    },
    ExampleEntry {
        name: "dirac-comb-full",
        summary: "full point coupling with identity point weight: two rays and one gap",
        params: &[
            ExampleParam { name: "a", default: 0.0 },
            ExampleParam { name: "b", default: 1.0 },
            ExampleParam { name: "d", default: 0.0 },
        ],
        default_window: (-20.0, 20.0),
        build: build_comb_full,
        closed_form: Some(d_comb_full),
        expected_bands: Some(bands_comb_full),
    },
    ExampleEntry {
        name: "alternating-sign-comb",
        summary: "sign-alternating coupling atoms: identically singular, rejected by validation",
        params: &[],
        default_window: (-1.0, 1.0),
        build: build_alternating_comb,
        closed_form: None,
        expected_bands: None,
    },
];

/// The built-in example systems, in presentation order.
pub fn registry() -> &'static [ExampleEntry] {
    &REGISTRY
}

/// Look up a registry entry by name.
pub fn find_example(name: &str) -> Option<&'static ExampleEntry> {
    REGISTRY.iter().find(|e| e.name == name)
}

/// Merge parameter overrides over an entry's defaults; unknown names are
/// rejected with the list of available ones.
pub fn resolve_params(
    entry: &ExampleEntry,
    overrides: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>, String> {
    let mut map: BTreeMap<String, f64> = entry
        .params
        .iter()
        .map(|p| (p.name.to_string(), p.default))
        .collect();
    for (k, v) in overrides {
        if !map.contains_key(k) {
            let available: Vec<&str> = entry.params.iter().map(|p| p.name).collect();
            return Err(if available.is_empty() {
                format!("example `{}` takes no parameters, got `{k}`", entry.name)
            } else {
                format!(
                    "unknown parameter `{k}` for example `{}` (available: {})",
                    entry.name,
                    available.join(", ")
                )
            });
        }
        map.insert(k.clone(), *v);
    }
    Ok(map)
}

/// Result of comparing an example's numeric discriminant to its closed form.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub window: [f64; 2],
    pub samples: usize,
    pub max_error: f64,
}

/// Sample the discriminant of a registry system over its default window and
/// report the worst deviation from the closed form.
pub fn check_example(
    entry: &ExampleEntry,
    params: &BTreeMap<String, f64>,
    samples: usize,
) -> Result<CheckOutcome, Error> {
    let closed = entry.closed_form.ok_or_else(|| {
        Error::Structure(format!(
            "example `{}` has no closed-form discriminant to check against",
            entry.name
        ))
    })?;
    let sys = (entry.build)(params);
    let report = validate_system(&sys);
    if !report.ok {
        return Err(Error::InvalidSystem(render_report(&report)));
    }
    let (lo, hi) = entry.default_window;
    let samples = samples.max(2);
    let mut max_error = 0.0f64;
    for i in 0..samples {
        let lambda = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let d = discriminant(&sys, C64::new(lambda, 0.0))?;
        max_error = max_error.max((d - closed(lambda, params)).norm());
    }
    Ok(CheckOutcome {
        name: entry.name.to_string(),
        window: [lo, hi],
        samples,
        max_error,
    })
}
