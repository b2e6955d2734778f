//! Error and convergence-rate experiments over meshes, final times and
//! filters.
//!
//! Boundary filters are measured on their own boundary regions, the
//! symmetric filter on the interior and the raw DG output on the whole
//! domain; the three are never merged.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use crate::dg::{dg_solve_series, DGField, DgError, Mesh, ProblemId, TestProblem};
use crate::filters::{build_spec, Family, Side};
use crate::par::{self, Execution};
use crate::psiac::{BlendedEvaluator, BoundaryFilter, PsiacError, SymmetricFilter};
use crate::quadrature::GaussLegendre;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("region [{lo}, {hi}] is empty")]
    EmptyRegion { lo: f64, hi: f64 },
    #[error("convergence rate needs positive errors, got {coarse} and {fine}")]
    NonpositiveError { coarse: f64, fine: f64 },
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Psiac(#[from] PsiacError),
    #[error("CSV line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterKind {
    DgRaw,
    Symmetric,
    Rs,
    Srv,
    Rlkv,
    Np0,
}

impl FilterKind {
    pub const ALL: [FilterKind; 6] = [
        FilterKind::DgRaw,
        FilterKind::Symmetric,
        FilterKind::Rs,
        FilterKind::Srv,
        FilterKind::Rlkv,
        FilterKind::Np0,
    ];

    fn boundary_family(self) -> Option<Family> {
        match self {
            FilterKind::Rs => Some(Family::Rs),
            FilterKind::Srv => Some(Family::Srv),
            FilterKind::Rlkv => Some(Family::Rlkv),
            FilterKind::Np0 => Some(Family::Np(0)),
            FilterKind::DgRaw | FilterKind::Symmetric => None,
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterKind::DgRaw => "DG",
            FilterKind::Symmetric => "symmetric",
            FilterKind::Rs => "RS",
            FilterKind::Srv => "SRV",
            FilterKind::Rlkv => "RLKV",
            FilterKind::Np0 => "NP0",
        })
    }
}

impl FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dg" | "raw" | "dg-raw" => Ok(FilterKind::DgRaw),
            "symmetric" | "sym" => Ok(FilterKind::Symmetric),
            "rs" => Ok(FilterKind::Rs),
            "srv" => Ok(FilterKind::Srv),
            "rlkv" => Ok(FilterKind::Rlkv),
            "np0" => Ok(FilterKind::Np0),
            _ => Err(format!("unknown filter `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    LeftBoundary,
    RightBoundary,
    Interior,
    FullDomain,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::LeftBoundary => "left",
            Region::RightBoundary => "right",
            Region::Interior => "interior",
            Region::FullDomain => "full",
        })
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Region::LeftBoundary),
            "right" => Ok(Region::RightBoundary),
            "interior" => Ok(Region::Interior),
            "full" => Ok(Region::FullDomain),
            _ => Err(format!("unknown region `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    L2,
    Linf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L2 => "L2",
            Norm::Linf => "Linf",
        })
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L2" => Ok(Norm::L2),
            "Linf" => Ok(Norm::Linf),
            _ => Err(format!("unknown norm `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub d: usize,
    pub filters: Vec<FilterKind>,
    pub meshes: Vec<usize>,
    pub times: Vec<f64>,
    pub samples_per_element: usize,
    /// Smoothness order of the boundary/interior transition; `None` measures
    /// the boundary polynomials alone.
    pub blend_rho: Option<usize>,
    pub cfl: Option<f64>,
}

impl RunConfig {
    /// The published protocol for one problem: all filters, `N = 20..160`,
    /// 50 final times on `[0, 1]` (TP1), 50 on `[0, 2π]` (TP2) or 30 on
    /// `[0, 2π]` (TP3).
    pub fn standard(problem: ProblemId, d: usize) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let times = match problem {
            ProblemId::Tp1 => uniform_times(50, 1.0),
            ProblemId::Tp2 => uniform_times(50, two_pi),
            ProblemId::Tp3 => uniform_times(30, two_pi),
        };
        RunConfig {
            problem,
            d,
            filters: FilterKind::ALL.to_vec(),
            meshes: vec![20, 40, 80, 160],
            times,
            samples_per_element: 6,
            blend_rho: Some(2),
            cfl: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.d == 0 {
            return bad("degree must be at least 1".into());
        }
        if self.meshes.is_empty() {
            return bad("no mesh sizes".into());
        }
        if self.meshes.contains(&0) {
            return bad("mesh sizes must be positive".into());
        }
        if let Some(w) = self.meshes.windows(2).find(|w| w[1] != 2 * w[0]) {
            return bad(format!("mesh sizes must double: {} then {}", w[0], w[1]));
        }
        if let Some(t) = self.times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return bad(format!("final time {t} must be finite and ≥ 0"));
        }
        if self.samples_per_element == 0 {
            return bad("samples_per_element must be positive".into());
        }
        if self.blend_rho == Some(0) {
            return bad("blend_rho must be at least 1".into());
        }
        Ok(())
    }
}

/// `count` equally spaced times from 0 to `end` inclusive.
pub fn uniform_times(count: usize, end: f64) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![end],
        _ => (0..count)
            .map(|i| end * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordKey {
    pub problem: ProblemId,
    pub d: usize,
    pub filter: FilterKind,
    pub region: Region,
    pub norm: Norm,
    /// Mesh size; for rates, the finer of the two meshes.
    pub n: usize,
    pub t: f64,
}

impl RecordKey {
    fn order(&self, other: &Self) -> std::cmp::Ordering {
        (
            self.problem,
            self.d,
            self.filter,
            self.region,
            self.norm,
            self.n,
        )
            .cmp(&(
                other.problem,
                other.d,
                other.filter,
                other.region,
                other.norm,
                other.n,
            ))
            .then(self.t.total_cmp(&other.t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub key: RecordKey,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRecord {
    pub key: RecordKey,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
}

/// L∞ over `samples + 1` equispaced points per element piece (endpoints
/// included) and L² by 6-point Gauss–Legendre per piece, for the error
/// function `err` on `[lo, hi]`. Pieces are the intersections of the region
/// with mesh elements.
pub fn region_norms<E>(
    err: impl Fn(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    mesh: &Mesh,
    samples: usize,
) -> Result<Norms, HarnessError>
where
    HarnessError: From<E>,
{
    if !(hi > lo) {
        return Err(HarnessError::EmptyRegion { lo, hi });
    }
    let g = GaussLegendre::new(6);
    let h = mesh.h();
    let mut cuts = vec![lo];
    let first = ((lo - mesh.a) / h).floor() as i64 + 1;
    let mut i = first.max(0) as usize;
    while i < mesh.n {
        let x = mesh.node(i);
        if x >= hi - 1e-12 * h {
            break;
        }
        if x > lo + 1e-12 * h {
            cuts.push(x);
        }
        i += 1;
    }
    cuts.push(hi);
    let (mut sq, mut max) = (0.0f64, 0.0f64);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (x, wt) in g.mapped(a, b) {
            let e = err(x)?;
            sq += wt * e * e;
        }
        let start = if a == lo { 0 } else { 1 };
        for j in start..=samples {
            let x = if j == samples {
                b
            } else {
                a + (b - a) * j as f64 / samples as f64
            };
            max = max.max(err(x)?.abs());
        }
    }
    Ok(Norms {
        l2: sq.sqrt(),
        linf: max,
    })
}

impl From<std::convert::Infallible> for HarnessError {
    fn from(e: std::convert::Infallible) -> Self {
        match e {}
    }
}

/// `ln(e_2h / e_h) / ln 2`.
pub fn convergence_rate(e_2h: f64, e_h: f64) -> Result<f64, HarnessError> {
    if !(e_2h > 0.0 && e_h > 0.0) {
        return Err(HarnessError::NonpositiveError {
            coarse: e_2h,
            fine: e_h,
        });
    }
    Ok((e_2h / e_h).ln() / std::f64::consts::LN_2)
}

/// Filters prepared once per run and shared across meshes and times.
struct Prepared {
    symmetric: SymmetricFilter,
    boundary: Vec<(FilterKind, BoundaryFilter, BoundaryFilter)>,
}

impl Prepared {
    fn new(cfg: &RunConfig) -> Result<Self, HarnessError> {
        let sym_spec =
            build_spec(Family::Symmetric, cfg.d, Side::Interior).map_err(PsiacError::from)?;
        let symmetric = SymmetricFilter::from_spec(&sym_spec)?;
        let boundary = cfg
            .filters
            .iter()
            .filter_map(|&k| k.boundary_family().map(|f| (k, f)))
            .map(|(kind, fam)| -> Result<_, HarnessError> {
                let left = build_spec(fam, cfg.d, Side::Left).map_err(PsiacError::from)?;
                let right = build_spec(fam, cfg.d, Side::Right).map_err(PsiacError::from)?;
                Ok((
                    kind,
                    BoundaryFilter::new(&left, cfg.d)?,
                    BoundaryFilter::new(&right, cfg.d)?,
                ))
            })
            .collect::<Result<_, _>>()?;
        Ok(Prepared {
            symmetric,
            boundary,
        })
    }
}

/// Errors of one filter on one field.
fn measure(
    cfg: &RunConfig,
    problem: &TestProblem,
    prep: &Prepared,
    field: &DGField,
    kind: FilterKind,
) -> Result<Vec<ErrorRecord>, HarnessError> {
    let t = field.time;
    let exact = |x: f64| (problem.exact)(x, t);
    let mesh = &field.mesh;
    let s = cfg.samples_per_element;
    let key = |region, norm| RecordKey {
        problem: cfg.problem,
        d: cfg.d,
        filter: kind,
        region,
        norm,
        n: mesh.n,
        t,
    };
    let both = |region, n: Norms| {
        vec![
            ErrorRecord {
                key: key(region, Norm::L2),
                value: n.l2,
            },
            ErrorRecord {
                key: key(region, Norm::Linf),
                value: n.linf,
            },
        ]
    };
    match kind {
        FilterKind::DgRaw => {
            let n = region_norms(
                |x| Ok::<_, HarnessError>(field.eval(x) - exact(x)),
                mesh.a,
                mesh.b,
                mesh,
                s,
            )?;
            Ok(both(Region::FullDomain, n))
        }
        FilterKind::Symmetric => {
            let (lo, hi) = prep.symmetric.region(field);
            let n = region_norms(
                |x| Ok::<_, HarnessError>(prep.symmetric.eval(field, x)? - exact(x)),
                lo,
                hi,
                mesh,
                s,
            )?;
            Ok(both(Region::Interior, n))
        }
        _ => {
            let (_, left, right) = prep
                .boundary
                .iter()
                .find(|(k, _, _)| *k == kind)
                .expect("prepared for every boundary kind");
            let ev = BlendedEvaluator::new(
                field,
                left.apply(field)?,
                right.apply(field)?,
                &prep.symmetric,
                cfg.blend_rho,
            )?;
            let (l_end, r_start) = ev.boundary_extent();
            let f = |x: f64| Ok::<_, HarnessError>(ev.eval(x)? - exact(x));
            let mut out = both(
                Region::LeftBoundary,
                region_norms(f, mesh.a, l_end, mesh, s)?,
            );
            out.extend(both(
                Region::RightBoundary,
                region_norms(f, r_start, mesh.b, mesh, s)?,
            ));
            Ok(out)
        }
    }
}

/// Solves to every final time on every mesh, measures every filter, and
/// derives rates between consecutive meshes. Output is sorted by
/// `(problem, d, filter, region, norm, N, T)` regardless of `exec`.
pub fn time_series_experiment(
    cfg: &RunConfig,
    exec: Execution,
) -> Result<(Vec<ErrorRecord>, Vec<RateRecord>), HarnessError> {
    cfg.validate()?;
    if cfg.filters.is_empty() || cfg.times.is_empty() {
        return Ok((vec![], vec![]));
    }
    let problem = TestProblem::get(cfg.problem);
    let prep = Prepared::new(cfg)?;
    let solves = par::map(
        exec,
        &cfg.meshes,
        |&n| -> Result<Vec<DGField>, HarnessError> {
            let mesh = Mesh::for_problem(&problem, n)?;
            Ok(dg_solve_series(&problem, mesh, cfg.d, &cfg.times, cfg.cfl)?)
        },
    );
    let fields: Vec<Vec<DGField>> = solves.into_iter().collect::<Result<_, _>>()?;

    let mut kinds = cfg.filters.clone();
    kinds.sort();
    kinds.dedup();
    let mut jobs: Vec<(usize, usize, FilterKind)> = Vec::new();
    for m in 0..cfg.meshes.len() {
        for t in 0..cfg.times.len() {
            jobs.extend(kinds.iter().map(|&k| (m, t, k)));
        }
    }
    let measured = par::map(exec, &jobs, |&(m, t, kind)| {
        measure(cfg, &problem, &prep, &fields[m][t], kind)
    });
    let mut errors: Vec<ErrorRecord> = Vec::new();
    for r in measured {
        errors.extend(r?);
    }
    errors.sort_by(|a, b| a.key.order(&b.key));
    errors.dedup_by(|a, b| a.key.order(&b.key).is_eq());
    let rates = rates_from(&errors);
    Ok((errors, rates))
}

/// Rates between every pair of records that differ only in `N → 2N`; pairs
/// with a nonpositive error are skipped.
pub fn rates_from(errors: &[ErrorRecord]) -> Vec<RateRecord> {
    let mut rates = Vec::new();
    for fine in errors {
        let want = |k: &RecordKey| {
            let f = &fine.key;
            2 * k.n == f.n
                && (k.problem, k.d, k.filter, k.region, k.norm)
                    == (f.problem, f.d, f.filter, f.region, f.norm)
                && k.t.to_bits() == f.t.to_bits()
        };
        if let Some(coarse) = errors.iter().find(|c| want(&c.key)) {
            if let Ok(rate) = convergence_rate(coarse.value, fine.value) {
                rates.push(RateRecord {
                    key: fine.key,
                    rate,
                });
            }
        }
    }
    rates.sort_by(|a, b| a.key.order(&b.key));
    rates
}

pub const CSV_HEADER: &str = "problem,d,filter,region,norm,N,T,value,kind";

fn csv_line(key: &RecordKey, value: f64, kind: &str) -> String {
    format!(
        "{},{},{},{},{},{},{:.16e},{:.16e},{}",
        key.problem, key.d, key.filter, key.region, key.norm, key.n, key.t, value, kind
    )
}

pub fn write_csv_to(
    mut w: impl Write,
    errors: &[ErrorRecord],
    rates: &[RateRecord],
) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for e in errors {
        writeln!(w, "{}", csv_line(&e.key, e.value, "error"))?;
    }
    for r in rates {
        writeln!(w, "{}", csv_line(&r.key, r.rate, "rate"))?;
    }
    Ok(())
}

/// Writes (or overwrites) `path` with the long-format table.
pub fn write_csv(
    path: &Path,
    errors: &[ErrorRecord],
    rates: &[RateRecord],
) -> Result<(), HarnessError> {
    let mut buf = Vec::new();
    write_csv_to(&mut buf, errors, rates)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<(Vec<ErrorRecord>, Vec<RateRecord>), HarnessError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut errors = Vec::new();
    let mut rates = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line != CSV_HEADER {
                return Err(HarnessError::Csv {
                    line: 1,
                    msg: "unexpected header".into(),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| HarnessError::Csv { line: lineno, msg };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad(format!("expected 9 fields, got {}", f.len())));
        }
        let key = RecordKey {
            problem: f[0].parse().map_err(bad)?,
            d: f[1].parse().map_err(|e| bad(format!("{e}")))?,
            filter: f[2].parse().map_err(bad)?,
            region: f[3].parse().map_err(bad)?,
            norm: f[4].parse().map_err(bad)?,
            n: f[5].parse().map_err(|e| bad(format!("{e}")))?,
            t: f[6].parse().map_err(|e| bad(format!("{e}")))?,
        };
        let value: f64 = f[7].parse().map_err(|e| bad(format!("{e}")))?;
        match f[8] {
            "error" => errors.push(ErrorRecord { key, value }),
            "rate" => rates.push(RateRecord { key, rate: value }),
            other => return Err(bad(format!("unknown kind `{other}`"))),
        }
    }
    Ok((errors, rates))
}
