//! `psiac`: build boundary filters, solve, filter and run error studies from
//! the command line. Every command writes CSV.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad usage or configuration.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use psiac::dg::{dg_solve, DGField, Mesh, ProblemId, TestProblem};
use psiac::filters::{
    build_spec, shifted_coefficient_polynomials, static_coefficients, Family, FilterSpec, Side,
};
use psiac::harness::{time_series_experiment, write_csv_to, ErrorRecord, RateRecord, RunConfig};
use psiac::par::Execution;
use psiac::psiac::{
    filter_boundary, BlendedEvaluator, BoundaryFilter, ExactField, SymmetricFilter,
};
use psiac::Rational;

use config::{ConfigFile, Times};

#[derive(Debug, Parser)]
#[command(
    name = "psiac",
    version,
    about = "Position-dependent SIAC boundary filters for 1D DG output"
)]
struct Cli {
    /// Directory for output files when `--out` is not given; without either,
    /// output goes to stdout.
    #[arg(long, global = true, env = "PSIAC_OUT_DIR", value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel coefficients (exact, as p/q) or a sampled kernel graph.
    Kernel(KernelArgs),
    /// Run the DG solver and dump the field and its pointwise error.
    Solve(SolveArgs),
    /// Solve, then filter: boundary polynomials and the filtered curve.
    Filter(FilterArgs),
    /// Errors and rates at one final time over a mesh ladder.
    Converge(ConvergeArgs),
    /// Errors and rates over a series of final times, from a config file.
    Timeseries(TimeseriesArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("mode").args(["exact", "samples"]))]
struct KernelArgs {
    /// symmetric, RS, SRV, RLKV or NP<k>
    family: Family,
    /// DG degree the kernel is built for
    d: usize,
    /// left, right or interior
    side: Side,
    /// Exact coefficients (the default).
    #[arg(long)]
    exact: bool,
    /// Sample the kernel graph at this many points instead.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Knot shift in mesh units, decimal or p/q. Without it, boundary
    /// kernels give coefficient polynomials (exact) or the kernel at the
    /// boundary point (samples).
    #[arg(long, value_name = "XI", allow_hyphen_values = true)]
    shift: Option<Rational>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// tp1, tp2 or tp3
    #[arg(long)]
    problem: ProblemId,
    /// DG polynomial degree
    #[arg(long, short = 'd')]
    degree: usize,
    /// Number of elements
    #[arg(long, short = 'n')]
    elements: usize,
    /// Final time
    #[arg(long, short = 't', default_value_t = 1.0)]
    time: f64,
    /// Courant number; defaults to 0.1/(2d+1)
    #[arg(long)]
    cfl: Option<f64>,
    /// Curve samples per element
    #[arg(long, default_value_t = 6)]
    samples_per_element: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Sampled curve (x, u, exact, error)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Element coefficients (element, basis, coefficient)
    #[arg(long, value_name = "PATH")]
    coeffs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Boundary family used at both ends, or `symmetric` for the interior only
    #[arg(long, default_value = "NP0")]
    family: Family,
    /// Smoothness of the boundary/interior transition; 0 switches blending off
    #[arg(long, default_value_t = 2)]
    blend_rho: usize,
    /// Sampled curve (x, value, exact_solution, abs_error)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Boundary polynomial coefficients, float and exact
    #[arg(long, value_name = "PATH")]
    coeffs: Option<PathBuf>,
}

/// Flags shared by the experiment commands; each overrides the matching
/// config entry.
#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated DG degrees
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
    /// Comma-separated filters: DG, symmetric, RS, SRV, RLKV, NP0
    #[arg(long, value_delimiter = ',')]
    filters: Option<Vec<String>>,
    /// Comma-separated element counts, each double the last
    #[arg(long, value_delimiter = ',')]
    meshes: Option<Vec<usize>>,
    /// Comma-separated final times
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["time_count", "time_end"])]
    times: Option<Vec<f64>>,
    /// Number of equally spaced final times from 0
    #[arg(long, requires = "time_end")]
    time_count: Option<usize>,
    #[arg(long, requires = "time_count")]
    time_end: Option<f64>,
    #[arg(long)]
    samples_per_element: Option<usize>,
    /// 0 switches blending off
    #[arg(long)]
    blend_rho: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Run on one thread
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> ConfigFile {
        let times = match (&self.times, self.time_count, self.time_end) {
            (Some(t), _, _) => Some(Times::List(t.clone())),
            (None, Some(count), Some(end)) => {
                Some(Times::Uniform(config::UniformTimes { count, end }))
            }
            _ => None,
        };
        ConfigFile {
            problem: self.problem.clone(),
            degrees: self.degrees.clone(),
            filters: self.filters.clone(),
            meshes: self.meshes.clone(),
            times,
            samples_per_element: self.samples_per_element,
            blend_rho: self.blend_rho,
            cfl: self.cfl,
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct TimeseriesArgs {
    /// TOML experiment description
    config: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli.out_dir.as_deref();
    let result = match &cli.command {
        Command::Kernel(a) => kernel(a, out_dir),
        Command::Solve(a) => solve(a, out_dir),
        Command::Filter(a) => filter(a, out_dir),
        Command::Converge(a) => converge(a, out_dir),
        Command::Timeseries(a) => timeseries(a, out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        // A reader that stops early (`| head`) is not a failure.
        Err(Failure::Runtime(e))
            if e.downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `--out` wins, then `out_dir/default_name`, then stdout.
fn sink(
    out: Option<&Path>,
    out_dir: Option<&Path>,
    default_name: &str,
) -> Result<Box<dyn Write>, Failure> {
    let path = match (out, out_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.join(default_name)
        }
        (None, None) => return Ok(Box::new(io::stdout().lock())),
    };
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    eprintln!("writing {}", path.display());
    Ok(Box::new(BufWriter::new(f)))
}

fn kernel(a: &KernelArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let spec = build_spec(a.family, a.d, a.side).map_err(usage)?;
    if let Some(n) = a.samples {
        if n < 2 {
            return Err(usage(anyhow!("--samples needs at least 2 points")));
        }
    }
    let name = format!("kernel_{}_d{}_{:?}.csv", a.family, a.d, a.side).to_lowercase();
    let mut w = sink(a.out.as_deref(), out_dir, &name)?;

    let boundary = a.side != Side::Interior;
    if let Some(n) = a.samples {
        let shift = match (&a.shift, a.side) {
            (Some(xi), _) => xi.clone(),
            (None, Side::Left) => -spec.knots().last().clone(),
            (None, Side::Right) => -spec.knots().first().clone(),
            (None, Side::Interior) => Rational::zero(),
        };
        let shifted = spec.shifted(&shift);
        let c = static_coefficients(&shifted).context("solving for the kernel coefficients")?;
        let k = shifted.kernel(&c).to_f64();
        let (lo, hi) = k.support();
        writeln!(w, "x,value")?;
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            writeln!(w, "{x},{}", k.eval(x))?;
        }
    } else if boundary && a.shift.is_none() {
        let cp = shifted_coefficient_polynomials(&spec)
            .context("solving for the kernel coefficients")?;
        let polys = cp.polynomials();
        let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(1);
        let header: Vec<String> = (0..width).map(|m| format!("xi{m}")).collect();
        writeln!(w, "j,{}", header.join(","))?;
        for (j, p) in polys.iter().enumerate() {
            let row: Vec<String> = (0..width).map(|m| p.coeff(m).to_string()).collect();
            writeln!(w, "{j},{}", row.join(","))?;
        }
    } else {
        let shifted = a
            .shift
            .as_ref()
            .map_or_else(|| spec.clone(), |xi| spec.shifted(xi));
        let c = static_coefficients(&shifted).context("solving for the kernel coefficients")?;
        writeln!(w, "j,coefficient")?;
        for (j, cj) in c.iter().enumerate() {
            writeln!(w, "{j},{cj}")?;
        }
    }
    w.flush()?;
    Ok(())
}

impl FieldArgs {
    fn check(&self) -> Result<(), Failure> {
        if self.degree == 0 || self.elements == 0 || self.samples_per_element == 0 {
            return Err(usage(anyhow!(
                "degree, elements and samples-per-element must be positive"
            )));
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(usage(anyhow!("final time must be finite and ≥ 0")));
        }
        if let Some(c) = self.cfl {
            if !(c.is_finite() && c > 0.0) {
                return Err(usage(anyhow!("cfl must be positive")));
            }
        }
        Ok(())
    }

    fn solve(&self) -> Result<(TestProblem, DGField), Failure> {
        let p = TestProblem::get(self.problem);
        let mesh = Mesh::for_problem(&p, self.elements).context("building the mesh")?;
        let field = dg_solve(&p, mesh, self.degree, self.time, self.cfl).context("solving")?;
        Ok((p, field))
    }

    fn stem(&self) -> String {
        format!("{}_d{}_n{}", self.problem, self.degree, self.elements)
    }

    /// Midpoints of `samples_per_element` equal slices of each element.
    fn sample_points(&self, mesh: &Mesh, lo: f64, hi: f64) -> Vec<f64> {
        let s = self.samples_per_element;
        (0..mesh.n)
            .flat_map(|e| {
                (0..s).map(move |i| mesh.node(e) + mesh.h() * (i as f64 + 0.5) / s as f64)
            })
            .filter(|&x| x >= lo && x <= hi)
            .collect()
    }
}

fn solve(a: &SolveArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    a.field.check()?;
    let (p, field) = a.field.solve()?;
    let stem = a.field.stem();
    let to_stdout = a.out.is_none() && a.coeffs.is_none() && out_dir.is_none();

    let mut w = sink(a.coeffs.as_deref(), out_dir, &format!("{stem}_coeffs.csv"))?;
    writeln!(w, "element,basis,coefficient")?;
    for e in 0..field.mesh.n {
        for (l, c) in field.element(e).iter().enumerate() {
            writeln!(w, "{e},{l},{c}")?;
        }
    }
    w.flush()?;
    drop(w);
    if to_stdout {
        println!();
    }

    let mut w = sink(a.out.as_deref(), out_dir, &format!("{stem}_curve.csv"))?;
    writeln!(w, "x,u,exact,error")?;
    for x in a.field.sample_points(&field.mesh, p.a, p.b) {
        let (u, ex) = (field.eval(x), (p.exact)(x, field.time));
        writeln!(w, "{x},{u},{ex},{}", u - ex)?;
    }
    w.flush()?;
    Ok(())
}

/// The filter applied once more in exact arithmetic to the (exactly
/// representable) floating-point DG data.
fn exact_boundary_coefficients(
    field: &DGField,
    spec: &FilterSpec,
) -> anyhow::Result<Vec<Rational>> {
    let bern = field.to_bernstein();
    let exact = |v: f64| Rational::from_f64(v).ok_or_else(|| anyhow!("non-finite value {v}"));
    let coeffs = bern
        .coeffs
        .iter()
        .map(|&c| exact(c))
        .collect::<anyhow::Result<_>>()?;
    let ef = ExactField::from_bernstein(
        exact(field.mesh.a)?,
        exact(field.mesh.h())?,
        field.mesh.n,
        field.d,
        coeffs,
    );
    let bf = BoundaryFilter::new(spec, field.d)?;
    Ok(bf.apply_exact(&ef)?.in_z.coeffs().to_vec())
}

fn filter(a: &FilterArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    a.field.check()?;
    let d = a.field.degree;
    let sym_spec = build_spec(Family::Symmetric, d, Side::Interior).map_err(usage)?;
    let boundary_specs = match a.family {
        Family::Symmetric => None,
        fam => Some((
            build_spec(fam, d, Side::Left).map_err(usage)?,
            build_spec(fam, d, Side::Right).map_err(usage)?,
        )),
    };
    let (p, field) = a.field.solve()?;
    let sym = SymmetricFilter::from_spec(&sym_spec).context("building the symmetric filter")?;
    let stem = format!("{}_{}", a.field.stem(), a.family).to_lowercase();
    let to_stdout = a.out.is_none() && a.coeffs.is_none() && out_dir.is_none();
    let exact_at = |x: f64| (p.exact)(x, field.time);

    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut w = sink(a.coeffs.as_deref(), out_dir, &format!("{stem}_coeffs.csv"))?;
    writeln!(
        w,
        "side,k,x0,h,z_coefficient,physical_coefficient,exact_z_coefficient"
    )?;
    match &boundary_specs {
        None => {
            let (lo, hi) = sym.region(&field);
            for x in a.field.sample_points(&field.mesh, lo, hi) {
                rows.push((x, sym.eval(&field, x).context("interior filter")?));
            }
        }
        Some((ls, rs)) => {
            let left = filter_boundary(&field, ls).context("left boundary filter")?;
            let right = filter_boundary(&field, rs).context("right boundary filter")?;
            for (name, poly, spec) in [("left", &left, ls), ("right", &right, rs)] {
                let exact = exact_boundary_coefficients(&field, spec)?;
                for (k, (z, phys)) in poly
                    .coeffs
                    .iter()
                    .zip(poly.physical_coefficients())
                    .enumerate()
                {
                    let ex = exact.get(k).cloned().unwrap_or_else(Rational::zero);
                    writeln!(w, "{name},{k},{},{},{z},{phys},{ex}", poly.x0, poly.h)?;
                }
            }
            let rho = (a.blend_rho > 0).then_some(a.blend_rho);
            let ev = BlendedEvaluator::new(&field, left, right, &sym, rho)
                .context("assembling the filtered output")?;
            for x in a.field.sample_points(&field.mesh, p.a, p.b) {
                rows.push((x, ev.eval(x).context("filtered output")?));
            }
        }
    }
    w.flush()?;
    drop(w);
    if to_stdout {
        println!();
    }

    let mut w = sink(a.out.as_deref(), out_dir, &format!("{stem}_curve.csv"))?;
    writeln!(w, "x,value,exact_solution,abs_error")?;
    for (x, v) in rows {
        let ex = exact_at(x);
        writeln!(w, "{x},{v},{ex},{}", (v - ex).abs())?;
    }
    w.flush()?;
    Ok(())
}

fn run_all(
    cfgs: &[RunConfig],
    exec: Execution,
) -> anyhow::Result<(Vec<ErrorRecord>, Vec<RateRecord>)> {
    let (mut errors, mut rates) = (Vec::new(), Vec::new());
    for cfg in cfgs {
        let (e, r) =
            time_series_experiment(cfg, exec).with_context(|| format!("degree {}", cfg.d))?;
        errors.extend(e);
        rates.extend(r);
    }
    Ok((errors, rates))
}

fn write_results(
    cfgs: &[RunConfig],
    run: &RunArgs,
    out_dir: Option<&Path>,
    what: &str,
) -> Result<(), Failure> {
    let (errors, rates) = run_all(cfgs, run.execution())?;
    let name = format!("{}_{what}.csv", cfgs[0].problem);
    let mut w = sink(run.out.as_deref(), out_dir, &name)?;
    write_csv_to(&mut w, &errors, &rates)?;
    w.flush()?;
    Ok(())
}

fn converge(a: &ConvergeArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let mut over = a.run.overrides();
    if over.times.is_none() {
        // The end of the standard time range.
        let problem: ProblemId = over
            .problem
            .as_deref()
            .ok_or_else(|| usage(anyhow!("--problem is required")))?
            .parse()
            .map_err(|e: String| usage(anyhow!(e)))?;
        let end = *RunConfig::standard(problem, 1)
            .times
            .last()
            .expect("standard times are non-empty");
        over.times = Some(Times::List(vec![end]));
    }
    let cfgs = over.run_configs().map_err(usage)?;
    write_results(&cfgs, &a.run, out_dir, "converge")
}

fn timeseries(a: &TimeseriesArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let file = ConfigFile::load(&a.config).map_err(usage)?;
    let cfgs = file
        .merged(a.run.overrides())
        .run_configs()
        .map_err(usage)?;
    write_results(&cfgs, &a.run, out_dir, "timeseries")
}
