use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use spherepd::constructions::IsotropicKernel;
use spherepd::expansion::{
    certify_pd, dimension_walk_along, infinite_limit, synthesize, Axis, Certification,
    LimitOptions, SchoenbergExpansion,
};
use spherepd::interp::{loo_error, residual, solve, InterpolationProblem};
use spherepd::oracle::{
    sample_points, test_dc_strict, test_pd, test_strict, Distinctness, GramVerdict, StrictConfig,
    StrictOutcome, Tolerance,
};
use spherepd::quadrature::{
    analyze, default_node_count, to_check_mode, to_hat_mode, CoefficientGrid, Mode, Provenance,
};
use spherepd::SphereDim;

use crate::error::{CliError, Result};
use crate::formats::{parse_grid, parse_points, parse_problem, write_grid};
use crate::kernels::parse_kernel;

/// Entries this small relative to the largest are shown as 0 by `table`.
const TABLE_ZERO: f64 = 1e-14;

#[derive(Debug, Parser)]
#[command(
    name = "spherepd",
    version,
    about = "Isotropic positive definite kernels on S^m x S^M"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expansion coefficients of a kernel by Gauss quadrature
    Analyze(AnalyzeArgs),
    /// Evaluate a coefficient grid at (t, s)
    Synth(SynthArgs),
    /// Sign test on the coefficients of a grid
    Certify(CertifyArgs),
    /// Smallest eigenvalue of a kernel Gram matrix
    Gram(GramArgs),
    /// Randomized test of strict positive definiteness
    Strict(StrictArgs),
    /// Randomized test of DC-strict positive definiteness
    Dcstrict(StrictArgs),
    /// Move a CHECK grid from S^m to S^(m+2)
    Dimwalk(DimwalkArgs),
    /// Estimate coefficients on S^inf x S^M along even dimensions
    Limit(LimitArgs),
    /// Solve a scattered-data interpolation problem
    Interp(InterpArgs),
    /// Print a coefficient table
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Hat,
    Check,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SourceArg {
    Exact,
    Quadrature,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistinctArg {
    Pairs,
    Componentwise,
}

#[derive(Debug, Args)]
struct KernelArg {
    /// Kernel label, e.g. cm_exp:a=1,b=1
    #[arg(long)]
    kernel: String,
}

#[derive(Debug, Args)]
struct GridSize {
    #[arg(long = "m")]
    m: SphereDim,
    #[arg(long = "M")]
    big_m: SphereDim,
    #[arg(long = "K")]
    k_max: usize,
    #[arg(long = "L")]
    l_max: usize,
    /// Quadrature nodes per axis (default max(K, L) + 16)
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    kernel: KernelArg,
    #[command(flatten)]
    size: GridSize,
    #[arg(long, value_enum, default_value = "check")]
    mode: ModeArg,
    /// Grid file to write; the grid goes to standard output otherwise
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Override the grid's recorded source
    #[arg(long, value_enum)]
    source: Option<SourceArg>,
}

#[derive(Debug, Args)]
struct GramArgs {
    #[command(flatten)]
    kernel: KernelArg,
    #[arg(long = "m", required_unless_present = "points")]
    m: Option<SphereDim>,
    #[arg(long = "M", required_unless_present = "points")]
    big_m: Option<SphereDim>,
    #[arg(long, required_unless_present = "points")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Use tol * n * max|G| as the tolerance
    #[arg(long)]
    scaled: bool,
    #[arg(long, value_enum, default_value = "pairs")]
    distinct: DistinctArg,
    /// Point-set file to use instead of sampling
    #[arg(long, conflicts_with_all = ["m", "big_m", "n"])]
    points: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StrictArgs {
    #[command(flatten)]
    kernel: KernelArg,
    #[arg(long = "m")]
    m: SphereDim,
    #[arg(long = "M")]
    big_m: SphereDim,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args)]
struct DimwalkArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    axis: u8,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[command(flatten)]
    kernel: KernelArg,
    #[arg(long = "M")]
    big_m: SphereDim,
    #[arg(long = "K")]
    k_max: usize,
    #[arg(long = "L")]
    l_max: usize,
    /// Increasing even dimensions for the first sphere
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    ms: Vec<u32>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InterpArgs {
    #[command(flatten)]
    kernel: KernelArg,
    /// Problem file: a point set followed by a `targets:` line
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    reg: f64,
    /// Point-set file of evaluation points
    #[arg(long)]
    eval: Option<PathBuf>,
    /// Also report the leave-one-out error
    #[arg(long)]
    loo: bool,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    kernel: KernelArg,
    #[command(flatten)]
    size: GridSize,
    #[arg(long, value_enum, default_value = "hat")]
    mode: ModeArg,
}

/// What a run produced; nothing is printed until the command has finished.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    text: String,
    negative: bool,
}

impl Report {
    fn new() -> Self {
        Report {
            text: String::new(),
            negative: false,
        }
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.text, "{key}: {value}").expect("writing to a String");
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let mut text = e.render().to_string();
            if code == 2 && !text.starts_with("error:") {
                text = format!("error: missing subcommand or argument\n\n{text}");
            }
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => Outcome {
            code: i32::from(r.negative),
            stdout: r.text,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(command: Command) -> Result<Report> {
    match command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Gram(a) => cmd_gram(a),
        Command::Strict(a) => cmd_strict(a, false),
        Command::Dcstrict(a) => cmd_strict(a, true),
        Command::Dimwalk(a) => cmd_dimwalk(a),
        Command::Limit(a) => cmd_limit(a),
        Command::Interp(a) => cmd_interp(a),
        Command::Table(a) => cmd_table(a),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn kernel(k: &KernelArg) -> Result<IsotropicKernel> {
    parse_kernel(&k.kernel)
}

fn sampled(dim: SphereDim, what: &str) -> Result<SphereDim> {
    if dim.is_finite() {
        Ok(dim)
    } else {
        Err(CliError::Usage(format!(
            "{what} cannot sample points on S^inf"
        )))
    }
}

fn analyzed(
    k: &IsotropicKernel,
    size: &GridSize,
    mode: ModeArg,
) -> Result<(CoefficientGrid, usize)> {
    let nodes = size
        .nodes
        .unwrap_or_else(|| default_node_count(size.k_max, size.l_max));
    let hat = analyze(
        k.as_fn(),
        size.m,
        size.big_m,
        size.k_max,
        size.l_max,
        Some(nodes),
    )?;
    let grid = match mode {
        ModeArg::Hat => hat,
        ModeArg::Check => to_check_mode(&hat)?,
    };
    Ok((grid, nodes))
}

/// Writes a grid to `out`, or appends it to the report.
fn emit_grid(r: &mut Report, g: &CoefficientGrid, out: Option<&Path>) -> Result<()> {
    let text = write_grid(g);
    match out {
        Some(path) => {
            write(path, &text)?;
            r.line("wrote", path.display());
        }
        None => r.text.push_str(&text),
    }
    Ok(())
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Hat => "HAT",
        Mode::Check => "CHECK",
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<Report> {
    let k = kernel(&a.kernel)?;
    let (g, nodes) = analyzed(&k, &a.size, a.mode)?;
    let mut r = Report::new();
    if a.out.is_some() {
        r.line("kernel", k.label());
        r.line("m", a.size.m);
        r.line("M", a.size.big_m);
        r.line("nodes", nodes);
        r.line("mode", mode_name(g.mode()));
        let min = g.values().iter().copied().fold(f64::INFINITY, f64::min);
        r.line("min_coefficient", sci(min));
    }
    emit_grid(&mut r, &g, a.out.as_deref())?;
    Ok(r)
}

fn expansion_from(path: &Path) -> Result<SchoenbergExpansion> {
    let g = parse_grid(&read(path)?)?;
    let g = match g.mode() {
        Mode::Hat => to_check_mode(&g)?,
        Mode::Check => g,
    };
    Ok(SchoenbergExpansion::new(g)?)
}

fn cmd_synth(a: SynthArgs) -> Result<Report> {
    let e = expansion_from(&a.grid)?;
    let mut r = Report::new();
    r.line("value", sci(synthesize(&e, a.t, a.s)?));
    Ok(r)
}

fn cmd_certify(a: CertifyArgs) -> Result<Report> {
    let g = parse_grid(&read(&a.grid)?)?;
    let g = match a.source {
        Some(SourceArg::Exact) => g.with_provenance(Provenance::Exact),
        Some(SourceArg::Quadrature) => g.with_provenance(Provenance::Quadrature),
        None => g,
    };
    let g = match g.mode() {
        Mode::Hat => to_check_mode(&g)?,
        Mode::Check => g,
    };
    let c = certify_pd(&SchoenbergExpansion::new(g)?, a.tol);
    let mut r = Report::new();
    r.line("verdict", c.label());
    match c {
        Certification::PdCertified { clamped } => r.line("clamped", clamped),
        Certification::NotPd { k, l, value } | Certification::Inconclusive { k, l, value } => {
            r.line("witness", format!("k={k} l={l} value={}", sci(value)));
            r.negative = matches!(c, Certification::NotPd { .. });
        }
    }
    Ok(r)
}

fn cmd_gram(a: GramArgs) -> Result<Report> {
    let k = kernel(&a.kernel)?;
    let mode = match a.distinct {
        DistinctArg::Pairs => Distinctness::Pairs,
        DistinctArg::Componentwise => Distinctness::Componentwise,
    };
    let points = match &a.points {
        Some(path) => parse_points(&read(path)?)?,
        None => {
            let (m, big_m, n) = (
                a.m.expect("required"),
                a.big_m.expect("required"),
                a.n.expect("required"),
            );
            sample_points(
                sampled(m, "gram")?,
                sampled(big_m, "gram")?,
                n,
                a.seed,
                mode,
            )?
        }
    };
    let tol = if a.scaled {
        Tolerance::Scaled(a.tol)
    } else {
        Tolerance::Absolute(a.tol)
    };
    let rep = test_pd(k.as_fn(), &points, tol)?;
    let mut r = Report::new();
    r.line("kernel", k.label());
    r.line("m", points.dim_t());
    r.line("M", points.dim_s());
    r.line("n", rep.n);
    match &a.points {
        Some(path) => r.line("points", path.display()),
        None => r.line("seed", a.seed),
    }
    r.line("min_eigenvalue", sci(rep.min_eigenvalue));
    r.line("tolerance", sci(rep.tolerance));
    r.line("symmetry_residual", sci(rep.symmetry_residual));
    r.line("verdict", rep.verdict.label());
    r.negative = rep.verdict == GramVerdict::Indefinite;
    Ok(r)
}

fn cmd_strict(a: StrictArgs, dc: bool) -> Result<Report> {
    let what = if dc { "dcstrict" } else { "strict" };
    let k = kernel(&a.kernel)?;
    let cfg = StrictConfig {
        dim_t: sampled(a.m, what)?,
        dim_s: sampled(a.big_m, what)?,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        tol: a.tol,
    };
    let out = if dc {
        test_dc_strict(k.as_fn(), &cfg)?
    } else {
        test_strict(k.as_fn(), &cfg)?
    };
    let mut r = Report::new();
    r.line("kernel", k.label());
    r.line("claimed_status", k.status().label());
    r.line("m", a.m);
    r.line("M", a.big_m);
    r.line("n", a.n);
    r.line("trials", a.trials);
    r.line("seed", a.seed);
    r.line("tolerance", sci(a.tol));
    match out {
        StrictOutcome::Pass { min_eigenvalue } => {
            r.line("min_eigenvalue", sci(min_eigenvalue));
            r.line("verdict", "PASS");
        }
        StrictOutcome::Fail {
            seed,
            min_eigenvalue,
        } => {
            r.line("min_eigenvalue", sci(min_eigenvalue));
            if let Some(s) = seed {
                r.line("failing_seed", s);
            }
            r.line("verdict", "FAIL");
            r.negative = true;
        }
    }
    Ok(r)
}

fn cmd_dimwalk(a: DimwalkArgs) -> Result<Report> {
    let mut e = expansion_from(&a.grid)?;
    let axis = if a.axis == 1 {
        Axis::First
    } else {
        Axis::Second
    };
    for _ in 0..a.steps {
        e = dimension_walk_along(&e, axis)?;
    }
    let g = e.into_grid();
    let g = match parse_grid(&read(&a.grid)?)?.mode() {
        Mode::Hat => to_hat_mode(&g)?,
        Mode::Check => g,
    };
    let mut r = Report::new();
    if a.out.is_some() {
        r.line("m", g.dim_t());
        r.line("M", g.dim_s());
        r.line("K", g.k_max());
        r.line("L", g.l_max());
    }
    emit_grid(&mut r, &g, a.out.as_deref())?;
    Ok(r)
}

fn cmd_limit(a: LimitArgs) -> Result<Report> {
    let k = kernel(&a.kernel)?;
    let options = LimitOptions {
        n_nodes: a.nodes,
        warn_threshold: a.threshold,
    };
    let est = infinite_limit(k.as_fn(), a.big_m, a.k_max, a.l_max, &a.ms, options)?;
    let mut r = Report::new();
    r.line("kernel", k.label());
    r.line("M", a.big_m);
    r.line(
        "dimensions",
        a.ms.iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    for (w, inc) in a.ms.windows(2).zip(&est.step_increments) {
        r.line(&format!("increment {}->{}", w[0], w[1]), sci(*inc));
    }
    r.line("max_increment", sci(est.max_increment));
    if est.exceeded {
        r.line(
            "warning",
            format!(
                "last increment above {} (coefficients have not settled)",
                sci(a.threshold)
            ),
        );
    }
    emit_grid(&mut r, &est.grid, a.out.as_deref())?;
    Ok(r)
}

fn cmd_interp(a: InterpArgs) -> Result<Report> {
    let k = kernel(&a.kernel)?;
    let (nodes, targets) = parse_problem(&read(&a.problem)?)?;
    let p = InterpolationProblem::new(nodes, targets, k)?;
    let s = solve(&p, a.reg)?;
    let mut r = Report::new();
    r.line("kernel", p.kernel().label());
    r.line("n", p.len());
    r.line("regularization", sci(s.regularization()));
    r.line("condition_estimate", sci(s.condition_estimate()));
    r.line("residual", sci(residual(&p, &s)?));
    let coeffs: Vec<String> = s.coefficients().iter().map(|&v| sci(v)).collect();
    r.line("coefficients", coeffs.join(","));
    if let Some(path) = &a.eval {
        let pts = parse_points(&read(path)?)?;
        let vals = pts
            .xs()
            .iter()
            .zip(pts.zs())
            .map(|(x, z)| s.evaluate(x, z).map(sci))
            .collect::<spherepd::Result<Vec<_>>>()?;
        r.line("evaluations", vals.join(","));
    }
    if a.loo {
        r.line("loo_error", sci(loo_error(&p)?));
    }
    Ok(r)
}

fn cmd_table(a: TableArgs) -> Result<Report> {
    let k = kernel(&a.kernel)?;
    let (g, _) = analyzed(&k, &a.size, a.mode)?;
    let mut r = Report::new();
    writeln!(
        r.text,
        "# {} {} m={} M={}",
        k.label(),
        mode_name(g.mode()),
        g.dim_t(),
        g.dim_s()
    )
    .expect("writing to a String");
    r.text.push_str(&format_table(&g));
    Ok(r)
}

/// Fixed-width table with 6 significant digits, rows `k` and columns `l`.
pub fn format_table(g: &CoefficientGrid) -> String {
    const W: usize = 13;
    let scale = g
        .values()
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut out = format!("{:>4}", "k\\l");
    for l in 0..=g.l_max() {
        write!(out, "{l:>W$}").expect("writing to a String");
    }
    out.push('\n');
    for k in 0..=g.k_max() {
        write!(out, "{k:>4}").expect("writing to a String");
        for l in 0..=g.l_max() {
            let v = g.get(k, l);
            let cell = if v.abs() <= TABLE_ZERO * scale {
                "0".to_string()
            } else {
                format!("{v:.5e}")
            };
            write!(out, "{cell:>W$}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}
