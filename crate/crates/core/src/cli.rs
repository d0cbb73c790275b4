//! The `fpplab` command line.
//!
//! Exit codes: 0 on success, 1 when a verification finds a violation, 2 on
//! configuration or input errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::averaging::{verify_averaging_properties, ClassOrder};
use crate::distributions::{classify_nearly_gamma, Bump, Distribution, GridSpec, Kind};
use crate::error::{Error, Result};
use crate::experiments::{
    run_study, svg_line_chart, to_json, ExperimentConfig, ExperimentReport, InfluenceOptions, MPolicy, ScalingRow,
    Series, Study, TailRow, TimeConstantReport,
};
use crate::funcineq::{random_suite, SuiteConfig};
use crate::quadrature::{integrate_pieces, QuadOptions};

#[derive(Debug, Parser)]
#[command(
    name = "fpplab",
    version,
    about = "First passage percolation concentration laboratory"
)]
#[command(args_override_self = true, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo experiment on lattice first passage percolation
    Simulate(SimulateArgs),
    /// Check the modified Poincaré and entropy bounds on random product tables
    VerifyIneq(VerifyIneqArgs),
    /// Classify an edge law as nearly gamma
    Classify(ClassifyArgs),
    /// Exhaustively check the averaging map g_m
    GmCheck(GmCheckArgs),
    /// Check the truncated law nu_k against its base law
    TruncateCheck(TruncateCheckArgs),
    /// Summarise, chart or re-run a saved experiment report
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Scaling,
    Tails,
    Influence,
    TimeConstant,
    Geodesics,
    Truncation,
    Energy,
    Margin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Edge law, e.g. exp:rate=1 or bernoulli:a=1,b=2,p=0.5
    #[arg(long, default_value = "exp:rate=1")]
    pub dist: String,
    /// Lattice dimension (2 or 3)
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Comma-separated distances n; the target is n * direction
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
    pub n: Vec<u64>,
    /// Comma-separated direction vector (default e1)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<i64>>,
    /// Independent weight fields per n
    #[arg(long, default_value_t = 2000)]
    pub replicas: usize,
    /// Master seed; every output is a function of it
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Averaging parameter: off, quarter (ceil(n^(1/4))) or a fixed integer
    #[arg(long, default_value = "quarter")]
    pub m: String,
    /// Box margin per side as a multiple of n
    #[arg(long, default_value_t = 0.5)]
    pub margin: f64,
    /// Which study to run
    #[arg(long, value_enum, default_value = "scaling")]
    pub experiment: ExperimentKind,
    /// Distance used by tails, influence, truncation and margin (default: largest n)
    #[arg(long)]
    pub at: Option<u64>,
    /// Truncation level k
    #[arg(long, default_value_t = 100)]
    pub k: u64,
    /// Truncation constant C5 (default 4 dim / delta)
    #[arg(long)]
    pub c5: Option<f64>,
    /// delta in the default C5 = 4 dim / delta
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Bump density: hat, quartic or hat:<lo>:<hi>
    #[arg(long, default_value = "hat")]
    pub bump: String,
    /// Ball sizes m for the geodesic ball counts
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub ball_m: Vec<usize>,
    /// Replicas on which every edge influence W_e is computed
    #[arg(long, default_value_t = 200)]
    pub w_replicas: usize,
    /// C in A_CD = 4 C E(F) + D (1 + 2/C)
    #[arg(long, default_value_t = 1.0)]
    pub acd_c: f64,
    /// D in A_CD = 4 C E(F) + D (1 + 2/C)
    #[arg(long, default_value_t = 1.0)]
    pub acd_d: f64,
    /// Output directory (default: JSON on stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv adds <experiment>.csv next to the JSON report (scaling only)
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write an SVG chart (scaling, tails, time-constant)
    #[arg(long)]
    pub svg: bool,
    /// Record wall time per row (outputs are then no longer reproducible)
    #[arg(long)]
    pub timings: bool,
    /// Worker threads (capped by FPPLAB_WORKERS)
    #[arg(long)]
    pub workers: Option<usize>,
    /// key=value file of default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyIneqArgs {
    /// Coordinate count, either N or a range A-B
    #[arg(long, default_value = "2-12")]
    pub n: String,
    /// Comma-separated Bernoulli parameters p_i are drawn from
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    pub p: Vec<f64>,
    /// Number of random tables
    #[arg(long, default_value_t = 1000)]
    pub tables: usize,
    /// Master seed; every output is a function of it
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file of default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Edge law, e.g. gamma:a=1,b=1
    #[arg(long)]
    pub dist: String,
    /// Grid density for the sufficient-condition checks
    #[arg(long, default_value_t = 200)]
    pub points_per_decade: usize,
    /// Closest grid point to a finite support endpoint
    #[arg(long, default_value_t = 1e-12)]
    pub endpoint_floor: f64,
    /// Factor applied to the grid supremum to report A
    #[arg(long, default_value_t = 1.05)]
    pub safety_factor: f64,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file of default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Descending,
    Ascending,
}

#[derive(Debug, Args)]
pub struct GmCheckArgs {
    /// Averaging parameter m (exhaustive check for m <= 4)
    #[arg(long)]
    pub m: usize,
    /// Lexicographic direction inside each weight class
    #[arg(long, value_enum, default_value = "descending")]
    pub order: OrderArg,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file of default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruncateCheckArgs {
    /// Base law
    #[arg(long, default_value = "exp:rate=1")]
    pub dist: String,
    /// Truncation level k
    #[arg(long, default_value_t = 100)]
    pub k: u64,
    /// Truncation constant C5 (default 4 dim / delta)
    #[arg(long)]
    pub c5: Option<f64>,
    /// Lattice dimension entering the default C5
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// delta in the default C5 = 4 dim / delta
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Bump density: hat, quartic or hat:<lo>:<hi>
    #[arg(long, default_value = "hat")]
    pub bump: String,
    /// Grid size for the comparisons
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file of default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON report written by `simulate`
    #[arg(long)]
    pub input: PathBuf,
    /// Re-run the embedded configuration and compare byte for byte
    #[arg(long)]
    pub rerun: bool,
    /// Write an SVG chart here
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Summary file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (capped by FPPLAB_WORKERS)
    #[arg(long)]
    pub workers: Option<usize>,
    /// key=value file of default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flags that take no value; `key = true` in a config file turns them on.
const SWITCHES: [&str; 3] = ["svg", "timings", "rerun"];

/// Inserts the flags of a `--config` file right after the subcommand, so that
/// flags given on the command line override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let path = match pos {
        Some(i) => args
            .get(i + 1)
            .ok_or_else(|| Error::Config("--config needs a file".into()))?,
        None => match args
            .iter()
            .find_map(|a| a.to_str()?.strip_prefix("--config=").map(OsString::from))
        {
            Some(p) => return expand_with(args.clone(), Path::new(&p)),
            None => return Ok(args),
        },
    };
    let path = PathBuf::from(path);
    expand_with(args, &path)
}

fn expand_with(args: Vec<OsString>, path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" => extra.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(Error::Config(format!("{key} must be true or false"))),
            }
        } else {
            extra.push(OsString::from(format!("--{key}")));
            extra.push(OsString::from(value));
        }
    }
    let mut out = args;
    let at = 2.min(out.len());
    out.splice(at..at, extra);
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("violation: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Help text of a subcommand, as printed by `fpplab <name> --help`.
pub fn help_text(subcommand: &str) -> Option<String> {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = cmd.find_subcommand_mut(subcommand)?;
    Some(sub.render_help().to_string())
}

enum Outcome {
    Pass,
    Violation(String),
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: C,
    result: R,
}

fn envelope<C: Serialize, R: Serialize>(command: &str, config: C, result: R) -> Result<String> {
    to_json(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        result,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) | Error::Io(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn parse_dist(raw: &str) -> Result<Distribution> {
    raw.parse().map_err(config_err)
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::VerifyIneq(a) => verify_ineq(a),
        Command::Classify(a) => classify(a),
        Command::GmCheck(a) => gm_check(a),
        Command::TruncateCheck(a) => truncate_check(a),
        Command::Report(a) => report(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    let dist = parse_dist(&a.dist)?;
    let mut cfg = ExperimentConfig::new(dist, a.dim, a.n.clone(), a.replicas, a.seed);
    if let Some(d) = a.direction {
        cfg.direction = d;
    }
    cfg.m_policy = a.m.parse::<MPolicy>()?;
    cfg.margin_factor = a.margin;
    cfg.timings = a.timings;
    cfg.workers = a.workers;
    let at = a.at.or_else(|| a.n.iter().copied().max()).unwrap_or(1);
    let c5 = a.c5.unwrap_or(4.0 * a.dim as f64 / a.delta);
    let study = match a.experiment {
        ExperimentKind::Scaling => Study::Scaling,
        ExperimentKind::Tails => Study::Tails { n: at },
        ExperimentKind::Influence => Study::Influence {
            n: at,
            options: InfluenceOptions {
                w_replicas: a.w_replicas,
                acd_c: a.acd_c,
                acd_d: a.acd_d,
            },
        },
        ExperimentKind::TimeConstant => Study::TimeConstant,
        ExperimentKind::Geodesics => Study::Geodesics { ball_ms: a.ball_m },
        ExperimentKind::Truncation => Study::Truncation {
            n: at,
            k: a.k,
            c5,
            bump: a.bump.parse::<Bump>().map_err(config_err)?,
        },
        ExperimentKind::Energy => Study::Energy,
        ExperimentKind::Margin => Study::Margin { n: at },
    };
    if a.format == Format::Csv && study != Study::Scaling {
        return Err(Error::Config(
            "csv output exists for the scaling experiment only".into(),
        ));
    }
    cfg.validate()?;
    let output = run_study(&cfg, &study)?;
    let json = to_json(&output.report)?;
    match &a.out {
        None => print!("{json}"),
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let name = study.name();
            fs::write(dir.join(format!("{name}.json")), &json)?;
            if a.format == Format::Csv {
                let csv = output.csv().expect("scaling produces rows");
                fs::write(dir.join(format!("{name}.csv")), csv)?;
            }
            if a.svg {
                let svg = chart(&output.report)?
                    .ok_or_else(|| Error::Config(format!("no chart for the {name} experiment")))?;
                fs::write(dir.join(format!("{name}.svg")), svg)?;
            }
        }
    }
    Ok(Outcome::Pass)
}

fn parse_n_range(raw: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("--n must be N or A-B, got {raw:?}"));
    match raw.split_once('-') {
        Some((a, b)) => Ok((
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )),
        None => {
            let n = raw.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn verify_ineq(a: VerifyIneqArgs) -> Result<Outcome> {
    let (n_min, n_max) = parse_n_range(&a.n)?;
    let cfg = SuiteConfig {
        tables: a.tables,
        n_min,
        n_max,
        p_choices: a.p,
        seed: a.seed,
    };
    let summary = random_suite(&cfg).map_err(config_err)?;
    emit(&a.out, &envelope("verify-ineq", &cfg, &summary)?)?;
    Ok(if summary.all_pass {
        Outcome::Pass
    } else {
        Outcome::Violation(format!(
            "violations: modified Poincaré {}, entropy bound {}, energy {}, Jensen {}, increment sum {}, oracle {}",
            summary.modified_poincare_violations,
            summary.fs_violations,
            summary.energy_violations,
            summary.jensen_violations,
            summary.increment_sum_violations,
            summary.oracle_mismatches
        ))
    })
}

#[derive(Serialize)]
struct ClassifyConfig<'a> {
    dist: &'a Distribution,
    grid: GridSpec,
}

fn classify(a: ClassifyArgs) -> Result<Outcome> {
    let dist = parse_dist(&a.dist)?;
    let grid = GridSpec {
        points_per_decade: a.points_per_decade,
        endpoint_floor: a.endpoint_floor,
        safety_factor: a.safety_factor,
        ..GridSpec::default()
    };
    let verdict = classify_nearly_gamma(&dist, &grid).map_err(config_err)?;
    emit(
        &a.out,
        &envelope("classify", ClassifyConfig { dist: &dist, grid }, &verdict)?,
    )?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct GmConfig {
    m: usize,
    order: ClassOrder,
}

fn gm_check(a: GmCheckArgs) -> Result<Outcome> {
    let order = match a.order {
        OrderArg::Descending => ClassOrder::Descending,
        OrderArg::Ascending => ClassOrder::Ascending,
    };
    let report = verify_averaging_properties(a.m, order).map_err(config_err)?;
    emit(&a.out, &envelope("gm-check", GmConfig { m: a.m, order }, &report)?)?;
    Ok(if report.gradient_holds && report.within_4_over_m {
        Outcome::Pass
    } else {
        Outcome::Violation(format!(
            "{} gradient violations, largest level measure {}",
            report.gradient_violations, report.max_level_measure
        ))
    })
}

#[derive(Debug, Serialize)]
struct TruncationCheck {
    threshold: f64,
    cutoff: f64,
    repatriated_mass: f64,
    /// `1 - H_k(cutoff)`.
    mass_beyond_cutoff: f64,
    /// `max |H_k - H|` on `[0, threshold]`.
    max_gap_below_threshold: f64,
    /// `min (H_k - H)` on `[0, 1.1 cutoff]`.
    min_domination_gap: f64,
    /// Quadrature of the density over the support.
    total_mass: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TruncateConfig<'a> {
    base: &'a Distribution,
    k: u64,
    c5: f64,
    bump: Bump,
    grid: usize,
}

fn truncate_check(a: TruncateCheckArgs) -> Result<Outcome> {
    let base = parse_dist(&a.dist)?;
    let c5 = a.c5.unwrap_or(4.0 * a.dim as f64 / a.delta);
    let bump: Bump = a.bump.parse().map_err(config_err)?;
    if a.grid < 2 {
        return Err(Error::Config("--grid needs at least 2 points".into()));
    }
    let trunc = Distribution::truncate(&base, a.k, c5, bump).map_err(config_err)?;
    let Kind::Truncated(t) = trunc.kind() else {
        unreachable!("truncate returns a truncated law")
    };
    let (threshold, cutoff) = (t.threshold(), t.cutoff());
    let grid = |top: f64| (0..a.grid).map(move |i| top * i as f64 / (a.grid - 1) as f64);
    let max_gap_below_threshold = grid(threshold)
        .map(|x| (trunc.cdf(x) - base.cdf(x)).abs())
        .fold(0.0, f64::max);
    let min_domination_gap = grid(1.1 * cutoff)
        .map(|x| trunc.cdf(x) - base.cdf(x))
        .fold(f64::INFINITY, f64::min);
    let mass_beyond_cutoff = 1.0 - trunc.cdf(cutoff);
    let total_mass = integrate_pieces(
        |x| trunc.pdf(x),
        &trunc.breakpoints(0.0, cutoff),
        QuadOptions::default(),
    )?
    .value;
    let check = TruncationCheck {
        threshold,
        cutoff,
        repatriated_mass: t.repatriated_mass(),
        mass_beyond_cutoff,
        max_gap_below_threshold,
        min_domination_gap,
        total_mass,
        pass: mass_beyond_cutoff.abs() <= 1e-12
            && max_gap_below_threshold <= 1e-12
            && min_domination_gap >= -1e-12
            && (total_mass - 1.0).abs() <= 1e-9,
    };
    let cfg = TruncateConfig {
        base: &base,
        k: a.k,
        c5,
        bump,
        grid: a.grid,
    };
    emit(&a.out, &envelope("truncate-check", cfg, &check)?)?;
    Ok(if check.pass {
        Outcome::Pass
    } else {
        Outcome::Violation(format!("{check:?}"))
    })
}

/// SVG chart for the experiments that have a natural one.
pub fn chart(report: &ExperimentReport) -> Result<Option<String>> {
    let svg = match &report.study {
        Study::Scaling => {
            let rows: Vec<ScalingRow> = serde_json::from_value(report.results["rows"].clone())?;
            let s = Series {
                name: report.config.dist.to_string(),
                points: rows.iter().map(|r| (r.n as f64, r.var / r.n as f64)).collect(),
                bars: Some(
                    rows.iter()
                        .map(|r| (r.var_lo / r.n as f64, r.var_hi / r.n as f64))
                        .collect(),
                ),
            };
            svg_line_chart("Variance scaling", "n", "Var(f) / n", &[s])
        }
        Study::Tails { n } => {
            let rows: Vec<TailRow> = serde_json::from_value(report.results["tail"].clone())?;
            let pts = rows
                .iter()
                .filter(|r| r.exceedances > 0)
                .map(|r| (r.t, r.prob.ln()))
                .collect();
            let s = Series {
                name: format!("n = {n}"),
                points: pts,
                bars: None,
            };
            svg_line_chart("Tail profile", "t", "ln P(|f - mean| > t sqrt(n / ln n))", &[s])
        }
        Study::TimeConstant => {
            let tc: TimeConstantReport = serde_json::from_value(report.results.clone())?;
            let s = Series {
                name: report.config.dist.to_string(),
                points: tc.rows.iter().map(|r| (r.n as f64, r.rate)).collect(),
                bars: Some(tc.rows.iter().map(|r| (r.rate_lo, r.rate_hi)).collect()),
            };
            svg_line_chart("Time constant", "n", "E f / n", &[s])
        }
        _ => return Ok(None),
    };
    Ok(Some(svg))
}

fn summary(report: &ExperimentReport) -> Result<String> {
    let mut out = format!(
        "{} {} / {}\ndist {}  dim {}  replicas {}  seed {}  m {}\n",
        report.tool,
        report.version,
        report.study.name(),
        report.config.dist,
        report.config.dim,
        report.config.replicas,
        report.seed,
        report.config.m_policy
    );
    if report.study == Study::Scaling {
        let rows: Vec<ScalingRow> = serde_json::from_value(report.results["rows"].clone())?;
        out.push_str("     n          mean           var     Var/n  [lo, hi]              E|gamma|   ties\n");
        for r in rows {
            let n = r.n as f64;
            out.push_str(&format!(
                "{:>6} {:>13.6} {:>13.6} {:>9.5}  [{:.5}, {:.5}] {:>10.3} {:>6}\n",
                r.n,
                r.mean,
                r.var,
                r.var / n,
                r.var_lo / n,
                r.var_hi / n,
                r.geo_len_mean,
                r.ties
            ));
        }
        if let Some(fit) = report.results.get("fit").filter(|f| !f.is_null()) {
            out.push_str(&format!("fit: {}\n", serde_json::to_string(fit)?));
        }
    } else {
        out.push_str(&serde_json::to_string_pretty(&report.results)?);
        out.push('\n');
    }
    Ok(out)
}

fn report(a: ReportArgs) -> Result<Outcome> {
    let text = fs::read_to_string(&a.input)?;
    let report: ExperimentReport =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.input.display())))?;
    emit(&a.out, &summary(&report)?)?;
    if let Some(path) = &a.svg {
        let svg = chart(&report)?
            .ok_or_else(|| Error::Config(format!("no chart for the {} experiment", report.study.name())))?;
        emit(&Some(path.clone()), &svg)?;
    }
    if a.rerun {
        let mut cfg = report.config.clone();
        cfg.workers = a.workers;
        let fresh = to_json(&run_study(&cfg, &report.study)?.report)?;
        if fresh != text {
            return Ok(Outcome::Violation(format!(
                "re-running {} does not reproduce it",
                a.input.display()
            )));
        }
        eprintln!("re-run reproduces {} byte for byte", a.input.display());
    }
    Ok(Outcome::Pass)
}
