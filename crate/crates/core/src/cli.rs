//! Command-line experiment runner.
//!
//! Every command writes rows with the fixed columns
//! `command,d,ell,q,z,seed,statistic,value,stderr`; cells that do not apply to
//! a row are left empty. JSON output is an array of the same rows.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::field::{build_grid, write_dump, FieldSampler, SphereGrid};
use crate::functionals::indicator_coeffs;
use crate::moments::{asymptotic_constant, projection_variance, scaling_law, MomentResult};
use crate::specfun::{gauss_sf, sphere_measure};
use crate::stats::{rate_fit, run_ensemble_multi, EnsembleSummary, Functional, DEFAULT_REPLICATES};

pub const CSV_HEADER: &str = "command,d,ell,q,z,seed,statistic,value,stderr";

/// Environment variable holding the default worker thread count.
pub const THREADS_ENV: &str = "SPHERE_CHAOS_THREADS";

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;
/// `--verify` with at least one failing criterion.
pub const EXIT_VERIFY_FAILED: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "sphere-chaos", version, about = "Gaussian random eigenfunctions on the d-sphere")]
pub struct Cli {
    /// Run the acceptance batteries and print PASS/FAIL per criterion.
    #[arg(long)]
    pub verify: bool,

    /// Worker threads for ensembles.
    #[arg(long, env = THREADS_ENV, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Constants,
    Moments,
    Simulate,
    Clt,
    Excursion,
    Defect,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymptotic constant c_{q;d} and its decay law.
    Constants(RunArgs),
    /// Moment integrals at each degree, scaled by their decay law.
    Moments(RunArgs),
    /// Single field draws, optionally dumped to a binary file.
    Simulate(RunArgs),
    /// Ensemble diagnostics of the chaotic projection h_{ell;q,d}.
    Clt(RunArgs),
    /// Ensemble diagnostics of the excursion volume at level z.
    Excursion(RunArgs),
    /// Ensemble diagnostics of the defect.
    Defect(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Sphere dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Chaos order / moment power.
    #[arg(long)]
    pub q: Option<usize>,
    /// Truncation order of the indicator expansion.
    #[arg(long = "Q", default_value_t = 8)]
    pub truncation: usize,
    /// Comma-separated increasing degrees.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<usize>,
    /// Excursion level.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub z: f64,
    /// Monte Carlo replicates.
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub reps: usize,
    /// Grid resolution; defaults to max(2 ell, 8) on S^2 and 40 above.
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Binary dump of the simulated field (simulate, single degree only).
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

/// A validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub d: usize,
    pub q: Option<usize>,
    pub truncation: usize,
    pub ell_list: Vec<usize>,
    pub z: f64,
    pub replicates: usize,
    pub grid_resolution: Option<usize>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub dump: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(Error::Io { .. }) | CliError::Io { .. } => EXIT_IO,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl Command {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (command, a) = match self {
            Command::Constants(a) => (CommandKind::Constants, a),
            Command::Moments(a) => (CommandKind::Moments, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Clt(a) => (CommandKind::Clt, a),
            Command::Excursion(a) => (CommandKind::Excursion, a),
            Command::Defect(a) => (CommandKind::Defect, a),
        };
        RunConfig::new(command, a)
    }
}

impl RunConfig {
    pub fn new(command: CommandKind, a: RunArgs) -> Result<Self, CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if a.d < 2 {
            return bad("--d must be at least 2");
        }
        let needs_q = matches!(command, CommandKind::Constants | CommandKind::Moments | CommandKind::Clt);
        if needs_q && a.q.is_none() {
            return bad("--q is required for this command");
        }
        if command != CommandKind::Constants {
            if a.ell.is_empty() {
                return bad("--ell is required for this command");
            }
            if a.ell.windows(2).any(|w| w[0] >= w[1]) {
                return bad("--ell must be strictly increasing");
            }
        }
        let ensemble = matches!(command, CommandKind::Clt | CommandKind::Excursion | CommandKind::Defect);
        if ensemble && a.reps < 2 {
            return bad("--reps must be at least 2");
        }
        if command == CommandKind::Excursion && a.truncation < 2 {
            return bad("--Q must be at least 2");
        }
        if a.res.is_some_and(|r| r < 4) {
            return bad("--res must be at least 4");
        }
        if !a.z.is_finite() {
            return bad("--z must be finite");
        }
        if a.dump.is_some() && (command != CommandKind::Simulate || a.ell.len() != 1) {
            return bad("--dump needs the simulate command with a single --ell");
        }
        Ok(Self {
            command,
            d: a.d,
            q: a.q,
            truncation: a.truncation,
            ell_list: a.ell,
            z: a.z,
            replicates: a.reps,
            grid_resolution: a.res,
            seed: a.seed,
            output: a.output,
            format: a.format,
            dump: a.dump,
        })
    }

    fn resolution(&self, ell: usize) -> usize {
        self.grid_resolution
            .unwrap_or(if self.d == 2 { (2 * ell).max(8) } else { 40 })
    }
}

/// One output record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub command: &'static str,
    pub d: usize,
    pub ell: Option<usize>,
    pub q: Option<usize>,
    pub z: Option<f64>,
    pub seed: Option<u64>,
    pub statistic: &'static str,
    pub value: f64,
    pub stderr: Option<f64>,
}

fn command_name(c: CommandKind) -> &'static str {
    match c {
        CommandKind::Constants => "constants",
        CommandKind::Moments => "moments",
        CommandKind::Simulate => "simulate",
        CommandKind::Clt => "clt",
        CommandKind::Excursion => "excursion",
        CommandKind::Defect => "defect",
    }
}

struct Rows<'a> {
    cfg: &'a RunConfig,
    rows: Vec<Row>,
}

impl Rows<'_> {
    fn push(&mut self, ell: Option<usize>, statistic: &'static str, value: f64, stderr: Option<f64>) {
        let cfg = self.cfg;
        let stochastic = matches!(
            cfg.command,
            CommandKind::Simulate | CommandKind::Clt | CommandKind::Excursion | CommandKind::Defect
        );
        self.rows.push(Row {
            command: command_name(cfg.command),
            d: cfg.d,
            ell,
            q: cfg.q,
            z: matches!(cfg.command, CommandKind::Excursion).then_some(cfg.z),
            seed: stochastic.then_some(cfg.seed),
            statistic,
            value,
            stderr,
        });
    }

    fn diagnostics(&mut self, ell: usize, s: &EnsembleSummary) {
        if let Some(ks) = s.ks_to_normal {
            self.push(Some(ell), "ks", ks, None);
        }
        if let Some(w1) = s.w1_to_normal {
            self.push(Some(ell), "w1", w1, None);
        }
        if let Some(k) = s.excess_kurtosis() {
            self.push(Some(ell), "cum4_ratio", k, None);
        }
    }
}

/// Executes a validated run and returns its rows.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let mut out = Rows { cfg, rows: Vec::new() };
    let d = cfg.d;
    match cfg.command {
        CommandKind::Constants => {
            let q = cfg.q.unwrap();
            let law = scaling_law(q, d)?;
            out.push(None, "exponent", law.exponent as f64, None);
            out.push(None, "log_power", law.log_power as f64, None);
            out.push(None, "constant", asymptotic_constant(q, d)?, None);
        }
        CommandKind::Moments => {
            let q = cfg.q.unwrap();
            let mut pairs = Vec::new();
            for &ell in &cfg.ell_list {
                let m = MomentResult::compute(ell, q, d)?;
                out.push(Some(ell), "integral", m.integral, None);
                out.push(Some(ell), "scaled", m.scaled, None);
                out.push(Some(ell), "target", m.target, None);
                out.push(Some(ell), "rel_err", m.rel_err, None);
                pairs.push((ell as f64, m.integral.abs()));
            }
            if pairs.len() >= 3 && pairs.iter().all(|p| p.0 > 0.0 && p.1 > 0.0) {
                out.push(None, "slope", rate_fit(&pairs)?.slope, None);
            }
        }
        CommandKind::Simulate => {
            for &ell in &cfg.ell_list {
                let grid = Arc::new(build_grid(d, cfg.resolution(ell))?);
                let sample = FieldSampler::new(Arc::clone(&grid), ell)?.sample(cfg.seed);
                let (m1, m2) = spatial_moments(&grid, &sample.values);
                out.push(Some(ell), "nodes", grid.len() as f64, None);
                out.push(Some(ell), "spatial_mean", m1, None);
                out.push(Some(ell), "spatial_second_moment", m2, None);
                if let Some(path) = &cfg.dump {
                    let io_err = |source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    };
                    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
                    write_dump(&sample, &mut w).map_err(io_err)?;
                    w.flush().map_err(io_err)?;
                }
            }
        }
        CommandKind::Clt => {
            let q = cfg.q.unwrap();
            let mut pairs = Vec::new();
            for &ell in &cfg.ell_list {
                let s = &run_ensemble_multi(d, ell, cfg.resolution(ell), &[Functional::Projection { q }], cfg.replicates, cfg.seed)?[0];
                out.push(Some(ell), "mean", s.mean, Some(s.mean_stderr()));
                out.push(Some(ell), "variance", s.variance, Some(s.variance_stderr()));
                if ell % 2 == 0 && ell >= 2 && q >= 2 {
                    out.push(Some(ell), "variance_theory", projection_variance(ell, q, d)?, None);
                }
                out.diagnostics(ell, s);
                pairs.push((ell as f64, s.variance));
            }
            if pairs.len() >= 3 && pairs.iter().all(|p| p.1 > 0.0) {
                out.push(None, "variance_slope", rate_fit(&pairs)?.slope, None);
            }
        }
        CommandKind::Excursion => {
            let coeffs = indicator_coeffs(cfg.z, cfg.truncation)?;
            let mut functionals = vec![Functional::Excursion { z: cfg.z }];
            functionals.extend((1..=cfg.truncation).map(|q| Functional::Projection { q }));
            for &ell in &cfg.ell_list {
                let all = run_ensemble_multi(d, ell, cfg.resolution(ell), &functionals, cfg.replicates, cfg.seed)?;
                let s = &all[0];
                out.push(Some(ell), "mean", s.mean, Some(s.mean_stderr()));
                out.push(Some(ell), "mean_theory", sphere_measure(d) * gauss_sf(cfg.z), None);
                out.push(Some(ell), "variance", s.variance, Some(s.variance_stderr()));
                let j2 = coeffs.coeffs()[2];
                if j2 != 0.0 {
                    out.push(Some(ell), "rank2_ratio", s.variance / (0.25 * j2 * j2 * all[2].variance), None);
                }
                let expansion = chaos_expansion(coeffs.coeffs(), &all[1..]);
                out.push(Some(ell), "expansion_correlation", correlation(&s.values, &expansion), None);
                out.diagnostics(ell, s);
            }
        }
        CommandKind::Defect => {
            for &ell in &cfg.ell_list {
                let s = &run_ensemble_multi(d, ell, cfg.resolution(ell), &[Functional::Defect], cfg.replicates, cfg.seed)?[0];
                let scale = (ell * ell) as f64;
                out.push(Some(ell), "mean", s.mean, Some(s.mean_stderr()));
                out.push(Some(ell), "variance", s.variance, Some(s.variance_stderr()));
                out.push(Some(ell), "scaled_variance", scale * s.variance, Some(scale * s.variance_stderr()));
                out.diagnostics(ell, s);
            }
        }
    }
    Ok(out.rows)
}

fn spatial_moments(grid: &SphereGrid, values: &[f64]) -> (f64, f64) {
    let total: f64 = grid.weights().iter().sum();
    let (m1, m2) = values
        .iter()
        .zip(grid.weights())
        .fold((0.0, 0.0), |(a, b), (v, w)| (a + w * v, b + w * v * v));
    (m1 / total, m2 / total)
}

/// Per-replicate `sum_{q>=1} J_q / q! h_q` from the ensembles of `h_1, ..., h_Q`.
pub fn chaos_expansion(coeffs: &[f64], projections: &[EnsembleSummary]) -> Vec<f64> {
    let n = projections[0].values.len();
    let mut out = vec![0.0; n];
    let mut fact = 1.0;
    for (k, h) in projections.iter().enumerate() {
        let q = k + 1;
        fact *= q as f64;
        for (o, v) in out.iter_mut().zip(&h.values) {
            *o += coeffs[q] / fact * v;
        }
    }
    out
}

/// Pearson correlation; NaN when either side is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[Row], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.command,
            r.d,
            cell(&r.ell),
            cell(&r.q),
            cell(&r.z),
            cell(&r.seed),
            r.statistic,
            r.value,
            cell(&r.stderr)
        )?;
    }
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, mut w: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(rows, w),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)
        }
    }
}

/// Runs a configuration and writes its output.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = execute(cfg)?;
    match &cfg.output {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            write_rows(&rows, cfg.format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => write_rows(&rows, cfg.format, io::stdout().lock()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // Fails only if the global pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if cli.verify {
        let outcomes = crate::verify::run_all();
        for o in &outcomes {
            println!("{o}");
        }
        return if outcomes.iter().all(|o| o.passed) { 0 } else { EXIT_VERIFY_FAILED };
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand or --verify is required");
        return EXIT_CONFIG;
    };
    match command.into_config().and_then(|cfg| run(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
