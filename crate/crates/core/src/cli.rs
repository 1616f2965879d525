//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::density::{invert_density_with, l1_distance, semicircle_profile, EpsPolicy, Grid, DEFAULT_EPS};
use crate::entropy::{edge_exponents, fisher_information, EntropyReport};
use crate::error::Error;
use crate::expansion::{fit_rate, l1_leading_term, th7_density, v_n_density, CltCoefficients};
use crate::measure::{catalan, fmt17, moment, parse_measure, semicircle_density, DensityProfile, Measure};
use crate::subordination::{solve_z, SolveOptions, DEFAULT_MAX_ITER};
use crate::transforms::{moments_from_cauchy, moments_from_tau, tau_from_atomic, DEFAULT_MOMENT_HEIGHT};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_N_LIST: [usize; 5] = [16, 32, 64, 128, 256];
pub const DEFAULT_GRID: &str = "-4:4:2001";

#[derive(Debug, Parser)]
#[command(name = "freeclt", version, about = "Free CLT computations: subordination, densities, L1 rates, free entropy and Fisher information")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density of the normalized sum on a grid (columns x, p).
    Density(RunArgs),
    /// Density together with the expansion terms (columns x, p_n, v_n, th7, p_w).
    Expansion(RunArgs),
    /// L1 distance to the semicircle density for each n.
    L1(RunArgs),
    /// Free entropy and Fisher information for each n.
    Entropy(RunArgs),
    /// Free Fisher information and fitted edge exponents for each n.
    Fisher(RunArgs),
    /// Solve the subordination equation at one point.
    Subordination(SubordinationArgs),
    /// L1, entropy and Fisher rates over an n-list with fitted L1 rate.
    Sweep(RunArgs),
    /// Moments of the input law, directly, from the Cauchy transform and from τ.
    Moments(MomentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Measure spec, e.g. "atoms((-1,0.5),(1,0.5))", "semicircle", "meixner(a,b,d)".
    #[arg(long)]
    pub measure: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Absolute residual tolerance of the subordination solve.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap of the subordination solve.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Grid as lo:hi:points.
    #[arg(long, default_value = DEFAULT_GRID, allow_hyphen_values = true)]
    pub grid: String,
    /// `richardson[:eps]`, `fixed:eps`, or a bare eps (fixed).
    #[arg(long, default_value = "richardson")]
    pub eps: String,
}

#[derive(Debug, Clone, Args)]
pub struct SubordinationArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
    /// Point as re,im with im > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub common: Common,
    /// Highest order.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub measure: Measure,
    pub ns: Vec<usize>,
    pub grid: Grid,
    pub eps: EpsPolicy,
    pub solve: SolveOptions,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl CliError {
    /// 2 for input errors, 3 for numeric non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Compute(Error::ParseError { .. }) => 2,
            CliError::Compute(e) if e.is_numeric_failure() => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "cli::Usage: {m}"),
            CliError::Compute(e) => write!(f, "{}::{}: {e}", e.module(), e.name()),
            CliError::Io(e) => write!(f, "cli::Io: {e}"),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Usage(format!("grid must be lo:hi:points, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Grid::new(lo, hi, points).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_eps(s: &str) -> Result<EpsPolicy, CliError> {
    let bad = || CliError::Usage(format!("eps must be richardson[:eps], fixed:eps or a number, got `{s}`"));
    let num = |t: &str| -> Result<f64, CliError> {
        let v: f64 = t.trim().parse().map_err(|_| bad())?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let s = s.trim();
    if s == "richardson" {
        return Ok(EpsPolicy::Richardson(DEFAULT_EPS));
    }
    if let Some(rest) = s.strip_prefix("richardson:") {
        return Ok(EpsPolicy::Richardson(num(rest)?));
    }
    if let Some(rest) = s.strip_prefix("fixed:") {
        return Ok(EpsPolicy::Fixed(num(rest)?));
    }
    Ok(EpsPolicy::Fixed(num(s)?))
}

pub fn parse_point(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("z must be re,im, got `{s}`"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok(C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

fn solve_options(c: &Common) -> Result<SolveOptions, CliError> {
    match c.tol {
        Some(t) if !(t > 0.0) => Err(CliError::Usage(format!("tol must be positive, got {t}"))),
        _ if c.max_iter == 0 => Err(CliError::Usage("max-iter must be positive".into())),
        tol => Ok(SolveOptions { tol, max_iter: c.max_iter }),
    }
}

impl RunConfig {
    pub fn from_args(a: &RunArgs, single: bool) -> Result<Self, CliError> {
        let measure = parse_measure(&a.common.measure)?;
        let ns = match (&a.n, &a.n_list) {
            (Some(n), _) => vec![*n],
            (None, Some(list)) => list.clone(),
            (None, None) if single => return Err(CliError::Usage("--n is required".into())),
            (None, None) => DEFAULT_N_LIST.to_vec(),
        };
        if single && ns.len() != 1 {
            return Err(CliError::Usage("this command takes a single --n".into()));
        }
        if ns.is_empty() || ns.contains(&0) {
            return Err(CliError::Usage("n must be at least 1".into()));
        }
        let mut ns = ns;
        ns.sort_unstable();
        ns.dedup();
        Ok(RunConfig {
            measure,
            ns,
            grid: parse_grid(&a.grid)?,
            eps: parse_eps(&a.eps)?,
            solve: solve_options(&a.common)?,
        })
    }

    fn profile(&self, n: usize) -> Result<DensityProfile, Error> {
        invert_density_with(&self.measure, n, self.grid, self.eps, self.solve)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => fmt17(*v),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) if v.is_finite() => fmt17(*v),
            Cell::Text(t) => serde_json::to_string(t).expect("string"),
            Cell::Num(_) | Cell::Empty => "null".into(),
        }
    }
}

/// Rectangular output with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Table { command, columns: columns.to_vec(), rows: Vec::new() }
    }

    /// Header row, 17 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"schema\":{SCHEMA_VERSION},\"command\":\"{}\",\"rows\":[", self.command);
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            for (j, (c, v)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "\"{c}\":{}", v.json());
            }
            out.push('}');
        }
        out.push_str("]}\n");
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn density_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.profile(cfg.ns[0])?;
    let mut t = Table::new("density", &["x", "p"]);
    for (i, x) in p.xs().enumerate() {
        t.rows.push(vec![Cell::Num(x), Cell::Num(p.values[i])]);
    }
    log::info!("mass {} (tolerance {})", p.mass(), p.mass_tol);
    Ok(t)
}

fn expansion_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let n = cfg.ns[0];
    let c = CltCoefficients::from_measure(&cfg.measure, n)?;
    let p = cfg.profile(n)?;
    let mut t = Table::new("expansion", &["x", "p_n", "v_n", "th7", "p_w"]);
    for (i, x) in p.xs().enumerate() {
        t.rows.push(vec![
            Cell::Num(x),
            Cell::Num(p.values[i]),
            Cell::Num(v_n_density(&c, x - c.a_n)),
            Cell::Num(th7_density(&c, x - c.a_n)),
            Cell::Num(semicircle_density(x)),
        ]);
    }
    Ok(t)
}

fn moments34(m: &Measure) -> Result<(f64, f64), Error> {
    Ok((moment(m, 3)?, moment(m, 4)?))
}

fn l1_values(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let w = semicircle_profile(cfg.grid)?;
    let vals: Vec<f64> = cfg
        .ns
        .par_iter()
        .map(|&n| l1_distance(&cfg.profile(n)?, &w))
        .collect::<Result<_, Error>>()?;
    Ok(vals)
}

fn l1_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (m3, m4) = moments34(&cfg.measure)?;
    let vals = l1_values(cfg)?;
    let mut t = Table::new("l1", &["n", "l1", "l1_leading", "ratio"]);
    for (&n, &l1) in cfg.ns.iter().zip(&vals) {
        let lead = l1_leading_term(m3, m4, n);
        let ratio = if lead > 0.0 { Cell::Num(l1 / lead) } else { Cell::Empty };
        t.rows.push(vec![Cell::Int(n as i64), Cell::Num(l1), Cell::Num(lead), ratio]);
    }
    Ok(t)
}

fn entropy_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let reports: Vec<EntropyReport> = cfg
        .ns
        .par_iter()
        .map(|&n| EntropyReport::from_profile(n, &cfg.profile(n)?))
        .collect::<Result<_, Error>>()?;
    let mut t = Table::new("entropy", &["n", "chi", "fisher", "logEnergy", "chiDeficit", "fisherExcess"]);
    for r in reports {
        t.rows.push(vec![
            Cell::Int(r.n as i64),
            Cell::Num(r.chi),
            Cell::Num(r.fisher),
            Cell::Num(r.log_energy),
            Cell::Num(r.chi_deficit),
            Cell::Num(r.fisher_excess),
        ]);
    }
    Ok(t)
}

fn fisher_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let rows: Vec<(f64, (f64, f64))> = cfg
        .ns
        .par_iter()
        .map(|&n| {
            let p = cfg.profile(n)?;
            Ok((fisher_information(&p)?, edge_exponents(&p)))
        })
        .collect::<Result<_, Error>>()?;
    let mut t = Table::new("fisher", &["n", "fisher", "fisherExcess", "edge_left", "edge_right"]);
    for (&n, (f, (l, r))) in cfg.ns.iter().zip(rows) {
        t.rows.push(vec![Cell::Int(n as i64), Cell::Num(f), Cell::Num(f - 1.0), Cell::Num(l), Cell::Num(r)]);
    }
    Ok(t)
}

fn sweep_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let (m3, m4) = moments34(&cfg.measure)?;
    let w = semicircle_profile(cfg.grid)?;
    let rows: Vec<(f64, EntropyReport)> = cfg
        .ns
        .par_iter()
        .map(|&n| {
            let p = cfg.profile(n)?;
            Ok((l1_distance(&p, &w)?, EntropyReport::from_profile(n, &p)?))
        })
        .collect::<Result<_, Error>>()?;
    let l1s: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let fit = fit_rate(&cfg.ns, &l1s);
    let mut t = Table::new(
        "sweep",
        &["n", "l1", "l1_leading", "chi", "chiDeficit", "fisher", "fisherExcess", "fitted_exponent", "fitted_constant"],
    );
    for (&n, (l1, r)) in cfg.ns.iter().zip(rows) {
        let (fe, fc) = match fit {
            Some((a, c)) => (Cell::Num(a), Cell::Num(c)),
            None => (Cell::Empty, Cell::Empty),
        };
        t.rows.push(vec![
            Cell::Int(n as i64),
            Cell::Num(l1),
            Cell::Num(l1_leading_term(m3, m4, n)),
            Cell::Num(r.chi),
            Cell::Num(r.chi_deficit),
            Cell::Num(r.fisher),
            Cell::Num(r.fisher_excess),
            fe,
            fc,
        ]);
    }
    Ok(t)
}

fn subordination_table(a: &SubordinationArgs) -> Result<Table, CliError> {
    let m = parse_measure(&a.common.measure)?;
    let z = parse_point(&a.z)?;
    if a.n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let sol = solve_z(&m, a.n, z, solve_options(&a.common)?)?;
    let mut t = Table::new("subordination", &["n", "z_re", "z_im", "Z_re", "Z_im", "iterations", "residual"]);
    t.rows.push(vec![
        Cell::Int(a.n as i64),
        Cell::Num(z.re),
        Cell::Num(z.im),
        Cell::Num(sol.value.re),
        Cell::Num(sol.value.im),
        Cell::Int(sol.iterations as i64),
        Cell::Num(sol.residual),
    ]);
    Ok(t)
}

fn moments_table(a: &MomentArgs) -> Result<Table, CliError> {
    let m = parse_measure(&a.common.measure)?;
    let tau = match &m {
        Measure::Atomic(_) => tau_from_atomic(&m).ok(),
        _ => None,
    };
    let mut t = Table::new("moments", &["k", "moment", "from_cauchy", "from_tau", "semicircle"]);
    for k in 0..=a.k {
        let direct = moment(&m, k)?;
        let cauchy = moments_from_cauchy(&m, k, DEFAULT_MOMENT_HEIGHT)?;
        let from_tau = match &tau {
            Some(tr) if k <= crate::transforms::TAU_MOMENT_CAP => Cell::Num(moments_from_tau(tr, k)),
            _ => Cell::Empty,
        };
        let cat = if k % 2 == 0 { Cell::Num(catalan(k / 2)) } else { Cell::Num(0.0) };
        t.rows.push(vec![Cell::Int(k as i64), Cell::Num(direct), Cell::Num(cauchy), from_tau, cat]);
    }
    Ok(t)
}

/// Run a parsed command and return the rendered output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let (table, common) = match &cli.command {
        Command::Density(a) => (density_table(&RunConfig::from_args(a, true)?)?, &a.common),
        Command::Expansion(a) => (expansion_table(&RunConfig::from_args(a, true)?)?, &a.common),
        Command::L1(a) => (l1_table(&RunConfig::from_args(a, false)?)?, &a.common),
        Command::Entropy(a) => (entropy_table(&RunConfig::from_args(a, false)?)?, &a.common),
        Command::Fisher(a) => (fisher_table(&RunConfig::from_args(a, false)?)?, &a.common),
        Command::Sweep(a) => (sweep_table(&RunConfig::from_args(a, false)?)?, &a.common),
        Command::Subordination(a) => (subordination_table(a)?, &a.common),
        Command::Moments(a) => (moments_table(a)?, &a.common),
    };
    let text = table.render(common.format);
    match &common.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(CliError::Io)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Cap the global thread pool from `FREECLT_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FREECLT_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::Usage(format!("FREECLT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}
