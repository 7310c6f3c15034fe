//! Command-line front end.
//!
//! Every command writes one machine-readable document. JSON documents carry
//! a `schema` tag and the resolved `config`; CSV goes through an RFC 4180
//! writer with a mandatory header, and its resolved config is written to
//! stderr as a single JSON line so stdout stays a plain table.
//!
//! Exit codes: 0 success, 1 numeric breakdown or I/O failure, 2 usage error,
//! 3 refusal because a feasibility guard or a precondition of the
//! requested bound does not hold.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::asymptotic::{
    self, erdos_lehner_pt, prop32_bound, rademacher_p, solve_saddle, theorem12_bound,
    theorem13_bound, BoundContext, BoundReport, LogReal, Regime,
};
use crate::character::{
    lower_bound_partial, lower_bound_terms, CharacterTable, MnEvaluator, TableOptions, ZeroCensus,
};
use crate::counting::{tcore_count_bruteforce, tcore_count_with, CountCache, CountKind};
use crate::error::Error;
use crate::partition::Partition;
use crate::sampling::{estimate_zero_density_with, DensityEstimate, DensityOptions};

pub const CACHE_ENV: &str = "CHARCENSUS_CACHE";
pub const SCHEMA_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Human => "human",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "charcensus", version, about = "Zeros of symmetric group character tables")]
pub struct Cli {
    /// Directory for persisted count tables (overridden by CHARCENSUS_CACHE).
    #[arg(long, global = true, default_value = CountCache::DEFAULT_DIR)]
    cache_dir: PathBuf,

    /// Output encoding; defaults to csv for tables and sweeps, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for data-parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest n for which a full character table is built.
    #[arg(long, global = true, default_value_t = crate::character::DEFAULT_TABLE_GUARD)]
    max_table_n: u32,

    /// Largest n for which p(n) is taken exactly inside bound evaluations.
    #[arg(long, global = true, default_value_t = asymptotic::bounds::DEFAULT_P_EXACT_LIMIT)]
    p_exact_limit: u32,

    /// Largest n for which bound reports attach an exact comparison value.
    #[arg(long, global = true, default_value_t = 5000)]
    compare_limit: u32,

    /// Relative residual tolerance for the saddle-point solve.
    #[arg(long, global = true, default_value_t = asymptotic::saddle::DEFAULT_SADDLE_TOL)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact partition counts.
    #[command(subcommand)]
    Count(CountCmd),
    /// Character values and tables.
    #[command(subcommand)]
    Char(CharCmd),
    /// Zero censuses and the strip lower-bound sum.
    #[command(subcommand)]
    Zeros(ZerosCmd),
    /// Asymptotic bounds and the saddle point.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Estimate(EstimateCmd),
    /// Bound-versus-exact comparison rows, one per n.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
enum CountCmd {
    /// p(n)
    P {
        #[arg(long)]
        n: u32,
    },
    /// Partitions of n with parts at most t.
    Pt {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n: u32,
    },
    /// t-core partitions of n.
    Core {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n: u32,
        /// Count by enumeration instead of the eta-quotient expansion.
        #[arg(long)]
        brute: bool,
    },
}

#[derive(Debug, Subcommand)]
enum CharCmd {
    /// A single character value chi_lambda(mu).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// The full character table of S_n.
    Table {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ZerosCmd {
    /// Exact Z(n) and Z_t(n) from the full table.
    Exact {
        #[arg(long)]
        n: u32,
    },
    /// sum_t c_t(n) p_t(n - t), optionally over t_lo..=t_hi.
    LowerBound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t_lo: Option<u32>,
        #[arg(long)]
        t_hi: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
enum BoundsCmd {
    /// 2 p(n)^2 / log n.
    T12 {
        #[arg(long)]
        n: u32,
    },
    /// Lower-bound main term for zeros in t-core rows.
    T13 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = asymptotic::bounds::DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Main term or lower bound for c_t(n).
    P32 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = asymptotic::bounds::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Force a range: P32_I, P32_II, P32_III or P32_IV.
        #[arg(long)]
        regime: Option<String>,
    },
    /// Saddle point y and the resulting main term for c_t(n).
    Saddle {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: u64,
    },
}

#[derive(Debug, Subcommand)]
enum EstimateCmd {
    /// Fraction of vanishing table cells.
    Density(DensityArgs),
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[arg(long, required_unless_present = "n_list", conflicts_with = "n_list")]
    n: Option<u32>,
    /// Batch mode: one estimate per n.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = crate::sampling::DEFAULT_MC_GUARD)]
    mc_max_n: u32,
    #[arg(long, default_value_t = crate::sampling::DEFAULT_STEP_BUDGET)]
    step_budget: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    /// Output file, or one of `csv`, `json`, `human` to print to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A finished document, prior to encoding.
enum Output {
    Record { schema: &'static str, fields: Map<String, Value> },
    Rows { schema: &'static str, rows: Vec<Map<String, Value>> },
    Table(CharacterTable),
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::GuardExceeded { .. } | Error::NoRegime { .. } | Error::Precondition(_) => 3,
            Error::InvalidPartition(_) | Error::SizeMismatch { .. } | Error::BadRange { .. } => 2,
            Error::Numeric(_) | Error::CacheFormat { .. } | Error::Io(_) => 1,
        };
        Failure {
            code,
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        kind: "usage",
        message: message.into(),
    }
}

fn big(x: &BigUint) -> Value {
    Value::String(x.to_str_radix(10))
}

fn real(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, real)
}

/// Run with explicit argv and sinks; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = writeln!(
                    err,
                    "{}",
                    json!({"error": {"kind": "usage", "exit_code": 2, "message": e.to_string()}})
                );
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let command_line: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut app = App::new(cli, command_line);
    let result = app.with_threads(|app| app.dispatch());
    let result = result.and_then(|output| app.emit(output, out, err));
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(
                err,
                "{}",
                json!({"error": {"kind": f.kind, "exit_code": f.code, "message": f.message}})
            );
            f.code
        }
    }
}

struct App {
    cli: Cli,
    command_line: Vec<String>,
    cache: CountCache,
    seed: Option<u64>,
    seed_generated: bool,
}

impl App {
    fn new(cli: Cli, command_line: Vec<String>) -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| cli.cache_dir.clone());
        Self {
            cli,
            command_line,
            cache: CountCache::new(dir),
            seed: None,
            seed_generated: false,
        }
    }

    /// `--out` naming an encoding rather than a file.
    fn out_format(&self) -> Option<Format> {
        let raw = self.raw_out()?;
        Format::from_str(raw.to_str()?, true).ok()
    }

    fn raw_out(&self) -> Option<&Path> {
        match &self.cli.command {
            Command::Char(CharCmd::Table { out, .. }) => out.as_deref(),
            Command::Sweep(args) => args.out.as_deref(),
            _ => None,
        }
    }

    fn format(&self) -> Format {
        if let (None, Some(f)) = (self.cli.format, self.out_format()) {
            return f;
        }
        self.cli.format.unwrap_or(match &self.cli.command {
            Command::Char(CharCmd::Table { .. }) | Command::Sweep(_) => Format::Csv,
            _ => Format::Json,
        })
    }

    #[cfg(feature = "parallel")]
    fn with_threads<R: Send>(&mut self, f: impl FnOnce(&mut Self) -> Result<R, Failure> + Send) -> Result<R, Failure> {
        match self.cli.threads {
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| usage(format!("cannot start {k} threads: {e}")))?;
                pool.install(|| f(self))
            }
            None => f(self),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn with_threads<R: Send>(&mut self, f: impl FnOnce(&mut Self) -> Result<R, Failure> + Send) -> Result<R, Failure> {
        f(self)
    }

    fn config(&self) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command_line.join(" "),
            "cache_dir": self.cache.dir().display().to_string(),
            "format": self.format().name(),
            "threads": self.cli.threads,
            "parallel_feature": cfg!(feature = "parallel"),
            "max_table_n": self.cli.max_table_n,
            "p_exact_limit": self.cli.p_exact_limit,
            "compare_limit": self.cli.compare_limit,
            "tol": self.cli.tol,
            "seed": self.seed.map(|s| s.to_string()),
            "seed_generated": self.seed_generated,
        })
    }

    fn table_opts(&self) -> TableOptions {
        TableOptions {
            guard: self.cli.max_table_n,
            ..TableOptions::default()
        }
    }

    fn bound_ctx(&self, epsilon: f64) -> BoundContext {
        BoundContext {
            p_exact_limit: self.cli.p_exact_limit,
            epsilon,
            cache: Some(self.cache.clone()),
        }
    }

    fn count(&self, kind: CountKind, n: u32, t: Option<u32>) -> Result<BigUint, Failure> {
        let table = self.cache.load_or_build(kind, n, t)?;
        Ok(table.get(n).cloned().expect("table covers its limit"))
    }

    fn dispatch(&mut self) -> Result<Output, Failure> {
        match &self.cli.command {
            Command::Count(cmd) => self.run_count(cmd),
            Command::Char(cmd) => self.run_char(cmd),
            Command::Zeros(cmd) => self.run_zeros(cmd),
            Command::Bounds(cmd) => self.run_bounds(cmd),
            Command::Estimate(EstimateCmd::Density(args)) => {
                let seed = match args.seed {
                    Some(s) => s,
                    None => {
                        self.seed_generated = true;
                        rand::random()
                    }
                };
                self.seed = Some(seed);
                self.run_density(args, seed)
            }
            Command::Sweep(args) => self.run_sweep(&args.n_list),
        }
    }

    fn run_count(&self, cmd: &CountCmd) -> Result<Output, Failure> {
        let (kind, n, t, method, value) = match *cmd {
            CountCmd::P { n } => ("p", n, None, "pentagonal", self.count(CountKind::P, n, None)?),
            CountCmd::Pt { t, n } => {
                if t == 0 {
                    return Err(usage("--t must be at least 1"));
                }
                ("pt", n, Some(t), "dp", self.count(CountKind::PBounded, n, Some(t))?)
            }
            CountCmd::Core { t, n, brute } => {
                if t == 0 {
                    return Err(usage("--t must be at least 1"));
                }
                if brute {
                    ("core", n, Some(t), "bruteforce", tcore_count_bruteforce(t, n)?)
                } else {
                    ("core", n, Some(t), "eta-quotient", self.count(CountKind::TCore, n, Some(t))?)
                }
            }
        };
        let mut fields = Map::new();
        fields.insert("kind".into(), json!(kind));
        fields.insert("N".into(), json!(n));
        fields.insert("t".into(), json!(t));
        fields.insert("method".into(), json!(method));
        fields.insert("value".into(), big(&value));
        Ok(Output::Record { schema: "count", fields })
    }

    fn run_char(&self, cmd: &CharCmd) -> Result<Output, Failure> {
        match cmd {
            CharCmd::Eval { lambda, mu } => {
                let l: Partition = lambda.parse()?;
                let m: Partition = mu.parse()?;
                let v = MnEvaluator::default().value(&l, &m)?;
                let mut fields = Map::new();
                fields.insert("lambda".into(), json!(l.to_string()));
                fields.insert("mu".into(), json!(m.to_string()));
                fields.insert("value".into(), json!(v.to_string()));
                Ok(Output::Record { schema: "char_value", fields })
            }
            CharCmd::Table { n, .. } => {
                if *n == 0 {
                    return Err(usage("--n must be at least 1"));
                }
                Ok(Output::Table(CharacterTable::build_with(*n, self.table_opts())?))
            }
        }
    }

    fn census(&self, n: u32) -> Result<ZeroCensus, Failure> {
        if n == 0 {
            return Err(usage("--n must be at least 1"));
        }
        Ok(ZeroCensus::from_table(&CharacterTable::build_with(n, self.table_opts())?))
    }

    fn run_zeros(&self, cmd: &ZerosCmd) -> Result<Output, Failure> {
        match *cmd {
            ZerosCmd::Exact { n } => {
                let census = self.census(n)?;
                let mut fields = Map::new();
                fields.insert("N".into(), json!(n));
                fields.insert("p_N".into(), big(&census.table_dim));
                fields.insert("Z".into(), big(&census.total_zeros));
                let per: Map<String, Value> = census
                    .per_core_zeros
                    .iter()
                    .map(|(t, z)| (t.to_string(), big(z)))
                    .collect();
                fields.insert("Z_t".into(), Value::Object(per));
                Ok(Output::Record { schema: "census", fields })
            }
            ZerosCmd::LowerBound { n, t_lo, t_hi } => {
                if n == 0 {
                    return Err(usage("--n must be at least 1"));
                }
                let lo = t_lo.unwrap_or(1);
                let hi = t_hi.unwrap_or(n);
                let value = lower_bound_partial(n, lo, hi)?;
                let mut fields = Map::new();
                fields.insert("N".into(), json!(n));
                fields.insert("t_lo".into(), json!(lo));
                fields.insert("t_hi".into(), json!(hi));
                fields.insert("value".into(), big(&value));
                Ok(Output::Record { schema: "lower_bound", fields })
            }
        }
    }

    fn exact_core(&self, n: u32, t: u32) -> Result<Option<(BigUint, Vec<BigUint>)>, Failure> {
        if n > self.cli.compare_limit {
            return Ok(None);
        }
        let p = self.cache.load_or_build(CountKind::P, n, None)?;
        let c = tcore_count_with(t, n, p.entries());
        Ok(Some((c, p.entries().to_vec())))
    }

    fn run_bounds(&self, cmd: &BoundsCmd) -> Result<Output, Failure> {
        match *cmd {
            BoundsCmd::T12 { n } => {
                let mut report = theorem12_bound(n, &self.bound_ctx(asymptotic::bounds::DEFAULT_EPSILON))?;
                let mut kind = Value::Null;
                if n >= 1 && n <= self.cli.max_table_n {
                    let z = self.census(n)?.total_zeros;
                    report = report.with_comparison(LogReal::from_biguint(&z));
                    kind = json!("Z(N)");
                }
                Ok(bound_output(&report, kind))
            }
            BoundsCmd::T13 { n, t, epsilon } => {
                let mut report = theorem13_bound(n, t, &self.bound_ctx(epsilon))?;
                let mut kind = Value::Null;
                if let Some((c, p)) = self.exact_core(n, t)? {
                    let proxy = c * &p[(n - t) as usize];
                    report = report.with_comparison(LogReal::from_biguint(&proxy));
                    kind = json!("c_t(N)*p(N-t)");
                }
                Ok(bound_output(&report, kind))
            }
            BoundsCmd::P32 { n, t, epsilon, ref regime } => {
                let regime = match regime {
                    Some(r) => Some(Regime::parse(r).ok_or_else(|| usage(format!("unknown regime `{r}`")))?),
                    None => None,
                };
                let mut report = prop32_bound(n, t, &self.bound_ctx(epsilon), regime)?;
                let mut kind = Value::Null;
                if let Some((c, _)) = self.exact_core(n, t)? {
                    report = report.with_comparison(LogReal::from_biguint(&c));
                    kind = json!("c_t(N)");
                }
                Ok(bound_output(&report, kind))
            }
            BoundsCmd::Saddle { n, t } => {
                let s = solve_saddle(n, t, self.cli.tol)?;
                let main = (t <= n).then(|| asymptotic::saddle::tyler_main_term(&s).ln());
                let mut fields = Map::new();
                fields.insert("N".into(), json!(n));
                fields.insert("t".into(), json!(t));
                fields.insert("y".into(), real(s.y));
                fields.insert("bracket_lo".into(), real(s.bracket_lo));
                fields.insert("bracket_hi".into(), real(s.bracket_hi));
                fields.insert("residual".into(), real(s.residual));
                fields.insert("log_lo_offset".into(), real(s.lo_offset.ln()));
                fields.insert("log_hi_offset".into(), real(s.hi_offset.ln()));
                fields.insert("strictly_inside".into(), json!(s.strictly_inside()));
                fields.insert("relative_residual".into(), real(s.relative_residual()));
                fields.insert("ty_regime".into(), json!(s.ty_regime.name()));
                fields.insert("log_tyler_ct".into(), opt_real(main));
                Ok(Output::Record { schema: "saddle", fields })
            }
        }
    }

    fn run_density(&self, args: &DensityArgs, seed: u64) -> Result<Output, Failure> {
        let opts = DensityOptions {
            guard: args.mc_max_n,
            step_budget: args.step_budget,
            ..DensityOptions::default()
        };
        let estimate = |n| -> Result<Map<String, Value>, Failure> {
            let e = estimate_zero_density_with(n, args.samples, seed, opts)?;
            Ok(density_fields(&e))
        };
        match (&args.n, &args.n_list) {
            (Some(n), _) => Ok(Output::Record { schema: "density", fields: estimate(*n)? }),
            (None, Some(list)) => Ok(Output::Rows {
                schema: "density_batch",
                rows: list.iter().map(|&n| estimate(n)).collect::<Result<_, _>>()?,
            }),
            (None, None) => Err(usage("one of --n or --n-list is required")),
        }
    }

    fn run_sweep(&self, list: &[u32]) -> Result<Output, Failure> {
        let ctx = self.bound_ctx(asymptotic::bounds::DEFAULT_EPSILON);
        let mut rows = Vec::with_capacity(list.len());
        for &n in list {
            if n == 0 {
                return Err(usage("sweep values of n must be at least 1"));
            }
            let p = self.count(CountKind::P, n, None)?;
            let lb: BigUint = lower_bound_terms(n).into_iter().sum();
            let z = if n <= self.cli.max_table_n {
                Some(self.census(n)?.total_zeros)
            } else {
                None
            };
            let mut row = Map::new();
            row.insert("N".into(), json!(n));
            row.insert("p_N".into(), big(&p));
            row.insert("lower_bound_sum".into(), big(&lb));
            row.insert("Z".into(), z.as_ref().map_or(Value::Null, big));
            let t12 = (n >= 2).then(|| theorem12_bound(n, &ctx)).transpose()?;
            row.insert("log_t12_bound".into(), opt_real(t12.map(|r| r.bound.ln())));
            let ln_p = LogReal::from_biguint(&p);
            let z_ratio = match (&z, n >= 2) {
                (Some(z), true) => Some(
                    LogReal::from_biguint(z).ratio(ln_p.powf(2.0)) * (n as f64).ln() / 2.0,
                ),
                _ => None,
            };
            row.insert("z_logn_over_2p2".into(), opt_real(z_ratio));
            let lb_ratio = z.as_ref().and_then(|z| {
                (!num_traits::Zero::is_zero(z))
                    .then(|| LogReal::from_biguint(&lb).ratio(LogReal::from_biguint(z)))
            });
            row.insert("lower_bound_over_z".into(), opt_real(lb_ratio));
            row.insert(
                "rademacher_over_p".into(),
                real(rademacher_p(n).ratio(ln_p)),
            );
            let el = if n >= 2 {
                let t_star = ((n as f64).sqrt() * (n as f64).ln() / asymptotic::PARTITION_EXPONENT)
                    .round()
                    .max(1.0) as u32;
                Some(erdos_lehner_pt(n, t_star, &ctx)?.value.ln())
            } else {
                None
            };
            row.insert("log_erdos_lehner_at_x0".into(), opt_real(el));
            rows.push(row);
        }
        Ok(Output::Rows { schema: "sweep", rows })
    }

    fn out_path(&self) -> Option<&Path> {
        if self.out_format().is_some() {
            return None;
        }
        self.raw_out()
    }

    fn emit(&self, output: Output, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
        let format = self.format();
        if self.seed_generated {
            writeln!(err, "{}", json!({"generated_seed": self.seed}))?;
        }
        let mut buf: Vec<u8> = Vec::new();
        match format {
            Format::Json => {
                let doc = self.json_document(output);
                serde_json::to_writer_pretty(&mut buf, &doc).map_err(std::io::Error::other)?;
                buf.push(b'\n');
            }
            Format::Csv => {
                writeln!(err, "{}", json!({"config": self.config()}))?;
                write_csv(output, &mut buf)?;
            }
            Format::Human => {
                for (k, v) in self.config().as_object().unwrap() {
                    writeln!(buf, "# {k} = {v}")?;
                }
                write_human(output, &mut buf)?;
            }
        }
        match self.out_path() {
            Some(path) => std::fs::write(path, &buf)?,
            None => out.write_all(&buf)?,
        }
        Ok(())
    }

    fn json_document(&self, output: Output) -> Value {
        let mut doc = Map::new();
        let (schema, body) = match output {
            Output::Record { schema, fields } => (schema, fields),
            Output::Rows { schema, rows } => {
                let mut m = Map::new();
                m.insert("rows".into(), Value::Array(rows.into_iter().map(Value::Object).collect()));
                (schema, m)
            }
            Output::Table(table) => {
                let mut m = Map::new();
                m.insert("N".into(), json!(table.n()));
                m.insert(
                    "partitions".into(),
                    json!(table.partitions().iter().map(|p| p.to_string()).collect::<Vec<_>>()),
                );
                let values: Vec<Vec<String>> = table
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|v| v.to_string()).collect())
                    .collect();
                m.insert("values".into(), json!(values));
                ("char_table", m)
            }
        };
        doc.insert("schema".into(), json!(format!("charcensus.{schema}.{SCHEMA_VERSION}")));
        doc.insert("config".into(), self.config());
        doc.extend(body);
        Value::Object(doc)
    }
}

fn bound_output(r: &BoundReport, comparison_kind: Value) -> Output {
    let mut fields = Map::new();
    fields.insert("N".into(), json!(r.n));
    fields.insert("t".into(), json!(r.t));
    fields.insert("regime".into(), json!(r.regime.name()));
    fields.insert("log_bound".into(), real(r.bound.ln()));
    fields.insert("log_exact".into(), opt_real(r.comparison.map(|c| c.ln())));
    fields.insert("ratio".into(), opt_real(r.ratio));
    fields.insert("p_source".into(), json!(r.p_source.map(|s| s.name())));
    fields.insert("comparison".into(), comparison_kind);
    Output::Record { schema: "bound_report", fields }
}

fn density_fields(e: &DensityEstimate) -> Map<String, Value> {
    match serde_json::to_value(e).expect("estimate serializes") {
        Value::Object(mut m) => {
            // seeds above 2^53 must survive JSON readers
            m.insert("seed".into(), json!(e.seed.to_string()));
            m
        }
        _ => unreachable!(),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn flat_rows(output: &Output) -> Vec<Vec<(String, String)>> {
    let maps: Vec<&Map<String, Value>> = match output {
        Output::Record { fields, .. } => vec![fields],
        Output::Rows { rows, .. } => rows.iter().collect(),
        Output::Table(_) => unreachable!("tables are encoded directly"),
    };
    maps.into_iter()
        .map(|m| {
            let mut cells = Vec::new();
            flatten("", &Value::Object(m.clone()), &mut cells);
            cells
        })
        .collect()
}

fn write_csv(output: Output, buf: &mut Vec<u8>) -> Result<(), Failure> {
    if let Output::Table(table) = &output {
        return table
            .write_csv(buf)
            .map_err(|e| Failure::from(std::io::Error::other(e)));
    }
    let rows = flat_rows(&output);
    let mut w = csv::Writer::from_writer(buf);
    let csv_err = |e: csv::Error| Failure::from(std::io::Error::other(e));
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| k)).map_err(csv_err)?;
    }
    for row in &rows {
        w.write_record(row.iter().map(|(_, v)| v)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_human(output: Output, buf: &mut Vec<u8>) -> Result<(), Failure> {
    if let Output::Table(table) = &output {
        let labels: Vec<String> = table.partitions().iter().map(|p| p.to_string()).collect();
        let width = table
            .rows()
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .chain(labels.iter().map(|l| l.len()))
            .max()
            .unwrap_or(1);
        write!(buf, "{:>width$}", "")?;
        for l in &labels {
            write!(buf, " {l:>width$}")?;
        }
        writeln!(buf)?;
        for (l, row) in labels.iter().zip(table.rows()) {
            write!(buf, "{l:>width$}")?;
            for v in row {
                write!(buf, " {:>width$}", v.to_string())?;
            }
            writeln!(buf)?;
        }
        return Ok(());
    }
    for (i, row) in flat_rows(&output).iter().enumerate() {
        if i > 0 {
            writeln!(buf)?;
        }
        for (k, v) in row {
            writeln!(buf, "{k}: {v}")?;
        }
    }
    Ok(())
}
