//! Subcommands behind the `thinlab` binary.
//!
//! Every `cmd_*` function takes a [`RunConfig`] and returns the text to
//! print, or a [`CliError`] carrying the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thinlab::bounds::check_bounds;
use thinlab::certify::{
    check_consistent, thinness_by_characterization_capped, thinness_by_order_enumeration_capped, Caps, CertifyError,
    Inconsistency,
};
use thinlab::engine::compute_thinness;
use thinlab::layout::{consistent_solution, ConsistentSolution, LayoutError};
use thinlab::tree::{
    gen_complete_mary, gen_path, gen_random_tree, gen_smallest_tree, gen_spider, gen_star, parse_edge_list, Tree,
    TreeError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self::new(EXIT_MALFORMED, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(EXIT_INTERNAL, message)
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::EnumerationCap { .. } => CliError::new(EXIT_CAP, e.to_string()),
            _ => CliError::malformed(e.to_string()),
        }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> Self {
        let code = match e {
            CertifyError::Malformed(_) => EXIT_MALFORMED,
            CertifyError::CapExceeded { .. } => EXIT_CAP,
            CertifyError::Invariant(_) => EXIT_INTERNAL,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<LayoutError> for CliError {
    fn from(e: LayoutError) -> Self {
        match e {
            LayoutError::Parse(_) => CliError::malformed(e.to_string()),
            LayoutError::Tree(t) => t.into(),
            _ => CliError::internal(e.to_string()),
        }
    }
}

/// A compact generator description such as `binary:8` or `random:1000:7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenSpec {
    Binary(usize),
    Mary(usize, usize),
    Smallest(usize),
    /// Size and optional seed; without one the run's `--seed` is used.
    Random(usize, Option<u64>),
    Path(usize),
    Star(usize),
    Spider(Vec<usize>),
}

impl GenSpec {
    pub fn parse(spec: &str) -> Result<GenSpec, CliError> {
        let bad = || CliError::malformed(format!("bad generator spec {spec:?}"));
        let mut parts = spec.split(':');
        let kind = parts.next().unwrap_or_default();
        let nums: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<usize, CliError> { nums.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad) };
        let spec = match (kind, nums.len()) {
            ("binary", 1) => GenSpec::Binary(num(0)?),
            ("mary", 2) => GenSpec::Mary(num(0)?, num(1)?),
            ("smallest", 1) => GenSpec::Smallest(num(0)?),
            ("random", 1) => GenSpec::Random(num(0)?, None),
            ("random", 2) => GenSpec::Random(num(0)?, Some(nums[1].parse().map_err(|_| bad())?)),
            ("path", 1) => GenSpec::Path(num(0)?),
            ("star", 1) => GenSpec::Star(num(0)?),
            ("spider", 1) => {
                GenSpec::Spider(nums[0].split(',').map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?)
            }
            _ => return Err(bad()),
        };
        Ok(spec)
    }

    pub fn build(&self, seed: u64) -> Result<Tree, CliError> {
        let t = match self {
            GenSpec::Binary(h) => gen_complete_mary(2, *h)?,
            GenSpec::Mary(m, h) => gen_complete_mary(*m, *h)?,
            GenSpec::Smallest(k) => gen_smallest_tree(*k)?,
            GenSpec::Random(n, s) => gen_random_tree(*n, s.unwrap_or(seed))?,
            GenSpec::Path(n) => gen_path(*n)?,
            GenSpec::Star(n) => gen_star(*n)?,
            GenSpec::Spider(legs) => gen_spider(legs)?,
        };
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    File(PathBuf),
    Gen(GenSpec),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compute,
    Solve,
    Verify,
    Oracle,
    Generate,
    Bench,
    Bounds,
}

/// Everything a subcommand needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<Input>,
    pub root: usize,
    pub seed: u64,
    pub caps: Caps,
    pub format: Format,
    pub dump_table: bool,
    pub dot: bool,
    pub solution: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub sizes: Vec<usize>,
    pub trials: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            root: 0,
            seed: 0,
            caps: Caps::default(),
            format: Format::Text,
            dump_table: false,
            dot: false,
            solution: None,
            out: None,
            sizes: vec![100_000, 1_000_000],
            trials: 3,
        }
    }

    pub fn with_input(mut self, input: Input) -> Self {
        self.input = Some(input);
        self
    }

    fn tree(&self) -> Result<Tree, CliError> {
        match &self.input {
            Some(Input::File(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
                Ok(parse_edge_list(&text)?)
            }
            Some(Input::Gen(spec)) => spec.build(self.seed),
            None => Err(CliError::malformed("no input: pass --in FILE or --gen SPEC")),
        }
    }

    fn root_for(&self, t: &Tree) -> Result<usize, CliError> {
        if self.root >= t.len() {
            return Err(TreeError::VertexOutOfRange { vertex: self.root, n: t.len() }.into());
        }
        Ok(self.root)
    }
}

/// Prints the thinness, optionally followed by the table of subtree lists.
pub fn cmd_compute(cfg: &RunConfig) -> Result<String, CliError> {
    let t = cfg.tree()?;
    let (k, table) = compute_thinness(&t, cfg.root_for(&t)?)?;
    let mut out = match cfg.format {
        Format::Text => format!("{k}\n"),
        Format::Csv => format!("n,thinness\n{},{k}\n", t.len()),
        Format::Json => format!("{}\n", json!({ "n": t.len(), "thinness": k })),
    };
    if cfg.dump_table {
        out.push_str(&table.to_csv());
    }
    Ok(out)
}

/// Computes an optimal solution and re-verifies it before returning.
pub fn cmd_solve(cfg: &RunConfig) -> Result<String, CliError> {
    let t = cfg.tree()?;
    let root = cfg.root_for(&t)?;
    let (k, table) = compute_thinness(&t, root)?;
    let sol = consistent_solution(&t, root, table)?;
    if let Err(e) = check_consistent(&t, &sol) {
        return Err(CliError::internal(format!("solution failed verification: {e}")));
    }
    if sol.class_count() != k {
        return Err(CliError::internal(format!("solution uses {} classes, thinness is {k}", sol.class_count())));
    }
    Ok(match cfg.format {
        Format::Json => sol.to_json_line(),
        _ => sol.to_text(),
    })
}

/// Checks a solution file against the tree.
pub fn cmd_verify(cfg: &RunConfig) -> Result<String, CliError> {
    let t = cfg.tree()?;
    let path = cfg.solution.as_ref().ok_or_else(|| CliError::malformed("verify needs --sol FILE"))?;
    let text =
        fs::read_to_string(path).map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
    let sol = ConsistentSolution::parse_any(&text)?;
    match check_consistent(&t, &sol) {
        Ok(()) => Ok(format!("ok classes={}\n", sol.class_count())),
        Err(Inconsistency::Violation(v)) => Err(CliError::new(EXIT_VIOLATION, v.to_string())),
        Err(e @ Inconsistency::Malformed(_)) => Err(CliError::malformed(e.to_string())),
    }
}

/// Runs both brute-force oracles and reports whether they agree.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<String, CliError> {
    let t = cfg.tree()?;
    let e = thinness_by_order_enumeration_capped(&t, &cfg.caps)?;
    let c = thinness_by_characterization_capped(&t, &cfg.caps)?;
    let line = format!("enumeration={e} characterization={c} {}\n", if e == c { "agree" } else { "disagree" });
    if e != c {
        return Err(CliError::internal(line.trim_end()));
    }
    Ok(line)
}

/// Edge list (or DOT) of the input tree.
pub fn cmd_generate(cfg: &RunConfig) -> Result<String, CliError> {
    let t = cfg.tree()?;
    Ok(if cfg.dot { t.to_dot() } else { t.to_edge_list() })
}

/// Upper bounds against the computed thinness.
pub fn cmd_bounds(cfg: &RunConfig) -> Result<String, CliError> {
    let t = cfg.tree()?;
    let (k, _) = compute_thinness(&t, cfg.root_for(&t)?)?;
    let report = check_bounds(&t, k);
    Ok(match cfg.format {
        Format::Json => {
            let entries: Vec<_> = report
                .entries
                .iter()
                .map(|e| json!({ "bound": e.name, "value": e.bound, "measured": e.measured, "satisfied": e.satisfied }))
                .collect();
            format!("{}\n", json!(entries))
        }
        _ => report.to_csv(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    /// Minimum over trials, in seconds.
    pub seconds: f64,
    pub thinness: usize,
}

/// Times `compute_thinness` on one random tree per size; tree generation is
/// not timed.
pub fn bench(sizes: &[usize], trials: usize, seed: u64) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let t = gen_random_tree(n, seed)?;
        let mut best = f64::INFINITY;
        let mut thinness = 0;
        for _ in 0..trials.max(1) {
            let start = Instant::now();
            let (k, table) = compute_thinness(&t, 0)?;
            best = best.min(start.elapsed().as_secs_f64());
            drop(table);
            thinness = k;
        }
        rows.push(BenchRow { n, seconds: best, thinness });
    }
    Ok(rows)
}

pub fn cmd_bench(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = bench(&cfg.sizes, cfg.trials, cfg.seed)?;
    let mut out = String::from("n,seconds,thinness\n");
    for r in rows {
        writeln!(out, "{},{:.6},{}", r.n, r.seconds, r.thinness).unwrap();
    }
    Ok(out)
}

pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let text = match cfg.command {
        Command::Compute => cmd_compute(cfg)?,
        Command::Solve => cmd_solve(cfg)?,
        Command::Verify => cmd_verify(cfg)?,
        Command::Oracle => cmd_oracle(cfg)?,
        Command::Generate => cmd_generate(cfg)?,
        Command::Bench => cmd_bench(cfg)?,
        Command::Bounds => cmd_bounds(cfg)?,
    };
    match &cfg.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Debug, Parser)]
#[command(name = "thinlab", version, about = "Exact thinness of trees")]
#[command(
    after_help = "Exit codes: 0 ok, 1 inconsistent solution, 2 malformed input, 3 internal error, 4 cap exceeded.\n\
Oracle caps can be overridden with THINLAB_CAPS, e.g. THINLAB_CAPS=enum=8,char=200,order=1000."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Edge-list file: n on the first line, then one "u v" per line
    #[arg(long = "in", value_name = "FILE", conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// binary:H, mary:M:H, smallest:K, random:N[:SEED], path:N, star:N, spider:L1,L2,...
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    /// Seed for random generators without an explicit seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    input: InputArgs,
    /// Write output to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Print the thinness
    Compute {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        root: usize,
        /// text: the number; csv: columns n,thinness; json: {"n","thinness"}
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Append the per-vertex table as CSV (vertex,thin_list,crit_list)
        #[arg(long)]
        dump_table: bool,
    },
    /// Write an optimal consistent solution
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        root: usize,
        /// text: "order:" and "classes:" lines; json: one object
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a solution file against a tree
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        sol: PathBuf,
    },
    /// Run both brute-force oracles
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Write the tree as an edge list
    Generate {
        #[command(flatten)]
        common: Common,
        /// Graphviz output instead of an edge list
        #[arg(long)]
        dot: bool,
    },
    /// Time the solver on random trees; CSV columns n,seconds,thinness
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "100000,1000000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check the thinness against the upper bounds; CSV columns bound,value,measured,satisfied
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn apply_common(cfg: &mut RunConfig, common: Common) -> Result<(), CliError> {
    let InputArgs { input, gen, seed } = common.input;
    cfg.input = match (input, gen) {
        (Some(path), None) => Some(Input::File(path)),
        (None, Some(spec)) => Some(Input::Gen(GenSpec::parse(&spec)?)),
        _ => return Err(CliError::malformed("pass exactly one of --in and --gen")),
    };
    cfg.seed = seed;
    cfg.out = common.out;
    Ok(())
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let caps = Caps::from_env()?;
        let cfg = match self.command {
            Sub::Compute { common, root, format, dump_table } => {
                let mut cfg = RunConfig { root, format, dump_table, ..RunConfig::new(Command::Compute) };
                apply_common(&mut cfg, common)?;
                cfg
            }
            Sub::Solve { common, root, format } => {
                let mut cfg = RunConfig { root, format, ..RunConfig::new(Command::Solve) };
                apply_common(&mut cfg, common)?;
                cfg
            }
            Sub::Verify { common, sol } => {
                let mut cfg = RunConfig { solution: Some(sol), ..RunConfig::new(Command::Verify) };
                apply_common(&mut cfg, common)?;
                cfg
            }
            Sub::Oracle { common } => {
                let mut cfg = RunConfig::new(Command::Oracle);
                apply_common(&mut cfg, common)?;
                cfg
            }
            Sub::Generate { common, dot } => {
                let mut cfg = RunConfig { dot, ..RunConfig::new(Command::Generate) };
                apply_common(&mut cfg, common)?;
                cfg
            }
            Sub::Bench { sizes, trials, seed, out } => {
                RunConfig { sizes, trials, seed, out, ..RunConfig::new(Command::Bench) }
            }
            Sub::Bounds { common, root, format } => {
                let mut cfg = RunConfig { root, format, ..RunConfig::new(Command::Bounds) };
                apply_common(&mut cfg, common)?;
                cfg
            }
        };
        Ok(RunConfig { caps, ..cfg })
    }
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// exit code, stdout text and stderr text.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { (code, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    match cli.into_config().and_then(|cfg| execute(&cfg)) {
        Ok(out) => (EXIT_OK, out, String::new()),
        Err(e) => (e.code, String::new(), format!("{}\n", e.message)),
    }
}
