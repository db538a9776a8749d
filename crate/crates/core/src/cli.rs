//! Command-line front end: argument parsing, verification suites and report
//! rendering. The binary only forwards `std::env::args` to [`run`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{self, CompressionBoundInput, ScaleSchedule, TruncatedFunctionSpace};
use crate::codes::{self, make_code, Code, DnSubspace, DEFAULT_CODE_ATTEMPTS};
use crate::distortion::{self, SdpParams};
use crate::error::{Error, Result};
use crate::gf2::{Gf2Subspace, Gf2Vec, Universe, Z6Vec, DEFAULT_COSET_BUDGET};
use crate::groups::{self, BallCache, GroupPresentation, DEFAULT_BFS_BUDGET};
use crate::tsmetric::{self, CubeFn, FiniteMetricSpace, HammingZ6, PinnedSpace, SearchBudget, DEFAULT_SEARCH_NODES, DEFAULT_TSP_CAP};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "wreathbench", version, about = "Finite checks for wreath-product compression constructions")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Budgets, seed and output settings shared by every command. Each flag can
/// also be set through the environment variable named in its help.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Largest word ball explored by breadth-first search.
    #[arg(long, global = true, env = "WREATHBENCH_BUDGET_BFS", default_value_t = DEFAULT_BFS_BUDGET, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub budget_bfs: usize,
    /// Largest support handed to exact TSP.
    #[arg(long, global = true, env = "WREATHBENCH_BUDGET_TSP", default_value_t = DEFAULT_TSP_CAP, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub budget_tsp: usize,
    /// Largest metric space handed to the distortion solver.
    #[arg(long, global = true, env = "WREATHBENCH_BUDGET_SDP", default_value_t = distortion::DEFAULT_SDP_CAP, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub budget_sdp: usize,
    /// Largest subspace enumerated element by element.
    #[arg(long, global = true, env = "WREATHBENCH_BUDGET_COSET", default_value_t = DEFAULT_COSET_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_coset: u64,
    #[arg(long, global = true, env = "WREATHBENCH_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory for cached word balls.
    #[arg(long, global = true, env = "WREATHBENCH_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, env = "WREATHBENCH_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "WREATHBENCH_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one verification suite.
    Verify(VerifyArgs),
    /// Euclidean distortion of a metric file or a generated cube quotient.
    Distortion(DistortionArgs),
    /// Compression upper bound from a stage table.
    Bound {
        file: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    AProperty,
    TsClosedForm,
    TsSandwich,
    KappaIdentity,
    RMap,
    LinIndep,
    LambdaSandwich,
    Equidist,
    QuotientRealizability,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::AProperty => "a-property",
            Suite::TsClosedForm => "ts-closed-form",
            Suite::TsSandwich => "ts-sandwich",
            Suite::KappaIdentity => "kappa-identity",
            Suite::RMap => "r-map",
            Suite::LinIndep => "lin-indep",
            Suite::LambdaSandwich => "lambda-sandwich",
            Suite::Equidist => "equidist",
            Suite::QuotientRealizability => "quotient-realizability",
        }
    }
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    Suite::value_variants()
        .iter()
        .copied()
        .find(|l| l.name() == s)
        .ok_or_else(|| {
            let names: Vec<&str> = Suite::value_variants().iter().map(|l| l.name()).collect();
            format!("unknown suite {s:?}; expected one of {}", names.join(", "))
        })
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    /// Code length.
    #[arg(long)]
    pub d: Option<usize>,
    /// Code dimension.
    #[arg(long)]
    pub dimc: Option<usize>,
    /// Minimum-distance floor for generated codes.
    #[arg(long, default_value_t = 2)]
    pub floor: usize,
    /// Schedule file for `lin-indep` and `lambda-sandwich`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Sample count for randomized suites.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct DistortionArgs {
    /// Metric file.
    #[arg(long, conflicts_with = "code")]
    pub file: Option<PathBuf>,
    /// Generated quotient, as `d=<n> dimc=<k>`.
    #[arg(long, num_args = 1..=2)]
    pub code: Vec<String>,
    #[arg(long, default_value_t = 2)]
    pub floor: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => EXIT_PASS,
            Verdict::Fail => EXIT_FAIL,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn from_rows(pass: bool, inconclusive: bool) -> Verdict {
        if inconclusive {
            Verdict::Inconclusive
        } else if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Line-oriented report. Rendered with a `#`-prefixed header carrying the
/// tool version, command, seed, budgets and wall time.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<(String, String)>,
    pub verdict: Verdict,
}

impl Report {
    fn new(command: impl Into<String>, columns: &[&str]) -> Self {
        Report {
            command: command.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, cfg: &RunConfig, wall: Duration) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: wreathbench {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# seed: {}", cfg.seed);
        let _ = writeln!(out, "# budgets: bfs={} tsp={} sdp={} coset={}", cfg.budget_bfs, cfg.budget_tsp, cfg.budget_sdp, cfg.budget_coset);
        let _ = writeln!(out, "# wall_time_s: {:.3}", wall.as_secs_f64());
        match cfg.format {
            Format::Text => {
                let _ = writeln!(out, "{}", self.columns.join("\t"));
                for r in &self.rows {
                    let _ = writeln!(out, "{}", r.join("\t"));
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
                w.write_record(&self.columns).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
                out.push_str(&String::from_utf8_lossy(&bytes));
            }
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "# verdict: {}", self.verdict.label());
        Ok(out)
    }
}

/// Exit code for an error: parse and input problems are usage errors,
/// exhausted budgets are inconclusive.
pub fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } | Error::CodeSearchExhausted { .. } => EXIT_INCONCLUSIVE,
        Error::Parse { .. } | Error::InvalidInput(_) | Error::DimensionMismatch(_) | Error::CrossPresentation { .. } => EXIT_USAGE,
        Error::NotRealizable { .. } => EXIT_FAIL,
    }
}

fn search_budget(cfg: &RunConfig) -> SearchBudget {
    SearchBudget {
        tsp_cap: cfg.budget_tsp,
        nodes: DEFAULT_SEARCH_NODES,
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn yes(b: bool) -> String {
    if b { "pass" } else { "fail" }.to_string()
}

fn generated_code(cfg: &RunConfig, d: usize, dimc: usize, floor: usize) -> Result<Code> {
    make_code(d, dimc, cfg.seed, floor, DEFAULT_CODE_ATTEMPTS)
}

fn verify_a_property() -> Report {
    let rep = assembly::check_a_property();
    let mut out = Report::new("verify a-property", &["mask", "combination", "equals_ones"]);
    for r in &rep.rows {
        let bits: String = r.values.iter().map(|&b| if b { '1' } else { '0' }).collect();
        out.row(vec![format!("{:03b}", r.mask), bits, r.equals_ones.to_string()]);
    }
    out.note("period_three", rep.period_three);
    out.note("distinct_translates", rep.distinct_translates);
    out.verdict = Verdict::from_rows(rep.holds(), false);
    out
}

fn verify_ts_closed_form(cfg: &RunConfig) -> Result<Report> {
    let n = 4;
    let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(n));
    let mut out = Report::new("verify ts-closed-form", &["support", "ts", "expected", "result"]);
    let mut ok = true;
    for mask in 1u32..1 << n {
        let u = CubeFn::from_points((0..n).filter(|i| mask >> i & 1 == 1).map(|i| Z6Vec::basis(n, i)));
        let ts = tsmetric::ts_pinned(&ps, &CubeFn::zero(), &u, cfg.budget_tsp)?;
        let expected = 2.0 * u.len() as f64 + 1.0;
        ok &= ts == expected;
        out.row(vec![u.to_string(), ts.to_string(), expected.to_string(), yes(ts == expected)]);
    }
    out.verdict = Verdict::from_rows(ok, false);
    Ok(out)
}

fn verify_ts_sandwich(cfg: &RunConfig) -> Result<Report> {
    let u = Universe::indexed(4);
    let mut out = Report::new("verify ts-sandwich", &["group", "elements", "pairs", "min_ratio", "max_ratio", "violations"]);
    let mut ok = true;
    for v in [None, Some(Gf2Subspace::span(&u, [Gf2Vec::ones(&u)])?)] {
        let rep = tsmetric::approx_by_ts_sandwich(4, v, cfg.budget_bfs)?;
        ok &= rep.pass();
        out.row(vec![
            rep.group.clone(),
            rep.elements.to_string(),
            rep.pairs.to_string(),
            rep.min_ratio.to_string(),
            rep.max_ratio.to_string(),
            rep.violations.len().to_string(),
        ]);
    }
    out.verdict = Verdict::from_rows(ok, false);
    Ok(out)
}

fn verify_kappa(cfg: &RunConfig, args: &VerifyArgs) -> Result<Report> {
    let (d, dimc) = (args.d.unwrap_or(4), args.dimc.unwrap_or(2));
    let code = generated_code(cfg, d, dimc, args.floor)?;
    let dn = DnSubspace::new(code.clone())?;
    let rows = codes::kappa_identity_check(&dn, search_budget(cfg))?;
    let mut out = Report::new("verify kappa-identity", &["a", "b", "lhs", "rhs", "result"]);
    let mut ok = true;
    for r in &rows {
        ok &= r.pass();
        out.row(vec![r.a.to_bit_string(), r.b.to_bit_string(), r.lhs.to_string(), r.rhs.to_string(), yes(r.pass())]);
    }
    out.note("code_c", code.c().basis().iter().map(Gf2Vec::to_bit_string).collect::<Vec<_>>().join(" "));
    out.note("min_distance", code.min_distance());
    out.verdict = Verdict::from_rows(ok, false);
    Ok(out)
}

fn verify_r_map(cfg: &RunConfig, args: &VerifyArgs) -> Result<Report> {
    let n = 2;
    let u = Universe::indexed(n);
    let functionals: Vec<Gf2Vec> = (0..1usize << n).map(|m| Gf2Vec::from_indices(&u, (0..n).filter(|i| m >> i & 1 == 1))).collect();
    let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(n));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Report::new("verify r-map", &["sample", "w", "r_w", "pairings", "ts_w", "ts_r_w", "result"]);
    let mut ok = true;
    for k in 0..args.samples {
        let size = rng.random_range(1..=4);
        let w = CubeFn::from_points((0..size).map(|_| Z6Vec::new((0..n).map(|_| rng.random_range(0..6u8)))));
        let rw = codes::reduce_r(n, &w);
        let mut pairs_ok = true;
        for a in &functionals {
            pairs_ok &= codes::pair_with_l(a, &w)? == codes::pair_with_l(a, &rw)?;
        }
        let tw = tsmetric::ts_pinned(&ps, &CubeFn::zero(), &w, cfg.budget_tsp)?;
        let trw = tsmetric::ts_pinned(&ps, &CubeFn::zero(), &rw, cfg.budget_tsp)?;
        let pass = pairs_ok && tw >= trw;
        ok &= pass;
        out.row(vec![k.to_string(), w.to_string(), rw.to_string(), yes(pairs_ok), tw.to_string(), trw.to_string(), yes(pass)]);
    }
    out.verdict = Verdict::from_rows(ok, false);
    Ok(out)
}

fn default_two_stage() -> Result<ScaleSchedule> {
    ScaleSchedule::new(vec![(vec![1], 2, None), (vec![16], 17, None)])
}

fn default_lambda_schedule() -> Result<ScaleSchedule> {
    ScaleSchedule::new(vec![(vec![10, 50], 11, None)])
}

fn load_schedule(args: &VerifyArgs, default: fn() -> Result<ScaleSchedule>) -> Result<ScaleSchedule> {
    match &args.schedule {
        Some(p) => ScaleSchedule::from_text(&read_file(p)?),
        None => default(),
    }
}

fn verify_lin_indep(args: &VerifyArgs) -> Result<Report> {
    let schedule = load_schedule(args, default_two_stage)?;
    let space = TruncatedFunctionSpace::for_schedule(&schedule)?;
    let subspaces = (1..=schedule.stages().len())
        .map(|n| assembly::build_truncated_un(&space, &schedule, n, None, true))
        .collect::<Result<Vec<_>>>()?;
    let rep = assembly::verify_lin_indep(&space, &subspaces)?;
    let mut out = Report::new("verify lin-indep", &["stage", "dim"]);
    for (k, d) in rep.dims.iter().enumerate() {
        out.row(vec![(k + 1).to_string(), d.to_string()]);
    }
    out.note("window", format!("{:?}", schedule.window()));
    out.note("coordinates", space.len());
    out.note("sum_dim", rep.sum_dim);
    out.note("independent", rep.independent);
    out.note("ones_in_sum", rep.ones_in_sum);
    out.note("growth_ok", schedule.growth_ok(assembly::DEFAULT_GROWTH_FACTOR, 0.0));
    out.verdict = Verdict::from_rows(rep.pass(), false);
    Ok(out)
}

fn verify_lambda(cfg: &RunConfig, args: &VerifyArgs) -> Result<Report> {
    let schedule = load_schedule(args, default_lambda_schedule)?;
    let stage = schedule.stage(1)?;
    let d = args.d.unwrap_or(stage.points.len());
    let code = generated_code(cfg, d, args.dimc.unwrap_or(1), args.floor)?;
    let dn = DnSubspace::new(code)?;
    let pairs = assembly::coset_pairs(&dn);
    let rep = assembly::lambda_embedding_check(&schedule, 1, &dn, &pairs, search_budget(cfg))?;
    let mut out = Report::new("verify lambda-sandwich", &["left", "right", "lhs", "rhs", "ratio", "slices", "member", "result"]);
    for r in &rep.rows {
        let res = if r.inconclusive {
            "inconclusive".to_string()
        } else {
            yes(r.member_check && r.sandwich_holds(rep.r, rep.m))
        };
        out.row(vec![
            r.left.to_string(),
            r.right.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.ratio.to_string(),
            r.slices.to_string(),
            r.member_check.to_string(),
            res,
        ]);
    }
    out.note("r", rep.r);
    out.note("M", rep.m);
    out.note("certified_floor", rep.certified_floor);
    out.verdict = Verdict::from_rows(rep.pass(), rep.inconclusive() > 0);
    Ok(out)
}

fn verify_equidist(cfg: &RunConfig) -> Result<Report> {
    let (r, m, want) = (2u32, 3u32, 8usize);
    let g = GroupPresentation::lamplighter(2)?;
    let ball = match &cfg.cache_dir {
        Some(dir) => BallCache::new(dir).get_or_compute(&g, 2 * m * r, cfg.budget_bfs)?,
        None => groups::word_ball(&g, 2 * m * r, cfg.budget_bfs)?,
    };
    let set = groups::equidistant_set_in(&g, &ball, r, m, want)?;
    let window = groups::check_equidistant_window_in(&g, &ball, &set.points, r, m)?;
    let profile = groups::annulus_packing_profile_in(&g, &ball, r, m)?;
    let mut out = Report::new("verify equidist", &["index", "point"]);
    for (k, p) in set.points.iter().enumerate() {
        out.row(vec![k.to_string(), p.to_string()]);
    }
    out.note("r", r);
    out.note("M", m);
    out.note("window_check", window);
    out.note("annulus_size", profile.annulus_size);
    out.note("packing_size", profile.packing_size);
    out.note("growth_constant", profile.growth_constant);
    out.verdict = Verdict::from_rows(set.complete && window && profile.growth_constant > 1.0, false);
    Ok(out)
}

fn verify_quotient_realizability(cfg: &RunConfig, args: &VerifyArgs) -> Result<Report> {
    let (d, dimc) = (args.d.unwrap_or(4), args.dimc.unwrap_or(2));
    let code = generated_code(cfg, d, dimc, args.floor)?;
    let cube = distortion::hamming_cube(d)?;
    let u = code.universe().clone();
    let mut blocks: BTreeMap<Gf2Vec, Vec<usize>> = BTreeMap::new();
    for i in 0..cube.len() {
        let v = Gf2Vec::from_indices(&u, (0..d).filter(|k| i >> (d - 1 - k) & 1 == 1));
        blocks.entry(code.c_perp().coset_leader(&v, cfg.budget_coset)?).or_default().push(i);
    }
    let leaders: Vec<Gf2Vec> = blocks.keys().cloned().collect();
    let partition: Vec<Vec<usize>> = blocks.into_values().collect();
    let q = tsmetric::quotient_metric(&cube, &partition)?;
    let mut out = Report::new("verify quotient-realizability", &["a", "b", "quotient", "coset_distance", "result"]);
    let mut ok = true;
    for i in 0..leaders.len() {
        for j in i + 1..leaders.len() {
            let want = code.quotient_distance(&leaders[i], &leaders[j])? as f64;
            let got = q.dist(i, j);
            ok &= got == want;
            out.row(vec![leaders[i].to_bit_string(), leaders[j].to_bit_string(), got.to_string(), want.to_string(), yes(got == want)]);
        }
    }
    out.verdict = Verdict::from_rows(ok, false);
    Ok(out)
}

fn parse_code_spec(spec: &[String]) -> Result<(usize, usize)> {
    let (mut d, mut k) = (None, None);
    for item in spec.iter().flat_map(|s| s.split_whitespace()) {
        let (key, val) = item.split_once('=').ok_or_else(|| Error::InvalidInput(format!("bad code field {item:?}")))?;
        let val: usize = val.parse().map_err(|_| Error::InvalidInput(format!("bad code field {item:?}")))?;
        match key {
            "d" => d = Some(val),
            "dimc" => k = Some(val),
            _ => return Err(Error::InvalidInput(format!("unknown code field {key:?}"))),
        }
    }
    match (d, k) {
        (Some(d), Some(k)) => Ok((d, k)),
        _ => Err(Error::InvalidInput("--code needs d=<n> dimc=<k>".into())),
    }
}

fn cmd_distortion(cfg: &RunConfig, args: &DistortionArgs) -> Result<Report> {
    let params = SdpParams {
        max_points: cfg.budget_sdp,
        ..SdpParams::default()
    };
    let mut out = Report::new("distortion", &["source", "points", "lower", "upper", "expansion", "residual", "inconclusive"]);
    let (source, space) = match (&args.file, args.code.is_empty()) {
        (Some(p), true) => (p.display().to_string(), FiniteMetricSpace::from_text(&read_file(p)?)?),
        (None, false) => {
            let (d, k) = parse_code_spec(&args.code)?;
            let code = generated_code(cfg, d, k, args.floor)?;
            (format!("d={d} dimc={k}"), codes::cube_quotient_space(&code, cfg.budget_sdp)?)
        }
        _ => return Err(Error::InvalidInput("give exactly one of --file or --code".into())),
    };
    let r = distortion::exact_c2(&space, &params)?;
    out.row(vec![
        source,
        space.len().to_string(),
        format!("{:.6}", r.lower_bound),
        format!("{:.6}", r.upper_bound),
        format!("{:.6}", r.expansion_ratio),
        format!("{:.3e}", r.solver_residual),
        r.inconclusive.to_string(),
    ]);
    out.verdict = Verdict::from_rows(true, r.inconclusive);
    Ok(out)
}

fn cmd_bound(path: &Path) -> Result<Report> {
    let input = CompressionBoundInput::from_text(&read_file(path)?)?;
    let b = assembly::compression_upper_bound(&input)?;
    let mut out = Report::new("bound", &["diam", "r"]);
    for (d, r) in &input.stages {
        out.row(vec![d.to_string(), r.to_string()]);
    }
    out.note("eta", input.eta);
    out.note("L", input.lipschitz);
    out.note("eps_hat", b.eps_hat);
    out.note("bound", b.bound);
    Ok(out)
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Verify(args) => match args.suite {
            Suite::AProperty => Ok(verify_a_property()),
            Suite::TsClosedForm => verify_ts_closed_form(cfg),
            Suite::TsSandwich => verify_ts_sandwich(cfg),
            Suite::KappaIdentity => verify_kappa(cfg, args),
            Suite::RMap => verify_r_map(cfg, args),
            Suite::LinIndep => verify_lin_indep(args),
            Suite::LambdaSandwich => verify_lambda(cfg, args),
            Suite::Equidist => verify_equidist(cfg),
            Suite::QuotientRealizability => verify_quotient_realizability(cfg, args),
        },
        Command::Distortion(args) => cmd_distortion(cfg, args),
        Command::Bound { file } => cmd_bound(file),
    }
}

/// Parses `args`, runs the command, writes the report and returns the exit
/// code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let start = Instant::now();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit_code(&e);
        }
    };
    let text = match report.render(&cli.config, start.elapsed()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit_code(&e);
        }
    };
    match &cli.config.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{text}"),
    }
    report.verdict.exit_code()
}
