// `!(x > y)` is deliberate throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use smooth_margin::boost::{
    compare_steps, run, run_bounded_edge, LearnerSpec, RunConfig, RunOutput, StepRule,
};
use smooth_margin::dynamics::{
    cycle_diagnostics, decay_exponent, detect_cycle, smooth_margin_monotonicity_scan, Recursion,
    CYCLE_TOL, SUPPORT_TOL,
};
use smooth_margin::harness::{
    audit_bounds, audit_corpus, equally_spaced_goals, gen_hypercube, run_bounded_edge_suite,
    run_goal_edge_suite, separable_corpus, spearman, AuditOptions, BoundReport, RhoInfo,
};
use smooth_margin::learners::{BoundedEdgeParams, EdgeScript, OptimalLearner};
use smooth_margin::lp::{brute_force_value, max_margin};
use smooth_margin::trace::{read_trace, write_trace, TraceFormat};
use smooth_margin::{Error, GameMatrix};

const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(name = "smooth-margin", version, about = "Margin-maximizing boosting: run, audit and analyse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a boosting algorithm and write its trace
    Run(RunArgs),
    /// Solve for the maximum margin of a matrix
    Lp(LpArgs),
    /// Run AdaBoost and look for a periodic cycle of its weights
    Cycle(CycleArgs),
    /// Iterate the smooth-margin recursion under scripted edges
    Simulate(SimulateArgs),
    /// Run an experiment suite
    Suite(SuiteArgs),
    /// Audit a trace file against the convergence bounds
    Audit(AuditArgs),
}

#[derive(Args, Clone)]
struct MatrixSource {
    /// Game matrix file: header "m n", then m rows of ±1 entries
    #[arg(long, conflicts_with = "gen")]
    matrix: Option<PathBuf>,
    /// Generate the matrix instead of reading it
    #[arg(long, value_enum)]
    gen: Option<Generator>,
    /// Examples (training points, or bounded-edge m)
    #[arg(long, default_value_t = 60)]
    m: usize,
    #[arg(long, default_value_t = 80)]
    dim: usize,
    #[arg(long, default_value_t = 11)]
    ksignal: usize,
    #[arg(long, default_value_t = 2000)]
    n_test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Hypercube,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LearnerKind {
    Optimal,
    GoalEdge,
    BoundedEdge,
    Script,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

impl From<Format> for TraceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TraceFormat::Csv,
            Format::Jsonl => TraceFormat::JsonLines,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, default_value = "adaboost", value_parser = parse_rule)]
    rule: StepRule,
    #[arg(long, value_enum, default_value = "optimal")]
    learner: LearnerKind,
    /// Goal edge for the goal-edge learner
    #[arg(long)]
    goal: Option<f64>,
    #[command(flatten)]
    bounded: BoundedArgs,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Apply the rule from the first step instead of running AdaBoost until G > 0
    #[arg(long)]
    no_g_switch: bool,
    /// Stop once rho - mu <= this
    #[arg(long)]
    stop_eps: Option<f64>,
    /// Allow AdaBoost on data that is not separable
    #[arg(long)]
    allow_nonseparable: bool,
    /// Compare the Algorithm 1, Algorithm 2 and AdaBoost steps at every state
    #[arg(long)]
    compare_steps: bool,
}

#[derive(Args)]
struct BoundedArgs {
    #[arg(long, default_value_t = 0.3)]
    rho_bar: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Ratio cap; defaults to the smallest admissible value
    #[arg(long)]
    phi: Option<f64>,
}

impl BoundedArgs {
    fn params(&self, m: usize) -> Result<BoundedEdgeParams, Error> {
        match self.phi {
            Some(phi) => BoundedEdgeParams::new(self.rho_bar, self.sigma, phi, m),
            None => BoundedEdgeParams::with_min_phi(self.rho_bar, self.sigma, m),
        }
    }
}

#[derive(Args)]
struct LpArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Also evaluate the barycentric grid of this resolution (n <= 4)
    #[arg(long)]
    brute_grid: Option<usize>,
}

#[derive(Args)]
struct CycleArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long, default_value_t = CYCLE_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_period: usize,
    #[arg(long, default_value_t = SUPPORT_TOL)]
    support_tol: f64,
    /// Edges closer than this count as equal
    #[arg(long, default_value_t = 1e-9)]
    edge_tol: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    g0: f64,
    #[arg(long, default_value_t = 1.0)]
    s0: f64,
    #[arg(long, default_value_t = 1_000_000)]
    steps: usize,
    #[arg(long, default_value = "alg2", value_parser = parse_rule)]
    rule: StepRule,
    /// Edge file, one per line; defaults to the constant edge rho
    #[arg(long)]
    script: Option<PathBuf>,
    /// Repeat the script instead of stopping at its end
    #[arg(long)]
    cyclic: bool,
    /// Output rows t,s,g,x
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    fit_lo: Option<f64>,
    #[arg(long)]
    fit_hi: Option<f64>,
}

#[derive(Args)]
struct SuiteArgs {
    #[command(subcommand)]
    which: SuiteKind,
}

#[derive(Subcommand)]
enum SuiteKind {
    /// Goal-edge AdaBoost trials on a hypercube dataset
    GoalEdge {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long, default_value_t = 8)]
        goals: usize,
        /// Largest goal; defaults to the best edge under uniform weights
        #[arg(long)]
        goal_max: Option<f64>,
        #[arg(long, default_value_t = 3000)]
        iters: usize,
        #[arg(long, default_value_t = 250)]
        tail: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// AdaBoost against the bounded-edge learner
    BoundedEdge {
        #[command(flatten)]
        bounded: BoundedArgs,
        #[arg(long, default_value_t = 60)]
        m: usize,
        #[arg(long, default_value_t = 20_000)]
        iters: usize,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        tail_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound audits on a random separable corpus
    Corpus {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        max_m: usize,
        #[arg(long, default_value_t = 30)]
        max_n: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Trace format; inferred from the extension when omitted
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_parser = parse_rule)]
    rule: StepRule,
    /// Matrix the trace was produced on; supplies rho and m
    #[arg(long, conflicts_with_all = ["rho", "rho_bound"])]
    matrix: Option<PathBuf>,
    #[arg(long, conflicts_with = "rho_bound")]
    rho: Option<f64>,
    /// Upper bound on rho when it is not known exactly
    #[arg(long)]
    rho_bound: Option<f64>,
    /// Number of examples, when no matrix is given
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// The trace came from a run without the AdaBoost warm-up
    #[arg(long)]
    no_g_switch: bool,
    /// The learner was not the optimal one, so r >= rho is not checked
    #[arg(long)]
    no_edge_floor: bool,
}

fn parse_rule(s: &str) -> Result<StepRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_USAGE, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_USAGE, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Lp(a) => cmd_lp(a),
        Command::Cycle(a) => cmd_cycle(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Suite(a) => cmd_suite(a),
        Command::Audit(a) => cmd_audit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn load_matrix(source: &MatrixSource) -> Result<GameMatrix, Failure> {
    match (&source.matrix, source.gen) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(text.parse()?)
        }
        (None, Some(Generator::Hypercube)) => {
            Ok(gen_hypercube(source.m, source.dim, source.ksignal, source.n_test, source.seed)?.1)
        }
        (None, None) => Err(usage("give --matrix PATH or --gen hypercube")),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable report"));
}

fn print_final(out: &RunOutput) {
    match out.records.last() {
        Some(last) => {
            println!("iterations: {}", out.records.len());
            println!("final s: {}", last.s);
            println!("final g: {}", last.g);
            println!("final mu: {}", last.mu);
        }
        None => println!("iterations: 0"),
    }
    match out.t_tilde {
        Some(t) => println!("first positive G at t = {t}"),
        None => println!("G never became positive"),
    }
    if let (Some(rho), Some(last)) = (out.rho, out.records.last()) {
        println!("rho: {rho}");
        println!("rho - mu: {}", rho - last.mu);
    }
    println!("stop: {:?}", out.stop);
}

fn cmd_run(a: RunArgs) -> CliResult {
    if let Some(eps) = a.stop_eps {
        if !(eps > 0.0) {
            return Err(usage("--stop-eps must be positive"));
        }
    }
    if a.learner == LearnerKind::GoalEdge && a.goal.is_none() {
        return Err(usage("--learner goal-edge needs --goal"));
    }
    if a.learner != LearnerKind::GoalEdge && a.goal.is_some() {
        return Err(usage("--goal only applies to --learner goal-edge"));
    }
    if a.compare_steps
        && !matches!(a.rule, StepRule::CoordinateAscent | StepRule::ApproxCoordinateAscent)
    {
        return Err(usage("--compare-steps needs --rule alg1 or alg2"));
    }
    let mut cfg = RunConfig::new(a.rule, a.iters);
    cfg.g_switch = !a.no_g_switch;
    cfg.stop_eps = a.stop_eps;
    cfg.seed = a.source.seed;
    cfg.allow_nonseparable = a.allow_nonseparable;

    let out = match a.learner {
        LearnerKind::Script => {
            return Err(usage(
                "the script learner has no matrix; use the simulate command",
            ))
        }
        LearnerKind::BoundedEdge => {
            if a.source.matrix.is_some() || a.source.gen.is_some() {
                return Err(usage("the bounded-edge learner generates its own columns; drop --matrix/--gen"));
            }
            let params = a.bounded.params(a.source.m)?;
            run_bounded_edge(params, &cfg, |_| {})?
        }
        LearnerKind::Optimal | LearnerKind::GoalEdge => {
            let matrix = load_matrix(&a.source)?;
            cfg.learner = match a.goal {
                Some(goal) => LearnerSpec::GoalEdge(goal),
                None => LearnerSpec::Optimal,
            };
            run(&matrix, &cfg)?
        }
    };
    if let Some(path) = &a.trace {
        write_trace(create(path)?, &out.records, a.format.into())?;
    }
    print_final(&out);
    if a.compare_steps {
        report_step_comparison(&out)?;
    }
    Ok(())
}

/// Restarts Algorithm 1, Algorithm 2 and AdaBoost from every state of the
/// run past the warm-up and compares their steps.
fn report_step_comparison(out: &RunOutput) -> CliResult {
    let Some(tt) = out.t_tilde else {
        println!("compare-steps: G never became positive");
        return Ok(());
    };
    let (mut states, mut ordered) = (0usize, 0usize);
    let mut max_excess: f64 = 0.0;
    for w in out.records.windows(2) {
        let (prev, rec) = (&w[0], &w[1]);
        if rec.t < tt || prev.g <= 0.0 {
            continue;
        }
        let c = compare_steps(prev.s, prev.g, rec.r)?;
        states += 1;
        if c.alg1 <= c.alg2 && c.alg2 <= c.ada {
            ordered += 1;
        }
        max_excess = max_excess.max(c.ada - c.alg2);
    }
    println!("compare-steps: {ordered}/{states} states with alg1 <= alg2 <= adaboost");
    println!("compare-steps: max adaboost - alg2 step: {max_excess}");
    Ok(())
}

fn cmd_lp(a: LpArgs) -> CliResult {
    let matrix = load_matrix(&a.source)?;
    let sol = max_margin(&matrix);
    println!("rho: {}", sol.rho);
    println!("gap: {:e}", sol.gap);
    println!("lambda*: {}", join(&sol.lambda_star));
    println!("d*: {}", join(&sol.d_star));
    println!("separable: {}", sol.is_separable());
    if let Some(grid) = a.brute_grid {
        println!("grid value: {}", brute_force_value(&matrix, grid)?);
    }
    Ok(())
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_cycle(a: CycleArgs) -> CliResult {
    let matrix = load_matrix(&a.source)?;
    let mut cfg = RunConfig::new(StepRule::AdaBoost, a.iters);
    cfg.allow_nonseparable = true;
    let mut d_trace = Vec::with_capacity(a.iters);
    let out = smooth_margin::boost::run_with(&OptimalLearner { matrix: &matrix }, &cfg, |v| {
        d_trace.push(v.weights.clone())
    })?;
    let Some(skeleton) = detect_cycle(&d_trace, a.tol, a.max_period) else {
        println!("no cycle with period <= {} at tolerance {}", a.max_period, a.tol);
        return Ok(());
    };
    let report = cycle_diagnostics(&matrix, &out.records, &d_trace, skeleton, a.support_tol, a.edge_tol)?;
    let tail: Vec<f64> = out.records[skeleton.start..].iter().map(|r| r.g).collect();
    println!("period: {}", report.period);
    println!("start: {}", report.start);
    println!("equal edges: {}", report.equal_edges);
    println!("tau consistent: {}", report.tau_consistent);
    println!("max condition residual: {:e}", report.max_residual());
    println!("smooth margin changes on the cycle: {:?}", smooth_margin_monotonicity_scan(&tail));
    print_json(&report);
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    let script = match &a.script {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let EdgeScript::Finite(edges) = text.parse::<EdgeScript>()? else {
                unreachable!("parsed scripts are finite")
            };
            if a.cyclic { EdgeScript::cyclic(edges)? } else { EdgeScript::finite(edges)? }
        }
        None => EdgeScript::constant(a.rho)?,
    };
    let mut rec = Recursion::new(a.rule, &script, a.rho, a.g0, a.s0)?;
    let mut sink = a.out.as_deref().map(create).transpose()?;
    if let Some(w) = sink.as_mut() {
        writeln!(w, "t,s,g,x")?;
    }
    let fit_lo = a.fit_lo.unwrap_or(1e3);
    let fit_hi = a.fit_hi.unwrap_or(a.steps as f64);
    let mut points = Vec::new();
    let mut last = rec.state();
    for _ in 0..a.steps {
        last = rec.step()?;
        if let Some(w) = sink.as_mut() {
            writeln!(w, "{},{},{},{}", last.t, last.s, last.g, last.x)?;
        }
        let t = last.t as f64;
        if t >= fit_lo && t <= fit_hi {
            points.push((t, last.x));
        }
    }
    if let Some(mut w) = sink {
        w.flush()?;
    }
    println!("steps: {}", last.t);
    println!("final s: {}", last.s);
    println!("final g: {}", last.g);
    println!("final x: {}", last.x);
    if fit_hi >= 10.0 * fit_lo && points.len() >= 3 {
        let fit = decay_exponent(&points, (fit_lo, fit_hi))?;
        println!("decay exponent over [{fit_lo}, {fit_hi}]: {}", fit.slope);
        println!("power law: {} (slope drift {})", fit.power_law, fit.slope_drift);
    } else {
        println!("decay exponent: window [{fit_lo}, {fit_hi}] too short to fit");
    }
    Ok(())
}

fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> CliResult {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| usage(e.to_string()))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_suite(a: SuiteArgs) -> CliResult {
    match a.which {
        SuiteKind::GoalEdge { source, goals, goal_max, iters, tail, out } => {
            let (dataset, matrix) =
                gen_hypercube(source.m, source.dim, source.ksignal, source.n_test, source.seed)?;
            let rho = max_margin(&matrix).rho;
            let hi = goal_max.unwrap_or_else(|| {
                let uniform = vec![1.0 / matrix.rows() as f64; matrix.rows()];
                matrix.edges(&uniform).into_iter().fold(f64::NEG_INFINITY, f64::max)
            });
            let trials = run_goal_edge_suite(&dataset, &matrix, &equally_spaced_goals(rho, hi, goals), iters, tail)?;
            println!("rho: {rho}");
            for t in &trials {
                print_json(t);
            }
            let mu: Vec<f64> = trials.iter().map(|t| t.final_margin).collect();
            let err: Vec<f64> = trials.iter().map(|t| t.test_error).collect();
            match spearman(&mu, &err) {
                Some(c) => println!("spearman(final margin, test error): {c}"),
                None => println!("spearman(final margin, test error): undefined"),
            }
            if let Some(path) = out {
                write_json_lines(&path, &trials)?;
            }
            Ok(())
        }
        SuiteKind::BoundedEdge { bounded, m, iters, delta, tail_fraction, out } => {
            let params = bounded.params(m)?;
            let rep = run_bounded_edge_suite(params, iters, delta, tail_fraction)?;
            print_json(&rep);
            if let Some(path) = out {
                write_trace(create(&path)?, &rep.output.records, TraceFormat::Csv)?;
            }
            if rep.passed(params.rho_bar()) {
                println!("PASS");
                Ok(())
            } else {
                Err(Failure { code: EXIT_VIOLATION, msg: "bounded-edge checks failed".into() })
            }
        }
        SuiteKind::Corpus { count, max_m, max_n, iters, seed, eps, out } => {
            let corpus = separable_corpus(seed, count, max_m, max_n, 0.0);
            let runs = audit_corpus(&corpus, &StepRule::ALL, iters, eps, None)?;
            let failed = runs.iter().filter(|r| !r.report.passed()).count();
            for r in &runs {
                println!(
                    "matrix {} rule {}: {} ({} checks)",
                    r.index,
                    r.rule,
                    if r.report.passed() { "pass" } else { "FAIL" },
                    r.report.checks.iter().map(|c| c.checked).sum::<usize>()
                );
            }
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                for r in &runs {
                    let path = dir.join(format!("matrix{:03}_{}.csv", r.index, r.rule));
                    write_trace(create(&path)?, &r.output.records, TraceFormat::Csv)?;
                }
                let reports: Vec<&BoundReport> = runs.iter().map(|r| &r.report).collect();
                write_json_lines(&dir.join("reports.jsonl"), &reports)?;
            }
            println!("{} of {} runs failed", failed, runs.len());
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure { code: EXIT_VIOLATION, msg: format!("{failed} audited runs failed") })
            }
        }
    }
}

fn cmd_audit(a: AuditArgs) -> CliResult {
    let format = match a.format {
        Some(f) => f.into(),
        None => match a.trace.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => TraceFormat::JsonLines,
            _ => TraceFormat::Csv,
        },
    };
    let file = File::open(&a.trace)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.trace.display())))?;
    let records = read_trace(BufReader::new(file), format)?;
    let (rho, m) = match (&a.matrix, a.rho, a.rho_bound) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let matrix: GameMatrix = text.parse()?;
            (RhoInfo::Exact(max_margin(&matrix).rho), matrix.rows())
        }
        (None, Some(rho), None) => (RhoInfo::Exact(rho), a.m.ok_or_else(|| usage("--rho needs --m"))?),
        (None, None, Some(bound)) => {
            (RhoInfo::UpperBound(bound), a.m.ok_or_else(|| usage("--rho-bound needs --m"))?)
        }
        _ => return Err(usage("give --matrix, --rho or --rho-bound")),
    };
    let mut opts = AuditOptions::new(a.rule, m, rho);
    opts.eps = a.eps;
    opts.g_switch = !a.no_g_switch;
    opts.edge_floor = !a.no_edge_floor;
    let report = audit_bounds(&records, &opts);
    for c in &report.checks {
        println!(
            "{}: {} checked, {} violations, worst margin {:e}",
            c.name, c.checked, c.violations, c.worst_margin
        );
    }
    if let Some(t) = report.t_tilde {
        println!("first positive G at t = {t}");
    }
    if let Some(h) = report.first_hit {
        println!("first hit at t = {h} (bound {:?})", report.bound_t52);
    }
    if report.passed() {
        println!("PASS");
        Ok(())
    } else {
        for v in report.violations.iter().take(10) {
            println!("violation: {} at t = {}: {} > {}", v.check, v.t, v.lhs, v.rhs);
        }
        Err(Failure {
            code: EXIT_VIOLATION,
            msg: format!("{} bound violations", report.violations.len()),
        })
    }
}
