//! Experiment generators and bound-check suites: the hypercube dataset,
//! goal-edge and bounded-edge experiments, random separable corpora and
//! per-step audits of the convergence bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boost::{run, run_bounded_edge, LearnerSpec, RunConfig, RunOutput, StepRule};
use crate::error::{Error, Result};
use crate::learners::{BoundedEdgeParams, PREFIX_EDGE_SLACK};
use crate::lp::{max_margin, LPSolution};
use crate::margin::upsilon;
use crate::matrix::GameMatrix;
use crate::trace::IterationRecord;

/// Slack applied to every audited inequality.
pub const AUDIT_SLACK: f64 = 1e-12;

/// Points on the corners of `{-1, +1}^dim` labelled by the sign of the sum
/// of the first `k_signal` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeDataset {
    pub dim: usize,
    pub k_signal: usize,
    pub train_points: Vec<Vec<i8>>,
    pub train_labels: Vec<i8>,
    pub test_points: Vec<Vec<i8>>,
    pub test_labels: Vec<i8>,
}

fn sign_label(x: &[i8], k_signal: usize) -> i8 {
    let sum: i32 = x[..k_signal].iter().map(|&v| i32::from(v)).sum();
    if sum > 0 { 1 } else { -1 }
}

/// Draws the dataset and its game matrix. Weak classifier `j < dim` is
/// `h_j(x) = x(j)` and classifier `dim + j` is its negation, so
/// `M_ij = y_i x_i(j)` and `M_{i,dim+j} = -M_ij`.
pub fn gen_hypercube(
    m: usize,
    dim: usize,
    k_signal: usize,
    n_test: usize,
    seed: u64,
) -> Result<(HypercubeDataset, GameMatrix)> {
    if k_signal.is_multiple_of(2) {
        return Err(Error::Config(format!("k_signal must be odd, got {k_signal}")));
    }
    if k_signal > dim {
        return Err(Error::Config(format!("k_signal = {k_signal} exceeds dim = {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize| -> (Vec<Vec<i8>>, Vec<i8>) {
        let points: Vec<Vec<i8>> = (0..count)
            .map(|_| (0..dim).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
            .collect();
        let labels = points.iter().map(|x| sign_label(x, k_signal)).collect();
        (points, labels)
    };
    let (train_points, train_labels) = draw(m);
    let (test_points, test_labels) = draw(n_test);

    let mut cols = Vec::with_capacity(2 * dim * m);
    for sign in [1i8, -1] {
        for j in 0..dim {
            cols.extend(train_points.iter().zip(&train_labels).map(|(x, &y)| sign * y * x[j]));
        }
    }
    let matrix = GameMatrix::from_columns(m, 2 * dim, cols)?;
    Ok((
        HypercubeDataset { dim, k_signal, train_points, train_labels, test_points, test_labels },
        matrix,
    ))
}

impl HypercubeDataset {
    /// Fraction of test points with `sign(Σ_j λ_j h_j(x)) ≠ y`; a zero score
    /// counts as an error.
    pub fn test_error(&self, lambda: &[f64]) -> f64 {
        let mut weights = vec![0.0; self.dim];
        for (j, &l) in lambda.iter().enumerate() {
            if j < self.dim {
                weights[j] += l;
            } else {
                weights[j - self.dim] -= l;
            }
        }
        let wrong = self
            .test_points
            .iter()
            .zip(&self.test_labels)
            .filter(|(x, &y)| {
                let score: f64 = x.iter().zip(&weights).map(|(&v, w)| f64::from(v) * w).sum();
                score * f64::from(y) <= 0.0
            })
            .count();
        wrong as f64 / self.test_points.len().max(1) as f64
    }
}

/// One goal-edge (or optimal, when `goal` is `None`) AdaBoost trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalTrial {
    pub goal: Option<f64>,
    pub final_margin: f64,
    /// Mean edge over the tail window.
    pub mean_edge: f64,
    pub upsilon_mean_edge: f64,
    /// `|μ - Υ(mean edge)|`.
    pub margin_gap: f64,
    /// Mean `|r_t - goal|` over the tail window.
    pub mean_goal_miss: f64,
    pub test_error: f64,
}

/// `count` goals equally spaced strictly inside `(lo, hi)`.
pub fn equally_spaced_goals(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64).collect()
}

/// Runs AdaBoost once per goal with the goal-edge learner, plus one trial
/// with the optimal learner, in parallel. Edge statistics use the last
/// `tail` iterations.
pub fn run_goal_edge_suite(
    dataset: &HypercubeDataset,
    matrix: &GameMatrix,
    goals: &[f64],
    iters: usize,
    tail: usize,
) -> Result<Vec<GoalTrial>> {
    let lp = max_margin(matrix);
    if !lp.is_separable() {
        return Err(Error::NonSeparable(lp.rho));
    }
    if let Some(g) = goals.iter().find(|&&g| !(g > lp.rho && g < 1.0)) {
        return Err(Error::Config(format!("goal {g} outside (rho, 1) = ({}, 1)", lp.rho)));
    }
    let mut trials: Vec<Option<f64>> = goals.iter().copied().map(Some).collect();
    trials.push(None);
    trials
        .par_iter()
        .map(|&goal| {
            let mut cfg = RunConfig::new(StepRule::AdaBoost, iters);
            cfg.rho = Some(lp.rho);
            cfg.learner = goal.map_or(LearnerSpec::Optimal, LearnerSpec::GoalEdge);
            let out = run(matrix, &cfg)?;
            let recs = &out.records;
            let window = &recs[recs.len().saturating_sub(tail.max(1))..];
            let mean_edge = window.iter().map(|r| r.r).sum::<f64>() / window.len() as f64;
            let mean_goal_miss = goal.map_or(0.0, |g| {
                window.iter().map(|r| (r.r - g).abs()).sum::<f64>() / window.len() as f64
            });
            let final_margin = out.final_margin().unwrap_or(f64::NAN);
            let ups = upsilon(mean_edge)?;
            Ok(GoalTrial {
                goal,
                final_margin,
                mean_edge,
                upsilon_mean_edge: ups,
                margin_gap: (final_margin - ups).abs(),
                mean_goal_miss,
                test_error: dataset.test_error(out.state.lambda()),
            })
        })
        .collect()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut e = k;
        while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[k]] {
            e += 1;
        }
        let avg = (k + e) as f64 / 2.0 + 1.0;
        for &i in &idx[k..=e] {
            out[i] = avg;
        }
        k = e + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties; `None` when either
/// side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
}

/// Outcome of a bounded-edge AdaBoost run.
#[derive(Debug, Clone, Serialize)]
pub struct BoundedEdgeReport {
    pub iters: usize,
    /// Steps whose edge fell outside `[ρ̄, ρ̄+σ]` (with floating slack).
    pub edge_violations: usize,
    pub min_edge: f64,
    pub max_edge: f64,
    /// Steps where `max d_i/d_j` exceeded `φ`, i.e. `K_t ≠ φ`.
    pub ratio_violations: usize,
    pub max_ratio: f64,
    /// Steps where `max d_i > φ/m`.
    pub max_weight_violations: usize,
    /// `[Υ(ρ̄) - δ, Υ(ρ̄+σ) + δ]`.
    pub bracket: (f64, f64),
    pub tail_g_min: f64,
    pub tail_g_max: f64,
    pub distinct_columns: usize,
    /// `ρ` of the most recently generated columns; a lower bound on the
    /// implicit matrix's value.
    pub realized_rho: f64,
    #[serde(skip)]
    pub output: RunOutput,
}

impl BoundedEdgeReport {
    pub fn tail_in_bracket(&self) -> bool {
        self.tail_g_min >= self.bracket.0 && self.tail_g_max <= self.bracket.1
    }

    pub fn passed(&self, rho_bar: f64) -> bool {
        self.edge_violations == 0
            && self.ratio_violations == 0
            && self.max_weight_violations == 0
            && self.tail_in_bracket()
            && self.realized_rho <= rho_bar + 1e-9
    }
}

/// Realized columns kept for the sanity LP on a bounded-edge run.
pub const REALIZED_LP_COLUMNS: usize = 300;

/// AdaBoost against the bounded-edge learner. The tail window is the last
/// `tail_fraction` of iterations and `delta` widens the `Υ` bracket.
pub fn run_bounded_edge_suite(
    params: BoundedEdgeParams,
    iters: usize,
    delta: f64,
    tail_fraction: f64,
) -> Result<BoundedEdgeReport> {
    let (lo, hi) = (params.rho_bar(), params.rho_bar() + params.sigma());
    let phi = params.phi();
    let m = params.m() as f64;
    let mut edge_violations = 0;
    let mut ratio_violations = 0;
    let mut max_weight_violations = 0;
    let mut max_ratio: f64 = 1.0;
    let cfg = RunConfig::new(StepRule::AdaBoost, iters);
    let output = run_bounded_edge(params, &cfg, |v| {
        let r = v.selection.r;
        if r < lo - PREFIX_EDGE_SLACK || r > hi + PREFIX_EDGE_SLACK {
            edge_violations += 1;
        }
        let ratio = v.weights.max_ratio();
        max_ratio = max_ratio.max(ratio);
        if ratio > phi * (1.0 + 1e-12) {
            ratio_violations += 1;
        }
        let top = v.weights.as_slice().iter().copied().fold(0.0, f64::max);
        if top > phi / m * (1.0 + 1e-12) {
            max_weight_violations += 1;
        }
    })?;

    let recs = &output.records;
    let from = ((1.0 - tail_fraction) * recs.len() as f64).floor() as usize;
    let tail = &recs[from.min(recs.len().saturating_sub(1))..];
    let tail_g_min = tail.iter().map(|r| r.g).fold(f64::INFINITY, f64::min);
    let tail_g_max = tail.iter().map(|r| r.g).fold(f64::NEG_INFINITY, f64::max);
    let min_edge = recs.iter().map(|r| r.r).fold(f64::INFINITY, f64::min);
    let max_edge = recs.iter().map(|r| r.r).fold(f64::NEG_INFINITY, f64::max);

    let n_cols = output.implicit_columns.len();
    let slots: Vec<usize> = (n_cols.saturating_sub(REALIZED_LP_COLUMNS)..n_cols).collect();
    let cols: Vec<i8> = slots.iter().flat_map(|&k| output.implicit_columns[k].iter().copied()).collect();
    let realized_rho = if slots.is_empty() {
        f64::NEG_INFINITY
    } else {
        max_margin(&GameMatrix::from_columns(params.m(), slots.len(), cols)?).rho
    };

    Ok(BoundedEdgeReport {
        iters: recs.len(),
        edge_violations,
        min_edge,
        max_edge,
        ratio_violations,
        max_ratio,
        max_weight_violations,
        bracket: (upsilon(lo)? - delta, upsilon(hi)? + delta),
        tail_g_min,
        tail_g_max,
        distinct_columns: output.implicit_columns.len(),
        realized_rho,
        output,
    })
}

/// A random `m × n` ±1 matrix with no all-`+1` column.
pub fn random_matrix<R: Rng>(rng: &mut R, m: usize, n: usize) -> GameMatrix {
    let mut cols = Vec::with_capacity(m * n);
    for _ in 0..n {
        loop {
            let col: Vec<i8> = (0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            if col.iter().any(|&v| v < 0) {
                cols.extend(col);
                break;
            }
        }
    }
    GameMatrix::from_columns(m, n, cols).expect("columns are valid by construction")
}

/// `count` random matrices with `m ≤ max_m`, `n ≤ max_n` and `ρ > rho_floor`,
/// each with its LP solution. Deterministic in `seed`.
pub fn separable_corpus(
    seed: u64,
    count: usize,
    max_m: usize,
    max_n: usize,
    rho_floor: f64,
) -> Vec<(GameMatrix, LPSolution)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = rng.gen_range(2..=max_m);
        let n = rng.gen_range(1..=max_n);
        let matrix = random_matrix(&mut rng, m, n);
        let lp = max_margin(&matrix);
        if lp.rho > rho_floor {
            out.push((matrix, lp));
        }
    }
    out
}

/// What is known about `ρ` when auditing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RhoInfo {
    Exact(f64),
    /// Only an upper bound `R ≥ ρ`.
    UpperBound(f64),
}

impl RhoInfo {
    fn value(self) -> f64 {
        match self {
            RhoInfo::Exact(v) | RhoInfo::UpperBound(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub rule: StepRule,
    /// Number of examples.
    pub m: usize,
    pub rho: RhoInfo,
    /// Target accuracy for the first-hit bounds.
    pub eps: Option<f64>,
    /// The run took AdaBoost steps until `G > 0`.
    pub g_switch: bool,
    /// The learner guarantees `r_t ≥ ρ` (the optimal learner does).
    pub edge_floor: bool,
}

impl AuditOptions {
    pub fn new(rule: StepRule, m: usize, rho: RhoInfo) -> Self {
        AuditOptions { rule, m, rho, eps: None, g_switch: true, edge_floor: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub t: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// One audited inequality `lhs ≤ rhs` and its tightest instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// `min (rhs - lhs)` over all instances.
    pub worst_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub rule: String,
    pub rho: RhoInfo,
    /// `ln 2/(1-ρ)` and `ρ/(1-ρ)` with `ρ` (or its bound).
    pub c1: f64,
    pub c2: f64,
    pub t_tilde: Option<usize>,
    /// `2 ln m / (-ln(1-ρ²)) + 1`.
    pub warmup_bound: Option<f64>,
    /// `1̃ + (s_1̃ + ln 2) ε^{-(3-ρ)/(1-ρ)}`.
    pub bound_t52: Option<f64>,
    /// First state index within `ε` of `ρ`, by `g` (Algorithms 1, 2) or by
    /// the best margin so far (arc-gv).
    pub first_hit: Option<usize>,
    /// `R_t = min_{ℓ ≤ t} r_ℓ`.
    pub r_t_series: Vec<f64>,
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Auditor {
    checks: Vec<CheckSummary>,
    violations: Vec<Violation>,
}

impl Auditor {
    /// Records `lhs ≤ rhs`.
    fn le(&mut self, name: &'static str, t: usize, lhs: f64, rhs: f64) {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckSummary { name, checked: 0, violations: 0, worst_margin: f64::INFINITY });
                self.checks.len() - 1
            }
        };
        let c = &mut self.checks[idx];
        c.checked += 1;
        c.worst_margin = c.worst_margin.min(rhs - lhs);
        if !(lhs <= rhs) {
            c.violations += 1;
            self.violations.push(Violation { check: name, t, lhs, rhs });
        }
    }
}

pub const CHECK_WARMUP: &str = "warm-up length";
pub const CHECK_SANDWICH_LOWER: &str = "sandwich: mu - ln m/s <= g";
pub const CHECK_SANDWICH_UPPER: &str = "sandwich: g <= mu";
pub const CHECK_MARGIN_RHO: &str = "sandwich: mu <= rho";
pub const CHECK_EDGE_RHO: &str = "sandwich: rho <= r";
pub const CHECK_PROGRESS: &str = "per-step progress";
pub const CHECK_STEP_SIZE: &str = "step size bound";
pub const CHECK_RATE: &str = "first-hit bound";
pub const CHECK_ADAPTIVE: &str = "adaptive first-hit forecast";
pub const CHECK_SIGN: &str = "smooth margin sign equivalence";

/// Audits a complete trace against the bounds that apply to its rule.
///
/// Record `k` (step `t = k+1`) starts from state `λ_t`, whose `s`, `g`, `μ`
/// come from record `k-1` (the origin for `k = 0`), and ends at `λ_{t+1}`.
/// With only an upper bound on `ρ` the first-hit bounds, the warm-up bound
/// and `ρ ≤ r_t` are skipped.
pub fn audit_bounds(records: &[IterationRecord], opts: &AuditOptions) -> BoundReport {
    let rho = opts.rho.value();
    let exact = matches!(opts.rho, RhoInfo::Exact(_));
    let c1 = std::f64::consts::LN_2 / (1.0 - rho);
    let c2 = rho / (1.0 - rho);
    let ln_m = (opts.m as f64).ln();
    let mut a = Auditor { checks: Vec::new(), violations: Vec::new() };

    let t_tilde = records.iter().position(|r| r.g > 0.0).map(|k| k + 2);
    // state index u ≥ 2 lives in records[u - 2]
    let state = |u: usize| &records[u - 2];
    let last_state = records.len() + 1;

    let mut r_t_series = Vec::with_capacity(records.len());
    let mut running = f64::INFINITY;
    for rec in records {
        running = running.min(rec.r);
        r_t_series.push(running);
    }

    let warmup_bound = (exact && rho > 0.0).then(|| 2.0 * ln_m / -(1.0 - rho * rho).ln() + 1.0);
    if let (Some(bound), true) = (warmup_bound, opts.g_switch) {
        match t_tilde {
            Some(tt) => a.le(CHECK_WARMUP, tt, tt as f64, bound),
            None if last_state as f64 > bound => a.le(CHECK_WARMUP, last_state, f64::INFINITY, bound),
            None => {}
        }
    }

    let ascent = matches!(
        opts.rule,
        StepRule::CoordinateAscent | StepRule::ApproxCoordinateAscent | StepRule::ArcGv
    );
    let bounded_step = matches!(opts.rule, StepRule::CoordinateAscent | StepRule::ApproxCoordinateAscent);

    for (k, rec) in records.iter().enumerate() {
        let t = rec.t;
        let after = t_tilde.is_some_and(|tt| t >= tt);
        // post-state λ_{t+1} is past 1̃ once its own G is positive or the
        // run already passed 1̃
        if t_tilde.is_some_and(|tt| t + 1 >= tt) {
            a.le(CHECK_SANDWICH_LOWER, t + 1, rec.mu - ln_m / rec.s, rec.g + AUDIT_SLACK);
            a.le(CHECK_SANDWICH_UPPER, t + 1, rec.g, rec.mu);
            a.le(CHECK_MARGIN_RHO, t + 1, rec.mu, rho + AUDIT_SLACK);
        }
        if after && exact && opts.edge_floor {
            a.le(CHECK_EDGE_RHO, t, rho, rec.r + AUDIT_SLACK);
        }
        if k == 0 {
            continue;
        }
        let prev = &records[k - 1];
        if after && ascent {
            let gain = rec.g - prev.g;
            let need = rec.alpha * (rec.r - prev.g) / (2.0 * rec.s);
            a.le(CHECK_PROGRESS, t, need, gain + AUDIT_SLACK);
        }
        if after && bounded_step {
            a.le(CHECK_STEP_SIZE, t, rec.alpha, c1 + c2 * prev.s + AUDIT_SLACK);
        }
        if opts.rule == StepRule::AdaBoost {
            let ups = upsilon(rec.r).unwrap_or(f64::NAN);
            let predicted = ups - prev.g;
            let observed = rec.g - prev.g;
            if predicted.abs() > AUDIT_SLACK && observed.abs() > AUDIT_SLACK {
                let agree = (predicted > 0.0) == (observed > 0.0);
                a.le(CHECK_SIGN, t, if agree { 0.0 } else { 1.0 }, 0.0);
            }
        }
    }

    let mut bound_t52 = None;
    let mut first_hit = None;
    if let (Some(eps), Some(tt), true, true) = (opts.eps, t_tilde, exact, ascent) {
        let s_tt = state(tt).s;
        let bound_for = |r: f64| tt as f64 + (s_tt + std::f64::consts::LN_2) * eps.powf(-(3.0 - r) / (1.0 - r));
        let bound = bound_for(rho);
        bound_t52 = Some(bound);
        let mut best_mu = f64::NEG_INFINITY;
        first_hit = (2..=last_state).find(|&u| {
            let rec = state(u);
            best_mu = best_mu.max(rec.mu);
            let value = if opts.rule == StepRule::ArcGv { best_mu } else { rec.g };
            rho - value <= eps
        });
        let observed = |limit: f64| match first_hit {
            Some(h) => Some(h as f64),
            None if last_state as f64 >= limit => Some(f64::INFINITY),
            None => None,
        };
        if let Some(h) = observed(bound) {
            a.le(CHECK_RATE, first_hit.unwrap_or(last_state), h, bound);
        }
        if opts.rule != StepRule::ArcGv {
            for rec in records.iter().filter(|r| r.t >= tt) {
                let forecast = bound_for(r_t_series[rec.t - 1]);
                if let Some(h) = observed(forecast) {
                    a.le(CHECK_ADAPTIVE, rec.t, h, forecast);
                }
            }
        }
    }

    BoundReport {
        rule: opts.rule.name().to_string(),
        rho: opts.rho,
        c1,
        c2,
        t_tilde,
        warmup_bound,
        bound_t52,
        first_hit,
        r_t_series,
        checks: a.checks,
        violations: a.violations,
    }
}

/// One audited run from a corpus fan-out.
#[derive(Debug, Clone)]
pub struct CorpusRun {
    pub index: usize,
    pub rule: StepRule,
    pub output: RunOutput,
    pub report: BoundReport,
}

/// Runs every rule on every corpus matrix in parallel and audits each trace.
pub fn audit_corpus(
    corpus: &[(GameMatrix, LPSolution)],
    rules: &[StepRule],
    iters: usize,
    eps: Option<f64>,
    stop_eps: Option<f64>,
) -> Result<Vec<CorpusRun>> {
    let jobs: Vec<(usize, StepRule)> =
        (0..corpus.len()).flat_map(|i| rules.iter().map(move |&r| (i, r))).collect();
    jobs.par_iter()
        .map(|&(index, rule)| {
            let (matrix, lp) = &corpus[index];
            let mut cfg = RunConfig::new(rule, iters);
            cfg.rho = Some(lp.rho);
            cfg.stop_eps = stop_eps;
            let output = run(matrix, &cfg)?;
            let mut opts = AuditOptions::new(rule, matrix.rows(), RhoInfo::Exact(lp.rho));
            opts.eps = eps;
            let report = audit_bounds(&output.records, &opts);
            Ok(CorpusRun { index, rule, output, report })
        })
        .collect()
}
