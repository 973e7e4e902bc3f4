//! The boosting loop and its four step rules: AdaBoost, coordinate ascent
//! (exact line search on `G`), approximate coordinate ascent and arc-gv.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::learners::{
    BoundedEdgeLearner, BoundedEdgeParams, Column, GoalEdgeLearner, OptimalLearner, WeakLearner,
    WeakSelection,
};
use crate::lp::max_margin;
use crate::margin::{gamma_of, log_cosh_ratio, update_weights, ModelState, WeightDist};
use crate::matrix::GameMatrix;
use crate::trace::{ColumnTag, IterationRecord};

/// Cached margins are rebuilt from `λ` this often, and the weights resynced
/// from the margins, so that rounding drift and underflowed weights cannot
/// accumulate over long runs.
pub const RECOMPUTE_EVERY: usize = 1024;

/// Line-search stopping rule: `|f_t(α)| ≤ LINE_SEARCH_TOL` or
/// `LINE_SEARCH_MAX_ITERS` bisections.
pub const LINE_SEARCH_TOL: f64 = 1e-13;
pub const LINE_SEARCH_MAX_ITERS: usize = 200;

const ARC_MARGIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepRule {
    AdaBoost,
    /// Algorithm 1: the step maximizing `G` along the chosen coordinate.
    CoordinateAscent,
    /// Algorithm 2: the closed-form step `tanh⁻¹ r - tanh⁻¹ g`.
    ApproxCoordinateAscent,
    ArcGv,
}

impl StepRule {
    pub const ALL: [StepRule; 4] = [
        StepRule::AdaBoost,
        StepRule::CoordinateAscent,
        StepRule::ApproxCoordinateAscent,
        StepRule::ArcGv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StepRule::AdaBoost => "adaboost",
            StepRule::CoordinateAscent => "alg1",
            StepRule::ApproxCoordinateAscent => "alg2",
            StepRule::ArcGv => "arcgv",
        }
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adaboost" | "ada" => Ok(StepRule::AdaBoost),
            "alg1" | "coordinate-ascent" => Ok(StepRule::CoordinateAscent),
            "alg2" | "approx-coordinate-ascent" => Ok(StepRule::ApproxCoordinateAscent),
            "arcgv" | "arc-gv" => Ok(StepRule::ArcGv),
            other => Err(Error::Config(format!("unknown step rule {other:?}"))),
        }
    }
}

/// Which weak learner [`run`] builds over the matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerSpec {
    Optimal,
    GoalEdge(f64),
    /// Implicit columns; use [`run_bounded_edge`].
    BoundedEdge(BoundedEdgeParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rule: StepRule,
    pub max_iters: usize,
    pub learner: LearnerSpec,
    /// Take AdaBoost steps until `G > 0`, then switch to `rule`.
    pub g_switch: bool,
    /// Stop once `ρ - μ(λ) ≤ stop_eps`; needs `ρ`.
    pub stop_eps: Option<f64>,
    /// Seed for randomized inputs built around the run; the loop itself is
    /// deterministic.
    pub seed: u64,
    /// The maximum margin when already known; [`run`] solves for it otherwise.
    pub rho: Option<f64>,
    /// Lets AdaBoost run on data with `ρ ≤ 0`.
    pub allow_nonseparable: bool,
}

impl RunConfig {
    pub fn new(rule: StepRule, max_iters: usize) -> Self {
        RunConfig {
            rule,
            max_iters,
            learner: LearnerSpec::Optimal,
            g_switch: true,
            stop_eps: None,
            seed: 0,
            rho: None,
            allow_nonseparable: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if let Some(eps) = self.stop_eps {
            if !(eps > 0.0) {
                return Err(Error::Config(format!("stop_eps must be positive, got {eps}")));
            }
        }
        Ok(())
    }
}

/// `α = tanh⁻¹ r`.
pub fn ada_step(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::StepPrecondition(format!("AdaBoost step needs 0 < r < 1, got {r}")));
    }
    gamma_of(r)
}

/// `α = tanh⁻¹ r - tanh⁻¹ g` with `g = max(0, G) < r`.
pub fn alg2_step(r: f64, g: f64) -> Result<f64> {
    let gamma = ada_step(r)?;
    if !(g >= 0.0) {
        return Err(Error::StepPrecondition(format!("g must be nonnegative, got {g}")));
    }
    if g >= r {
        return Err(Error::StepPrecondition(format!("g = {g} is not below the edge r = {r}")));
    }
    Ok(gamma - g.atanh())
}

/// `α = tanh⁻¹ r - tanh⁻¹ μ` with `-1 < μ ≤ r`. A margin above the edge by
/// no more than rounding (`1e-12`) gives `α = 0`: the run has reached `μ = ρ`.
pub fn arc_step(r: f64, mu: f64) -> Result<f64> {
    let gamma = ada_step(r)?;
    if !(mu > -1.0) {
        return Err(Error::StepPrecondition(format!("arc-gv step needs mu > -1, got {mu}")));
    }
    if mu > r + ARC_MARGIN_SLACK {
        return Err(Error::StepPrecondition(format!("mu = {mu} exceeds the edge r = {r}")));
    }
    Ok((gamma - mu.min(r).atanh()).max(0.0))
}

/// `f_t(α) = s g + ln(cosh γ / cosh(γ - α)) - (s + α) tanh(γ - α)`,
/// increasing in `α`; its root is the exact line-search step.
pub fn line_search_objective(s: f64, g: f64, gamma: f64, alpha: f64) -> f64 {
    s * g + log_cosh_ratio(gamma, alpha) - (s + alpha) * (gamma - alpha).tanh()
}

/// The unique root of `f_t` in `(0, γ]`, by bisection.
pub fn alg1_line_search(s: f64, g: f64, gamma: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::StepPrecondition(format!("line search needs s > 0, got {s}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::StepPrecondition(format!("line search needs gamma > 0, got {gamma}")));
    }
    if !(g >= 0.0 && g < gamma.tanh()) {
        return Err(Error::StepPrecondition(format!(
            "line search needs 0 <= g < r, got g = {g}, r = {}",
            gamma.tanh()
        )));
    }
    let f = |a: f64| line_search_objective(s, g, gamma, a);
    let (f_lo, f_hi) = (f(0.0), f(gamma));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Bracket { f_lo, f_hi });
    }
    let (mut lo, mut hi) = (0.0, gamma);
    let mut mid = 0.5 * gamma;
    for _ in 0..LINE_SEARCH_MAX_ITERS {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= LINE_SEARCH_TOL {
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    Ok(mid)
}

/// Pre-step quantities available to an observer.
#[derive(Debug)]
pub struct StepView<'a> {
    pub t: usize,
    /// `d_t`, the distribution the learner saw.
    pub weights: &'a WeightDist,
    pub selection: &'a WeakSelection,
    /// `G(λ_t)` and `μ(λ_t)`; `None` at the origin.
    pub g_pre: Option<f64>,
    pub mu_pre: Option<f64>,
    pub record: &'a IterationRecord,
    /// `λ_{t+1}` after the step.
    pub state: &'a ModelState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIters,
    /// `ρ - μ ≤ stop_eps`.
    MarginGap,
    /// The learner found no positive edge, which happens only when `ρ ≤ 0`.
    NonPositiveEdge,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<IterationRecord>,
    /// The state index `1̃` of the first `λ_t` with `G(λ_t) > 0`.
    pub t_tilde: Option<usize>,
    pub state: ModelState,
    pub weights: WeightDist,
    /// Implicit columns by slot, as referenced by `@slot` tags.
    pub implicit_columns: Vec<Vec<i8>>,
    pub stop: StopReason,
    pub rho: Option<f64>,
}

impl RunOutput {
    /// `G` at the final state, or `None` when no step was taken.
    pub fn final_smooth_margin(&self) -> Option<f64> {
        self.records.last().map(|r| r.g)
    }

    pub fn final_margin(&self) -> Option<f64> {
        self.records.last().map(|r| r.mu)
    }
}

/// Runs `config.rule` with an explicit learner. Performs no separability
/// check; `config.learner` is ignored in favour of `learner`.
pub fn run_with<L, O>(learner: &L, config: &RunConfig, mut observer: O) -> Result<RunOutput>
where
    L: WeakLearner + ?Sized,
    O: FnMut(&StepView<'_>),
{
    config.validate()?;
    let m = learner.num_examples();
    let n0 = learner.matrix().map_or(0, GameMatrix::cols);
    let mut state = ModelState::zeros(m, n0);
    let mut d = WeightDist::uniform(m);
    let mut registry: HashMap<Vec<i8>, usize> = HashMap::new();
    let mut implicit: Vec<Vec<i8>> = Vec::new();
    let mut records = Vec::with_capacity(config.max_iters.min(1 << 20));
    let mut t_tilde = None;
    let mut stop = StopReason::MaxIters;

    for t in 1..=config.max_iters {
        let sel = learner.select(&d)?;
        let r = sel.r;
        if r <= 0.0 {
            stop = StopReason::NonPositiveEdge;
            break;
        }
        let gamma = gamma_of(r)?;
        let (g_pre, mu_pre) = if state.s() > 0.0 {
            (Some(state.smooth_margin()?), Some(state.margin()?))
        } else {
            (None, None)
        };
        let g = g_pre.unwrap_or(0.0).max(0.0);
        let ada_phase = config.g_switch && g <= 0.0;
        let alpha = match config.rule {
            StepRule::AdaBoost => gamma,
            _ if ada_phase => gamma,
            StepRule::ApproxCoordinateAscent => alg2_step(r, g)?,
            StepRule::CoordinateAscent if g > 0.0 => alg1_line_search(state.s(), g, gamma)?,
            StepRule::CoordinateAscent => gamma,
            StepRule::ArcGv => match mu_pre {
                Some(mu) if mu > -1.0 + 1e-12 => arc_step(r, mu)?,
                _ => gamma,
            },
        };

        let (slot, tag) = match &sel.column {
            Column::Index(j) => (*j, ColumnTag::Index(*j)),
            Column::Implicit(col) => {
                let k = *registry.entry(col.clone()).or_insert_with(|| {
                    implicit.push(col.clone());
                    implicit.len() - 1
                });
                (n0 + k, ColumnTag::Implicit(k))
            }
        };
        let entries = learner.entries(&sel.column);
        state.add_step(slot, entries, alpha);
        let next_d = update_weights(&d, entries, alpha);

        if t % RECOMPUTE_EVERY == 0 {
            let matrix = learner.matrix();
            state.recompute(|k| match matrix {
                Some(mx) if k < n0 => mx.column(k),
                _ => &implicit[k - n0],
            });
        }

        let record = IterationRecord {
            t,
            j: tag,
            r,
            gamma,
            alpha,
            s: state.s(),
            g: state.smooth_margin()?,
            mu: state.margin()?,
            log_f: state.log_loss(),
        };
        if t_tilde.is_none() && record.g > 0.0 {
            t_tilde = Some(t + 1);
        }
        observer(&StepView {
            t,
            weights: &d,
            selection: &sel,
            g_pre,
            mu_pre,
            record: &record,
            state: &state,
        });
        records.push(record);
        d = if t % RECOMPUTE_EVERY == 0 { state.implied_weights() } else { next_d };

        if let (Some(eps), Some(rho)) = (config.stop_eps, config.rho) {
            if rho - record.mu <= eps {
                stop = StopReason::MarginGap;
                break;
            }
        }
    }

    Ok(RunOutput {
        records,
        t_tilde,
        state,
        weights: d,
        implicit_columns: implicit,
        stop,
        rho: config.rho,
    })
}

/// Runs boosting on an explicit matrix with the configured learner.
///
/// Solves for `ρ` unless supplied. Algorithms 1, 2 and arc-gv are refused
/// when `ρ ≤ 0`, and so is AdaBoost unless `allow_nonseparable` is set. The
/// goal-edge learner additionally needs `ρ < goal < 1`.
pub fn run(matrix: &GameMatrix, config: &RunConfig) -> Result<RunOutput> {
    let rho = config.rho.unwrap_or_else(|| max_margin(matrix).rho);
    if rho <= 0.0 && !(config.rule == StepRule::AdaBoost && config.allow_nonseparable) {
        return Err(Error::NonSeparable(rho));
    }
    let config = RunConfig { rho: Some(rho), ..config.clone() };
    match config.learner {
        LearnerSpec::Optimal => run_with(&OptimalLearner { matrix }, &config, |_| {}),
        LearnerSpec::GoalEdge(goal) => {
            if !(goal > rho && goal < 1.0) {
                return Err(Error::Config(format!(
                    "goal edge must lie in (rho, 1) = ({rho}, 1), got {goal}"
                )));
            }
            run_with(&GoalEdgeLearner { matrix, goal }, &config, |_| {})
        }
        LearnerSpec::BoundedEdge(_) => Err(Error::Config(
            "the bounded-edge learner generates its own columns; use run_bounded_edge".into(),
        )),
    }
}

/// Runs boosting against the implicit bounded-edge matrix. Its maximum
/// margin is exactly `ρ̄` (the uniform weights cap every edge at `ρ̄` and
/// the top-`cap` prefix reaches `ρ̄` under any weights), which is used as
/// `ρ` unless supplied.
pub fn run_bounded_edge<O>(params: BoundedEdgeParams, config: &RunConfig, observer: O) -> Result<RunOutput>
where
    O: FnMut(&StepView<'_>),
{
    let config = RunConfig {
        rho: Some(config.rho.unwrap_or(params.rho_bar())),
        learner: LearnerSpec::BoundedEdge(params),
        ..config.clone()
    };
    run_with(&BoundedEdgeLearner { params }, &config, observer)
}

/// The three step sizes at one shared state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepComparison {
    pub alg1: f64,
    pub alg2: f64,
    pub ada: f64,
}

pub fn compare_steps(s: f64, g: f64, r: f64) -> Result<StepComparison> {
    let ada = ada_step(r)?;
    Ok(StepComparison { alg1: alg1_line_search(s, g, ada)?, alg2: alg2_step(r, g)?, ada })
}
