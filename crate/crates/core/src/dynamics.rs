//! Long-run behaviour: periodic cycles of AdaBoost's weight vectors, the
//! monotonicity of the smooth margin, the matrix-free recursion for the
//! smooth margin under scripted edges, and power-law decay fits.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::boost::{ada_step, alg1_line_search, alg2_step, StepRule};
use crate::error::{Error, Result};
use crate::learners::{scripted_select, EdgeScript};
use crate::margin::{log_cosh_ratio, upsilon, WeightDist};
use crate::matrix::GameMatrix;
use crate::trace::{ColumnTag, IterationRecord};

/// Default `‖d_{t+T} - d_t‖_∞` tolerance for cycle detection.
pub const CYCLE_TOL: f64 = 1e-9;
/// Default weight below which an example is not a support vector.
pub const SUPPORT_TOL: f64 = 1e-7;

/// A detected period before diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleSkeleton {
    pub period: usize,
    /// Earliest index from which `‖d_{t+T} - d_t‖_∞ ≤ tol` holds for every
    /// pair up to the end of the trace.
    pub start: usize,
}

/// Finds the smallest period `T ≤ t_max` such that the last `2T` weight
/// vectors satisfy `‖d_{t+T} - d_t‖_∞ ≤ tol`. Periods needing more than the
/// whole trace are skipped.
pub fn detect_cycle(d_trace: &[WeightDist], tol: f64, t_max: usize) -> Option<CycleSkeleton> {
    let len = d_trace.len();
    let close = |t: usize, period: usize| d_trace[t].linf_distance(&d_trace[t + period]) <= tol;
    (1..=t_max)
        .take_while(|&period| 2 * period <= len)
        .find(|&period| (len - 2 * period..len - period).all(|t| close(t, period)))
        .map(|period| {
            let mut start = len - 2 * period;
            while start > 0 && close(start - 1, period) {
                start -= 1;
            }
            CycleSkeleton { period, start }
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub period: usize,
    pub start: usize,
    /// Edges `r_1^cyc … r_T^cyc` over the final period.
    pub cycle_edges: Vec<f64>,
    pub cycle_columns: Vec<usize>,
    pub support_set: Vec<usize>,
    /// Number of rounds in the final period classifying each support vector correctly.
    pub tau: BTreeMap<usize, usize>,
    /// `|Π_t (1 + M_{i j_t} r_t) - 1|` per support vector.
    pub condition_residuals: BTreeMap<usize, f64>,
    /// All cycle edges agree within the edge tolerance.
    pub equal_edges: bool,
    /// Every support vector has the same `τ`.
    pub tau_consistent: bool,
}

impl CycleReport {
    pub fn max_residual(&self) -> f64 {
        self.condition_residuals.values().copied().fold(0.0, f64::max)
    }
}

/// Diagnoses the final period of an AdaBoost trace. `d_trace[k]` must be the
/// weights seen by the learner at `records[k]`.
pub fn cycle_diagnostics(
    matrix: &GameMatrix,
    records: &[IterationRecord],
    d_trace: &[WeightDist],
    skeleton: CycleSkeleton,
    support_tol: f64,
    edge_tol: f64,
) -> Result<CycleReport> {
    let period = skeleton.period;
    let len = records.len();
    if d_trace.len() != len {
        return Err(Error::CycleWindow(format!(
            "{} weight vectors for {len} records",
            d_trace.len()
        )));
    }
    if period == 0 || skeleton.start + 2 * period > len {
        return Err(Error::CycleWindow(format!(
            "period {period} from {} does not fit in {len} records",
            skeleton.start
        )));
    }
    let window = len - period..len;
    let mut cycle_columns = Vec::with_capacity(period);
    for t in window.clone() {
        let j = match records[t].j {
            ColumnTag::Index(j) => j,
            ColumnTag::Implicit(_) => {
                return Err(Error::CycleWindow("implicit columns are not supported".into()))
            }
        };
        if records[t - period].j != records[t].j {
            return Err(Error::CycleWindow(format!(
                "column at t = {} differs from one period earlier",
                records[t].t
            )));
        }
        cycle_columns.push(j);
    }
    let cycle_edges: Vec<f64> = window.clone().map(|t| records[t].r).collect();

    let support_set: Vec<usize> = (0..matrix.rows())
        .filter(|&i| window.clone().all(|t| d_trace[t].as_slice()[i] > support_tol))
        .collect();
    let mut tau = BTreeMap::new();
    let mut condition_residuals = BTreeMap::new();
    for &i in &support_set {
        let mut count = 0;
        let mut product = 1.0;
        for (&j, &r) in cycle_columns.iter().zip(&cycle_edges) {
            let v = matrix.get(i, j);
            if v > 0 {
                count += 1;
            }
            product *= 1.0 + f64::from(v) * r;
        }
        tau.insert(i, count);
        condition_residuals.insert(i, (product - 1.0).abs());
    }
    let lo = cycle_edges.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cycle_edges.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut taus = tau.values();
    let first = taus.next().copied();
    let tau_consistent = taus.all(|&v| Some(v) == first);
    Ok(CycleReport {
        period,
        start: skeleton.start,
        cycle_edges,
        cycle_columns,
        support_set,
        tau,
        condition_residuals,
        equal_edges: hi - lo <= edge_tol,
        tau_consistent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct MonotonicityScan {
    pub decreases: usize,
    pub increases: usize,
    pub unchanged: usize,
}

/// Counts the signs of `g_{t+1} - g_t`.
pub fn smooth_margin_monotonicity_scan(g_trace: &[f64]) -> MonotonicityScan {
    let mut scan = MonotonicityScan::default();
    for w in g_trace.windows(2) {
        match w[1].partial_cmp(&w[0]) {
            Some(std::cmp::Ordering::Less) => scan.decreases += 1,
            Some(std::cmp::Ordering::Greater) => scan.increases += 1,
            _ => scan.unchanged += 1,
        }
    }
    scan
}

/// Decreases of `g` inside each of the trailing whole periods, oldest first.
pub fn decreases_per_period(g_trace: &[f64], period: usize, periods: usize) -> Vec<usize> {
    let len = g_trace.len();
    (0..periods)
        .rev()
        .filter_map(|k| {
            let end = len.checked_sub(k * period)?;
            let begin = end.checked_sub(period + 1)?;
            Some(smooth_margin_monotonicity_scan(&g_trace[begin..end]).decreases)
        })
        .collect()
}

/// `|g_t - Υ(r)|` along a trace.
pub fn upsilon_residuals(g_trace: &[f64], r: f64) -> Result<Vec<f64>> {
    let target = upsilon(r)?;
    Ok(g_trace.iter().map(|g| (g - target).abs()).collect())
}

/// Whether the sequence never increases over its final `fraction`.
pub fn eventually_nonincreasing(values: &[f64], fraction: f64) -> bool {
    let from = ((1.0 - fraction) * values.len() as f64).floor() as usize;
    values[from.min(values.len())..].windows(2).all(|w| w[1] <= w[0])
}

/// One state of the matrix-free smooth-margin recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecursionState {
    pub t: usize,
    pub s: f64,
    pub g: f64,
    /// `ρ - g`.
    pub x: f64,
}

/// The smooth-margin recursion driven by scripted edges, one state per step.
///
/// Each step takes `α` from the rule and applies `s' = s + α`,
/// `s'g' = s g + ln(cosh γ / cosh(γ - α))`; `x = ρ - g` is reported against
/// the supplied `rho`. With Algorithm 2 and constant edge `ρ` this is
/// `α = ½ln((1+ρ)/(1-ρ) · (1-g)/(1+g))`,
/// `s'g' = s g + ½ln((1+g)(1-g)/((1+ρ)(1-ρ)))`.
#[derive(Debug, Clone)]
pub struct Recursion<'a> {
    rule: StepRule,
    script: &'a EdgeScript,
    rho: f64,
    state: RecursionState,
}

impl<'a> Recursion<'a> {
    pub fn new(rule: StepRule, script: &'a EdgeScript, rho: f64, g0: f64, s0: f64) -> Result<Self> {
        if rule == StepRule::ArcGv {
            return Err(Error::Config("arc-gv needs the margin, which scripted edges lack".into()));
        }
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(Error::Domain(format!("s0 must be positive, got {s0}")));
        }
        if !(g0 >= 0.0 && g0 < rho) {
            return Err(Error::Domain(format!("need 0 <= g0 < rho, got g0 = {g0}, rho = {rho}")));
        }
        Ok(Recursion { rule, script, rho, state: RecursionState { t: 0, s: s0, g: g0, x: rho - g0 } })
    }

    pub fn state(&self) -> RecursionState {
        self.state
    }

    pub fn step(&mut self) -> Result<RecursionState> {
        let RecursionState { t, s, g, .. } = self.state;
        let r = scripted_select(self.script, t)?;
        let gamma = ada_step(r)?;
        let alpha = match self.rule {
            StepRule::AdaBoost => gamma,
            StepRule::ApproxCoordinateAscent => alg2_step(r, g.max(0.0))?,
            StepRule::CoordinateAscent if g > 0.0 => alg1_line_search(s, g, gamma)?,
            StepRule::CoordinateAscent => gamma,
            StepRule::ArcGv => unreachable!("rejected in new"),
        };
        let s_next = s + alpha;
        let g_next = (s * g + log_cosh_ratio(gamma, alpha)) / s_next;
        self.state = RecursionState { t: t + 1, s: s_next, g: g_next, x: self.rho - g_next };
        Ok(self.state)
    }
}

/// Algorithm 2 against the constant edge `ρ`, returning `steps` states
/// after the initial one.
pub fn scripted_recursion(rho: f64, g0: f64, s0: f64, steps: usize) -> Result<Vec<RecursionState>> {
    let script = EdgeScript::constant(rho)?;
    let mut rec = Recursion::new(StepRule::ApproxCoordinateAscent, &script, rho, g0, s0)?;
    (0..steps).map(|_| rec.step()).collect()
}

/// Least-squares fit of `ln x` against `ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Second derivative of `ln x` in `ln t` from a quadratic fit.
    pub curvature: f64,
    /// Slope change implied by the curvature across the window.
    pub slope_drift: f64,
    pub power_law: bool,
    pub points: usize,
}

/// Maximum number of log-spaced points used by [`decay_exponent`].
pub const DECAY_FIT_POINTS: usize = 200;
/// Slope drift across the window above which a fit is flagged as not a
/// power law.
pub const POWER_LAW_DRIFT: f64 = 0.1;

/// Fits `x ∝ t^slope` on `t ∈ [t_lo, t_hi]` after subsampling to at most
/// [`DECAY_FIT_POINTS`] points equally spaced in `ln t`.
pub fn decay_exponent(points: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (t_lo, t_hi) = window;
    if !(t_lo > 0.0 && t_hi >= 10.0 * t_lo) {
        return Err(Error::Domain(format!("window needs 0 < t_lo and t_hi >= 10 t_lo, got {window:?}")));
    }
    let mut inside: Vec<(f64, f64)> =
        points.iter().copied().filter(|(t, _)| *t >= t_lo && *t <= t_hi).collect();
    if let Some((t, x)) = inside.iter().find(|(_, x)| !(*x > 0.0)) {
        return Err(Error::Domain(format!("nonpositive value {x} at t = {t}")));
    }
    inside.sort_by(|a, b| a.0.total_cmp(&b.0));
    let logs: Vec<(f64, f64)> = inside.iter().map(|(t, x)| (t.ln(), x.ln())).collect();
    let sample = log_spaced(&logs, DECAY_FIT_POINTS);
    if sample.len() < 3 {
        return Err(Error::Domain(format!("only {} points in the window", sample.len())));
    }

    let n = sample.len() as f64;
    let u_mean = sample.iter().map(|p| p.0).sum::<f64>() / n;
    let v_mean = sample.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut suu, mut suv) = (0.0, 0.0);
    for (u, v) in &sample {
        suu += (u - u_mean).powi(2);
        suv += (u - u_mean) * (v - v_mean);
    }
    let slope = suv / suu;
    let intercept = v_mean - slope * u_mean;

    // quadratic v = a + b w + c w² in centred w = u - ū
    let c = quadratic_coefficient(&sample, u_mean).unwrap_or(0.0);
    let range = sample.last().unwrap().0 - sample[0].0;
    let slope_drift = (2.0 * c * range).abs();
    Ok(DecayFit {
        slope,
        intercept,
        curvature: 2.0 * c,
        slope_drift,
        power_law: slope_drift <= POWER_LAW_DRIFT,
        points: sample.len(),
    })
}

fn quadratic_coefficient(sample: &[(f64, f64)], centre: f64) -> Option<f64> {
    // normal equations for [1, w, w²]
    let mut a = [[0.0f64; 4]; 3];
    for &(u, v) in sample {
        let w = u - centre;
        let basis = [1.0, w, w * w];
        for r in 0..3 {
            for c in 0..3 {
                a[r][c] += basis[r] * basis[c];
            }
            a[r][3] += basis[r] * v;
        }
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        let pivot = a[col];
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                for (v, &p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *v -= f * p;
                }
            }
        }
    }
    Some(a[2][3] / a[2][2])
}

/// Picks the points nearest to `k` equally spaced targets in the first
/// coordinate, without repeats.
fn log_spaced(points: &[(f64, f64)], k: usize) -> Vec<(f64, f64)> {
    if points.len() <= k {
        return points.to_vec();
    }
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    let mut out: Vec<usize> = Vec::with_capacity(k);
    for q in 0..k {
        let target = lo + (hi - lo) * q as f64 / (k - 1) as f64;
        let idx = points.partition_point(|p| p.0 < target);
        let idx = if idx > 0
            && (idx == points.len() || target - points[idx - 1].0 <= points[idx].0 - target)
        {
            idx - 1
        } else {
            idx
        };
        if out.last() != Some(&idx) {
            out.push(idx);
        }
    }
    out.into_iter().map(|i| points[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_has_period_one() {
        let d = WeightDist::new(vec![0.25, 0.75]).unwrap();
        let trace = vec![d; 10];
        assert_eq!(detect_cycle(&trace, 1e-9, 4), Some(CycleSkeleton { period: 1, start: 0 }));
    }

    #[test]
    fn period_two_is_minimal_and_nonrepeating_has_none() {
        let a = WeightDist::new(vec![0.25, 0.75]).unwrap();
        let b = WeightDist::new(vec![0.5, 0.5]).unwrap();
        let c = WeightDist::new(vec![0.9, 0.1]).unwrap();
        let mut trace = vec![c.clone()];
        for _ in 0..6 {
            trace.push(a.clone());
            trace.push(b.clone());
        }
        assert_eq!(detect_cycle(&trace, 1e-9, 5), Some(CycleSkeleton { period: 2, start: 1 }));
        let drift: Vec<WeightDist> = (0..20)
            .map(|k| {
                let p = 0.5 + 0.4 * ((k * k) as f64).sin();
                WeightDist::new(vec![p, 1.0 - p]).unwrap()
            })
            .collect();
        assert_eq!(detect_cycle(&drift, 1e-9, 10), None);
    }

    #[test]
    fn monotonicity_scan_counts_signs() {
        let scan = smooth_margin_monotonicity_scan(&[0.1, 0.2, 0.15, 0.15, 0.3]);
        assert_eq!(scan, MonotonicityScan { decreases: 1, increases: 2, unchanged: 1 });
        assert_eq!(decreases_per_period(&[0.0, 1.0, 0.5, 1.0, 0.5, 1.0, 0.5], 2, 3), vec![1, 1, 1]);
        assert!(eventually_nonincreasing(&[1.0, 3.0, 2.0, 1.0, 0.5], 0.6));
        assert!(!eventually_nonincreasing(&[1.0, 3.0, 2.0, 1.0, 1.5], 0.6));
    }

    #[test]
    fn worked_recursion_step() {
        let states = scripted_recursion(0.5, 0.1, 1.0, 1).unwrap();
        let st = states[0];
        let alpha = st.s - 1.0;
        assert!((alpha - 0.4489707966029793).abs() < 1e-14);
        assert!((st.g - 0.16481758559870806).abs() < 1e-14);
        assert!((st.x - (0.5 - st.g)).abs() == 0.0);
        let progress = st.g - 0.1;
        let lemma = alpha * (0.5 - 0.1) / (2.0 * st.s);
        assert!((progress - 0.064817585598708).abs() < 1e-13);
        assert!((lemma - 0.0619709931567376).abs() < 1e-13);
        assert!(progress >= lemma);
    }

    #[test]
    fn recursion_preconditions() {
        assert!(scripted_recursion(0.5, 0.5, 1.0, 1).is_err());
        assert!(scripted_recursion(0.5, 0.1, 0.0, 1).is_err());
        let script = EdgeScript::constant(0.5).unwrap();
        assert!(Recursion::new(StepRule::ArcGv, &script, 0.5, 0.1, 1.0).is_err());
        let finite = EdgeScript::finite(vec![0.5]).unwrap();
        let mut rec = Recursion::new(StepRule::AdaBoost, &finite, 0.5, 0.1, 1.0).unwrap();
        assert!(rec.step().is_ok());
        assert!(matches!(rec.step(), Err(Error::ScriptExhausted { .. })));
    }

    #[test]
    fn recursion_is_monotone_and_below_rho() {
        let states = scripted_recursion(0.5, 0.1, 1.0, 10_000).unwrap();
        let mut prev = (1.0, 0.1);
        for st in &states {
            assert!(st.g > prev.1 && st.s > prev.0 && st.x > 0.0);
            prev = (st.s, st.g);
        }
    }

    #[test]
    fn synthetic_power_law_and_exponential() {
        let pts: Vec<(f64, f64)> = (1..=100_000).map(|t| (t as f64, (t as f64).powf(-1.0 / 3.0))).collect();
        let fit = decay_exponent(&pts, (100.0, 100_000.0)).unwrap();
        assert!((fit.slope + 1.0 / 3.0).abs() < 1e-6);
        assert!(fit.power_law);
        assert!(fit.points <= DECAY_FIT_POINTS);

        let exp: Vec<(f64, f64)> = (1..=1000).map(|t| (t as f64, (-(t as f64) / 50.0).exp())).collect();
        let narrow = decay_exponent(&exp, (10.0, 100.0)).unwrap();
        let wide = decay_exponent(&exp, (10.0, 1000.0)).unwrap();
        assert!(wide.slope < narrow.slope);
        assert!(!wide.power_law);
        assert!(decay_exponent(&[(1.0, 0.0), (5.0, 1.0), (20.0, 1.0)], (1.0, 20.0)).is_err());
        assert!(decay_exponent(&pts, (100.0, 500.0)).is_err());
    }
}
