//! Weight distributions, coefficient state and the closed-form quantities
//! built on them: exponential loss, smooth margin, margin, edges, `Υ`, and
//! the one-step recursions for `F` and `G`.

use crate::error::{Error, Result};
use crate::matrix::{column_edge, GameMatrix};

/// Edges this close to ±1 are treated as perfect classifiers.
pub const EDGE_LIMIT: f64 = 1.0 - 1e-12;

/// A probability distribution over the training examples.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDist {
    weights: Vec<f64>,
}

impl WeightDist {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not a nonnegative real")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(WeightDist { weights })
    }

    pub fn uniform(m: usize) -> Self {
        WeightDist { weights: vec![1.0 / m as f64; m] }
    }

    /// Normalizes arbitrary nonnegative masses onto the simplex.
    pub(crate) fn from_masses(mut masses: Vec<f64>) -> Self {
        let z: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|w| *w /= z);
        WeightDist { weights: masses }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `max_i d_i / min_i d_i` (infinite when some weight is zero).
    pub fn max_ratio(&self) -> f64 {
        let (lo, hi) = self
            .weights
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &w| (lo.min(w), hi.max(w)));
        hi / lo
    }

    /// `max_i |self_i - other_i|`.
    pub fn linf_distance(&self, other: &WeightDist) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Unnormalized coefficients `λ`, their sum `s = ‖λ‖₁` and the cached
/// margins `Mλ`.
///
/// `lambda` is indexed by column slot; slots past the end are created on
/// demand so that implicit columns can be registered during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    lambda: Vec<f64>,
    s: f64,
    margins: Vec<f64>,
}

impl ModelState {
    /// The origin `λ = 0` for `m` examples and `n` column slots.
    pub fn zeros(m: usize, n: usize) -> Self {
        ModelState { lambda: vec![0.0; n], s: 0.0, margins: vec![0.0; m] }
    }

    /// Builds a state from explicit coefficients, computing `Mλ` in full.
    pub fn from_lambda(matrix: &GameMatrix, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != matrix.cols() {
            return Err(Error::Dimension { expected: matrix.cols(), got: lambda.len() });
        }
        if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::Domain(format!("coefficient {l} is not a nonnegative real")));
        }
        let margins = matrix.mul_vec(&lambda);
        let s = lambda.iter().sum();
        Ok(ModelState { lambda, s, margins })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    pub fn num_examples(&self) -> usize {
        self.margins.len()
    }

    /// `λ ← λ + α e_slot`, updating `s` and `Mλ` incrementally.
    pub fn add_step(&mut self, slot: usize, column: &[i8], alpha: f64) {
        debug_assert_eq!(column.len(), self.margins.len());
        if slot >= self.lambda.len() {
            self.lambda.resize(slot + 1, 0.0);
        }
        self.lambda[slot] += alpha;
        self.s += alpha;
        for (mg, &c) in self.margins.iter_mut().zip(column) {
            *mg += alpha * f64::from(c);
        }
    }

    /// Recomputes `s` and `Mλ` from scratch using the given column lookup and
    /// returns the largest absolute drift found in the cached margins.
    pub fn recompute<'a, F>(&mut self, column_of: F) -> f64
    where
        F: Fn(usize) -> &'a [i8],
    {
        let mut fresh = vec![0.0; self.margins.len()];
        for (slot, &l) in self.lambda.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            for (f, &c) in fresh.iter_mut().zip(column_of(slot)) {
                *f += l * f64::from(c);
            }
        }
        let drift = fresh
            .iter()
            .zip(&self.margins)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.margins = fresh;
        self.s = self.lambda.iter().sum();
        drift
    }

    fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `ln Σ_i exp(-[(Mλ)_i - min(Mλ)])`, always in `[0, ln m]`.
    fn shifted_log_sum(&self) -> f64 {
        let lo = self.min_margin();
        self.margins.iter().map(|&v| (-(v - lo)).exp()).sum::<f64>().ln()
    }

    /// `ln F(λ)` with `F(λ) = Σ_i exp(-(Mλ)_i)`.
    pub fn log_loss(&self) -> f64 {
        -self.min_margin() + self.shifted_log_sum()
    }

    /// The margin `μ(λ) = min_i (Mλ)_i / s`.
    pub fn margin(&self) -> Result<f64> {
        if self.s <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.min_margin() / self.s)
    }

    /// The smooth margin `G(λ) = -ln F(λ) / s`, evaluated in the shifted form
    /// `μ - ln Σ exp(-[(Mλ)_i - min(Mλ)]) / s`.
    pub fn smooth_margin(&self) -> Result<f64> {
        let mu = self.margin()?;
        Ok(mu - self.shifted_log_sum() / self.s)
    }

    /// Examples attaining the minimum margin, within `tol` in normalized units.
    pub fn support_vectors(&self, tol: f64) -> Result<Vec<usize>> {
        let mu = self.margin()?;
        Ok((0..self.margins.len())
            .filter(|&i| self.margins[i] / self.s - mu <= tol)
            .collect())
    }

    /// The AdaBoost weight vector implied by the margins,
    /// `d_i ∝ exp(-(Mλ)_i)`.
    pub fn implied_weights(&self) -> WeightDist {
        let lo = self.min_margin();
        WeightDist::from_masses(self.margins.iter().map(|&v| (-(v - lo)).exp()).collect())
    }
}

/// `ln F(λ)`; see [`ModelState::log_loss`].
pub fn exp_loss_log(state: &ModelState) -> f64 {
    state.log_loss()
}

/// `G(λ)`; see [`ModelState::smooth_margin`].
pub fn smooth_margin(state: &ModelState) -> Result<f64> {
    state.smooth_margin()
}

/// `μ(λ)`; see [`ModelState::margin`].
pub fn margin(state: &ModelState) -> Result<f64> {
    state.margin()
}

/// The edge `(dᵀM)_j = d₊ - d₋` of column `j`.
pub fn edge(matrix: &GameMatrix, d: &WeightDist, j: usize) -> Result<f64> {
    if j >= matrix.cols() {
        return Err(Error::Domain(format!("column {j} out of range 0..{}", matrix.cols())));
    }
    if d.len() != matrix.rows() {
        return Err(Error::Dimension { expected: matrix.rows(), got: d.len() });
    }
    Ok(column_edge(matrix.column(j), d.as_slice()))
}

/// `Υ(r) = -ln(1 - r²) / ln((1 + r)/(1 - r))` on `(0, 1)`.
pub fn upsilon(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("upsilon needs 0 < r < 1, got {r}")));
    }
    // ln(1 - r²) = ln1p(-r) + ln1p(r) and ln((1+r)/(1-r)) = 2 atanh r
    Ok(-((-r).ln_1p() + r.ln_1p()) / (2.0 * r.atanh()))
}

/// `γ = tanh⁻¹ r`, rejecting `|r| ≥ 1 - 1e-12`.
pub fn gamma_of(r: f64) -> Result<f64> {
    if !r.is_finite() || r.abs() >= EDGE_LIMIT {
        return Err(Error::DegenerateEdge(r));
    }
    Ok(r.atanh())
}

/// One multiplicative weight update `d_i e^{-c_i α} / z`.
pub fn update_weights(d: &WeightDist, column: &[i8], alpha: f64) -> WeightDist {
    debug_assert_eq!(d.len(), column.len());
    if alpha == 0.0 {
        return d.clone();
    }
    let (down, up) = ((-alpha).exp(), alpha.exp());
    WeightDist::from_masses(
        d.as_slice()
            .iter()
            .zip(column)
            .map(|(&w, &c)| if c > 0 { w * down } else { w * up })
            .collect(),
    )
}

/// `ln cosh x`, stable for large `|x|`.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln(cosh γ / cosh(γ - α))`, the exact log-loss decrease of a step `α`
/// along a column with `γ = tanh⁻¹ r`.
pub fn log_cosh_ratio(gamma: f64, alpha: f64) -> f64 {
    ln_cosh(gamma) - ln_cosh(gamma - alpha)
}

/// Applies the one-step recursions for `ln F` and `G` without touching the
/// matrix:
///
/// `ln F' = ln F + ln(cosh(γ - α)/cosh γ)` and
/// `G' = [s G + ln(cosh γ / cosh(γ - α))] / (s + α)`.
pub fn recursion_check(log_f: f64, g: f64, s: f64, gamma: f64, alpha: f64) -> (f64, f64) {
    let gain = log_cosh_ratio(gamma, alpha);
    let next_log_f = log_f - gain;
    let next_g = if alpha == 0.0 { g } else { (s * g + gain) / (s + alpha) };
    (next_log_f, next_g)
}

/// `wᵀHw` for the Hessian `H` of `G` at `λ`, restricted to directions with
/// `Σ_j w_j = 0` (the shell `‖λ‖₁ = s`).
///
/// Evaluated with normalized weights `p_i = e^{-(Mλ)_i}/F`, which equals
/// `[-Σ(Mw)_i² e^{-(Mλ)_i} · F + (Σ(Mw)_i e^{-(Mλ)_i})²] / (F² s)`.
pub fn shell_quadratic_form(matrix: &GameMatrix, state: &ModelState, w: &[f64]) -> Result<f64> {
    if state.s() <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    if w.len() != matrix.cols() {
        return Err(Error::Dimension { expected: matrix.cols(), got: w.len() });
    }
    let scale = w.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let total: f64 = w.iter().sum();
    if total.abs() > 1e-12 * scale {
        return Err(Error::Domain(format!("direction must satisfy Σw = 0, got {total}")));
    }
    let mw = matrix.mul_vec(w);
    let p = state.implied_weights();
    let (mut first, mut second) = (0.0, 0.0);
    for (&v, &pi) in mw.iter().zip(p.as_slice()) {
        first += pi * v;
        second += pi * v * v;
    }
    Ok((first * first - second) / state.s())
}
