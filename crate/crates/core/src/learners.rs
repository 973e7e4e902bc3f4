//! Weak learners: the exhaustive optimal learner, the goal-edge learner,
//! the constructive bounded-edge learner (implicit columns) and scripted
//! edges for matrix-free simulations.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::margin::WeightDist;
use crate::matrix::{column_edge, GameMatrix};

/// Floating slack used when comparing a prefix edge against its target.
pub const PREFIX_EDGE_SLACK: f64 = 1e-12;

/// A column chosen by a weak learner.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Column {
    /// Column `j` of the game matrix.
    Index(usize),
    /// A ±1 column generated on demand, not stored in any matrix.
    Implicit(Vec<i8>),
}

/// A weak learner's answer: the column and its realized edge under `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSelection {
    pub column: Column,
    pub r: f64,
}

/// The weak-learner contract used by the boosting loop.
pub trait WeakLearner {
    /// Number of training examples `m`.
    fn num_examples(&self) -> usize;

    /// The explicit matrix, when columns are indices into one.
    fn matrix(&self) -> Option<&GameMatrix>;

    fn select(&self, d: &WeightDist) -> Result<WeakSelection>;

    /// The ±1 entries of a selected column.
    fn entries<'a>(&'a self, column: &'a Column) -> &'a [i8] {
        match column {
            Column::Index(j) => self
                .matrix()
                .expect("indexed column from a learner without a matrix")
                .column(*j),
            Column::Implicit(v) => v,
        }
    }
}

fn check_dims(matrix: &GameMatrix, d: &WeightDist) -> Result<()> {
    if d.len() != matrix.rows() {
        return Err(Error::Dimension { expected: matrix.rows(), got: d.len() });
    }
    Ok(())
}

/// The column of maximum edge; ties go to the lowest index.
pub fn optimal_select(matrix: &GameMatrix, d: &WeightDist) -> Result<WeakSelection> {
    check_dims(matrix, d)?;
    let mut best = (0, f64::NEG_INFINITY);
    for j in 0..matrix.cols() {
        let r = column_edge(matrix.column(j), d.as_slice());
        if r > best.1 {
            best = (j, r);
        }
    }
    Ok(WeakSelection { column: Column::Index(best.0), r: best.1 })
}

/// Among columns with strictly positive edge, the one whose edge is closest
/// to `goal`; ties go to the lowest index.
pub fn goal_edge_select(matrix: &GameMatrix, d: &WeightDist, goal: f64) -> Result<WeakSelection> {
    check_dims(matrix, d)?;
    if !(goal > 0.0 && goal < 1.0) {
        return Err(Error::Domain(format!("goal edge must lie in (0, 1), got {goal}")));
    }
    let mut best: Option<(usize, f64, f64)> = None;
    for j in 0..matrix.cols() {
        let r = column_edge(matrix.column(j), d.as_slice());
        if r <= 0.0 {
            continue;
        }
        let dist = (r - goal).abs();
        if best.is_none_or(|(_, _, bd)| dist < bd) {
            best = Some((j, r, dist));
        }
    }
    let (j, r, _) = best.ok_or(Error::NoPositiveEdge)?;
    Ok(WeakSelection { column: Column::Index(j), r })
}

/// The maximum-edge learner over an explicit matrix.
#[derive(Debug, Clone, Copy)]
pub struct OptimalLearner<'a> {
    pub matrix: &'a GameMatrix,
}

impl WeakLearner for OptimalLearner<'_> {
    fn num_examples(&self) -> usize {
        self.matrix.rows()
    }
    fn matrix(&self) -> Option<&GameMatrix> {
        Some(self.matrix)
    }
    fn select(&self, d: &WeightDist) -> Result<WeakSelection> {
        optimal_select(self.matrix, d)
    }
}

/// Picks the positive edge closest to a prespecified goal.
#[derive(Debug, Clone, Copy)]
pub struct GoalEdgeLearner<'a> {
    pub matrix: &'a GameMatrix,
    pub goal: f64,
}

impl WeakLearner for GoalEdgeLearner<'_> {
    fn num_examples(&self) -> usize {
        self.matrix.rows()
    }
    fn matrix(&self) -> Option<&GameMatrix> {
        Some(self.matrix)
    }
    fn select(&self, d: &WeightDist) -> Result<WeakSelection> {
        goal_edge_select(self.matrix, d, self.goal)
    }
}

/// Parameters of the bounded-edge construction.
///
/// The implicit matrix holds every ±1 column with at most `cap =
/// m(ρ̄+1)/2` entries equal to `+1`; with `φ ≥ (1+ρ̄+σ)/(1-ρ̄-σ)` and
/// `m ≥ 2φ/σ` the prefix learner always realizes an edge in `[ρ̄, ρ̄+σ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedEdgeParams {
    rho_bar: f64,
    sigma: f64,
    phi: f64,
    m: usize,
    cap: usize,
}

impl BoundedEdgeParams {
    pub fn new(rho_bar: f64, sigma: f64, phi: f64, m: usize) -> Result<Self> {
        if !(rho_bar > 0.0 && rho_bar < 1.0) {
            return Err(Error::BoundedEdgeParams(format!("rho_bar must lie in (0, 1), got {rho_bar}")));
        }
        if !(sigma > 0.0 && rho_bar + sigma < 1.0) {
            return Err(Error::BoundedEdgeParams(format!(
                "need sigma > 0 and rho_bar + sigma < 1, got sigma = {sigma}"
            )));
        }
        let phi_min = Self::min_phi(rho_bar, sigma);
        if !(phi >= phi_min * (1.0 - 1e-12)) {
            return Err(Error::BoundedEdgeParams(format!("phi must be at least {phi_min}, got {phi}")));
        }
        let cap_exact = m as f64 * (rho_bar + 1.0) / 2.0;
        let cap = cap_exact.round();
        let admissible = (m as f64) >= 2.0 * phi / sigma && (cap_exact - cap).abs() <= 1e-9;
        if !admissible {
            let hint = Self::smallest_admissible_m(rho_bar, sigma, phi)
                .map_or_else(|| "none found".to_string(), |v| v.to_string());
            return Err(Error::BoundedEdgeParams(format!(
                "m = {m} needs m >= 2*phi/sigma = {:.4} and m*(rho_bar+1)/2 integral; smallest admissible m is {hint}",
                2.0 * phi / sigma
            )));
        }
        Ok(BoundedEdgeParams { rho_bar, sigma, phi, m, cap: cap as usize })
    }

    /// Uses the smallest admissible ratio cap `φ = (1+ρ̄+σ)/(1-ρ̄-σ)`.
    pub fn with_min_phi(rho_bar: f64, sigma: f64, m: usize) -> Result<Self> {
        Self::new(rho_bar, sigma, Self::min_phi(rho_bar, sigma), m)
    }

    pub fn min_phi(rho_bar: f64, sigma: f64) -> f64 {
        (1.0 + rho_bar + sigma) / (1.0 - rho_bar - sigma)
    }

    /// Smallest `m ≥ 2φ/σ` with `m(ρ̄+1)/2` integral.
    pub fn smallest_admissible_m(rho_bar: f64, sigma: f64, phi: f64) -> Option<usize> {
        let start = (2.0 * phi / sigma - 1e-9).ceil().max(2.0) as usize;
        (start..start + 1_000_000).find(|&m| {
            let c = m as f64 * (rho_bar + 1.0) / 2.0;
            (c - c.round()).abs() <= 1e-9
        })
    }

    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn cap(&self) -> usize {
        self.cap
    }
}

/// The prefix chosen by the bounded-edge learner.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixChoice {
    /// Example indices sorted by weight, descending, ties by index.
    pub order: Vec<usize>,
    /// Length `ī` of the correctly classified prefix.
    pub i_bar: usize,
}

/// Sorts examples by weight and finds the smallest prefix `ī` with
/// `2 Σ_{k ≤ ī} d_(k) - 1 ≥ ρ̄`.
pub fn bounded_edge_prefix(d: &WeightDist, params: &BoundedEdgeParams) -> Result<PrefixChoice> {
    if d.len() != params.m {
        return Err(Error::Dimension { expected: params.m, got: d.len() });
    }
    let w = d.as_slice();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let mut prefix = 0.0;
    let mut i_bar = w.len();
    for (k, &i) in order.iter().enumerate() {
        prefix += w[i];
        if 2.0 * prefix - 1.0 >= params.rho_bar - PREFIX_EDGE_SLACK {
            i_bar = k + 1;
            break;
        }
    }
    if i_bar > params.cap {
        return Err(Error::PrefixCap { i_bar, cap: params.cap });
    }
    Ok(PrefixChoice { order, i_bar })
}

/// The implicit column that is `+1` on the top-`ī` examples.
pub fn bounded_edge_select(d: &WeightDist, params: &BoundedEdgeParams) -> Result<WeakSelection> {
    let choice = bounded_edge_prefix(d, params)?;
    let mut column = vec![-1i8; d.len()];
    for &i in &choice.order[..choice.i_bar] {
        column[i] = 1;
    }
    let r = column_edge(&column, d.as_slice());
    Ok(WeakSelection { column: Column::Implicit(column), r })
}

/// `K_t = max(max_{i,i'} d_i/d_{i'}, φ)`.
pub fn weight_ratio_statistic(d: &WeightDist, phi: f64) -> f64 {
    d.max_ratio().max(phi)
}

/// The iterated weight map for a prefix column: `d_i/(1+r)` on the first
/// `ī` entries and `d_i/(1-r)` on the rest. `d` must be sorted the way
/// [`bounded_edge_prefix`] orders it. No renormalization is applied; the
/// result sums to one exactly when `r` is the prefix edge.
pub fn weight_map_check(d: &[f64], i_bar: usize, r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("weight map needs 0 < r < 1, got {r}")));
    }
    if i_bar > d.len() {
        return Err(Error::Domain(format!("prefix {i_bar} longer than {}", d.len())));
    }
    Ok(d.iter()
        .enumerate()
        .map(|(k, &w)| if k < i_bar { w / (1.0 + r) } else { w / (1.0 - r) })
        .collect())
}

/// The bounded-edge learner over its implicit matrix.
#[derive(Debug, Clone, Copy)]
pub struct BoundedEdgeLearner {
    pub params: BoundedEdgeParams,
}

impl WeakLearner for BoundedEdgeLearner {
    fn num_examples(&self) -> usize {
        self.params.m
    }
    fn matrix(&self) -> Option<&GameMatrix> {
        None
    }
    fn select(&self, d: &WeightDist) -> Result<WeakSelection> {
        bounded_edge_select(d, &self.params)
    }
}

/// A sequence of edges supplied directly, with no matrix behind it.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeScript {
    Constant(f64),
    Finite(Vec<f64>),
    /// Repeats the listed edges forever.
    Cyclic(Vec<f64>),
}

impl EdgeScript {
    fn validate(edges: &[f64]) -> Result<()> {
        if edges.is_empty() {
            return Err(Error::Domain("empty edge script".into()));
        }
        match edges.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            Some(r) => Err(Error::Domain(format!("scripted edge {r} outside (0, 1)"))),
            None => Ok(()),
        }
    }

    pub fn constant(r: f64) -> Result<Self> {
        Self::validate(&[r])?;
        Ok(EdgeScript::Constant(r))
    }

    pub fn finite(edges: Vec<f64>) -> Result<Self> {
        Self::validate(&edges)?;
        Ok(EdgeScript::Finite(edges))
    }

    pub fn cyclic(edges: Vec<f64>) -> Result<Self> {
        Self::validate(&edges)?;
        Ok(EdgeScript::Cyclic(edges))
    }

    /// Length of a finite script, `None` for unbounded ones.
    pub fn len(&self) -> Option<usize> {
        match self {
            EdgeScript::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

/// The scripted edge at (0-based) step `t`.
pub fn scripted_select(script: &EdgeScript, t: usize) -> Result<f64> {
    match script {
        EdgeScript::Constant(r) => Ok(*r),
        EdgeScript::Finite(v) => v
            .get(t)
            .copied()
            .ok_or(Error::ScriptExhausted { t, len: v.len() }),
        EdgeScript::Cyclic(v) => Ok(v[t % v.len()]),
    }
}

impl FromStr for EdgeScript {
    type Err = Error;

    /// One edge per line; blank lines and `#` comments are ignored. The
    /// result is a finite script.
    fn from_str(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let r: f64 = body.parse().map_err(|_| Error::Parse {
                line: k + 1,
                msg: format!("invalid edge {body:?}"),
            })?;
            edges.push(r);
        }
        Self::finite(edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margin::{gamma_of, update_weights};
    use crate::matrix::cyclic_3x3;

    #[test]
    fn optimal_examples() {
        let m = cyclic_3x3();
        let s = optimal_select(&m, &WeightDist::uniform(3)).unwrap();
        assert_eq!(s.column, Column::Index(0));
        assert!((s.r - 1.0 / 3.0).abs() < 1e-15);
        let d = WeightDist::new(vec![0.25, 0.5, 0.25]).unwrap();
        let s = optimal_select(&m, &d).unwrap();
        assert_eq!(s.column, Column::Index(1));
        assert_eq!(s.r, 0.5);
        let one = GameMatrix::from_rows(&[vec![1], vec![-1], vec![1]]).unwrap();
        assert_eq!(optimal_select(&one, &d).unwrap().column, Column::Index(0));
    }

    #[test]
    fn goal_edge_examples() {
        let m = cyclic_3x3();
        let d = WeightDist::new(vec![0.25, 0.5, 0.25]).unwrap();
        // edge 0 of column 0 is filtered out; both positive edges are 1/2
        let s = goal_edge_select(&m, &d, 0.1).unwrap();
        assert_eq!((s.column, s.r), (Column::Index(1), 0.5));
        let s = goal_edge_select(&m, &d, 0.4).unwrap();
        assert_eq!(s.column, Column::Index(1));
        // goal above every edge: same as the optimal choice
        let u = WeightDist::uniform(3);
        assert_eq!(
            goal_edge_select(&m, &u, 0.99).unwrap(),
            optimal_select(&m, &u).unwrap()
        );
        let d2 = WeightDist::new(vec![0.5, 0.25, 0.25]).unwrap();
        // edges (0.5, 0.5, -0.5)... exact match goal
        assert_eq!(goal_edge_select(&m, &d2, 0.5).unwrap().r, 0.5);
    }

    #[test]
    fn goal_edge_signals_when_no_positive_edge() {
        let m = GameMatrix::from_rows(&[vec![1], vec![-1]]).unwrap();
        let d = WeightDist::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(goal_edge_select(&m, &d, 0.3), Err(Error::NoPositiveEdge));
    }

    #[test]
    fn bounded_edge_params_arithmetic() {
        let p = BoundedEdgeParams::new(0.3, 0.1, 7.0 / 3.0, 60).unwrap();
        assert_eq!(p.cap(), 39);
        let q = BoundedEdgeParams::with_min_phi(0.3, 0.1, 60).unwrap();
        assert!((q.phi() - 7.0 / 3.0).abs() < 1e-15);
        // 2φ/σ ≈ 46.7: m = 40 is too small, m = 61 is not integral
        let e = BoundedEdgeParams::new(0.3, 0.1, 7.0 / 3.0, 40).unwrap_err();
        assert!(e.to_string().contains("smallest admissible m is 60"), "{e}");
        assert!(BoundedEdgeParams::new(0.3, 0.1, 7.0 / 3.0, 61).is_err());
        assert!(BoundedEdgeParams::new(0.3, 0.1, 2.0, 60).is_err());
        assert!(BoundedEdgeParams::new(0.7, 0.3, 100.0, 600).is_err());
    }

    #[test]
    fn uniform_weights_hit_the_cap() {
        let p = BoundedEdgeParams::with_min_phi(0.3, 0.1, 60).unwrap();
        let u = WeightDist::uniform(60);
        let c = bounded_edge_prefix(&u, &p).unwrap();
        assert_eq!(c.i_bar, 39);
        assert_eq!(c.order, (0..60).collect::<Vec<_>>());
        let s = bounded_edge_select(&u, &p).unwrap();
        assert!((s.r - 0.3).abs() < 1e-12);
    }

    #[test]
    fn weight_map_hand_example() {
        let d = [0.5, 1.0 / 3.0, 1.0 / 6.0];
        let out = weight_map_check(&d, 2, 2.0 / 3.0).unwrap();
        for (a, b) in out.iter().zip([0.3, 0.2, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        let tiny = weight_map_check(&d, 1, 1e-15).unwrap();
        for (a, b) in tiny.iter().zip(d) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_map_equals_exponential_update() {
        let d = WeightDist::new(vec![0.3, 0.25, 0.2, 0.15, 0.1]).unwrap();
        for i_bar in 1..5 {
            let col: Vec<i8> = (0..5).map(|k| if k < i_bar { 1 } else { -1 }).collect();
            let r = column_edge(&col, d.as_slice());
            if r <= 0.0 {
                continue;
            }
            let mapped = weight_map_check(d.as_slice(), i_bar, r).unwrap();
            let updated = update_weights(&d, &col, gamma_of(r).unwrap());
            for (a, b) in mapped.iter().zip(updated.as_slice()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scripts() {
        let c = EdgeScript::constant(0.5).unwrap();
        assert_eq!(scripted_select(&c, 0).unwrap(), 0.5);
        assert_eq!(scripted_select(&c, 1_000_000).unwrap(), 0.5);
        let f = EdgeScript::finite(vec![0.2, 0.4]).unwrap();
        assert_eq!(scripted_select(&f, 1).unwrap(), 0.4);
        assert_eq!(scripted_select(&f, 2), Err(Error::ScriptExhausted { t: 2, len: 2 }));
        let a = EdgeScript::cyclic(vec![0.3, 0.5]).unwrap();
        assert_eq!(scripted_select(&a, 4).unwrap(), 0.3);
        assert_eq!(scripted_select(&a, 7).unwrap(), 0.5);
        assert!(EdgeScript::constant(1.0).is_err());
        let parsed: EdgeScript = "0.3\n# comment\n\n0.45 # inline\n".parse().unwrap();
        assert_eq!(parsed, EdgeScript::Finite(vec![0.3, 0.45]));
        assert!("0.3\nabc\n".parse::<EdgeScript>().is_err());
    }
}
