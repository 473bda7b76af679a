//! Problem data for online convex function chasing with a long-term constraint.
//!
//! A player picks `x_t ∈ [0,1]^d` each step, pays the linear hitting cost
//! `f_t · x_t` plus the weighted-ℓ1 movement `‖x_t − x_{t−1}‖_w`, starts and ends
//! at the origin, and must reach cumulative throughput `Σ_t c(x_t) ≥ 1` where
//! `c(x) = ‖x‖_c`.

use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, CflError, Result};

/// Absolute tolerance on the long-term constraint.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Magnitudes at or below this are treated as zero when deciding whether a
/// player "accepted" anything in a step.
pub const ACTIVITY_EPS: f64 = 1e-12;

/// A single online decision `x ∈ [0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Decision(pub Vec<f64>);

impl Decision {
    pub fn zeros(d: usize) -> Self {
        Decision(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|v| v.abs() <= ACTIVITY_EPS)
    }

    /// Convex combination `λ·a + (1−λ)·b`.
    pub fn mix(lambda: f64, a: &Decision, b: &Decision) -> Result<Decision> {
        check_dim(a.dim(), b.dim())?;
        Ok(Decision(
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                .collect(),
        ))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Decision {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Decision {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Decision {
    fn from(v: Vec<f64>) -> Self {
        Decision(v)
    }
}

/// `Σ_i weights^i · |x^i|`.
pub fn weighted_l1(x: &[f64], weights: &[f64]) -> Result<f64> {
    check_dim(weights.len(), x.len())?;
    Ok(weighted_l1_unchecked(x, weights))
}

#[inline]
pub(crate) fn weighted_l1_unchecked(x: &[f64], weights: &[f64]) -> f64 {
    x.iter().zip(weights).map(|(v, w)| w * v.abs()).sum()
}

/// `‖a − b‖_w` without allocating.
#[inline]
pub(crate) fn weighted_distance(a: &[f64], b: &[f64], weights: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(weights)
        .map(|((x, y), w)| w * (x - y).abs())
        .sum()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Linear hitting cost `f_t · x`.
pub fn evaluate_cost(cost: &[f64], x: &[f64]) -> Result<f64> {
    check_dim(cost.len(), x.len())?;
    Ok(dot(cost, x))
}

/// Everything about an instance except the cost sequence. Online players are
/// constructed from this, since costs are revealed one step at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub horizon: usize,
    pub lower: f64,
    pub upper: f64,
    pub c_weights: Vec<f64>,
    pub w_weights: Vec<f64>,
}

impl Setting {
    pub fn new(
        horizon: usize,
        lower: f64,
        upper: f64,
        c_weights: Vec<f64>,
        w_weights: Vec<f64>,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(CflError::domain("horizon must be positive"));
        }
        if c_weights.is_empty() {
            return Err(CflError::domain("dimension must be positive"));
        }
        check_dim(c_weights.len(), w_weights.len())?;
        if !(lower > 0.0 && lower.is_finite() && upper.is_finite() && upper >= lower) {
            return Err(CflError::domain(format!(
                "bounds must satisfy 0 < L <= U, got L={lower}, U={upper}"
            )));
        }
        if c_weights.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(CflError::domain("constraint weights must be positive"));
        }
        if w_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(CflError::domain("switching weights must be non-negative"));
        }
        Ok(Setting {
            horizon,
            lower,
            upper,
            c_weights,
            w_weights,
        })
    }

    pub fn d(&self) -> usize {
        self.c_weights.len()
    }

    /// `β = max_i w^i / c^i`.
    pub fn beta(&self) -> f64 {
        self.w_weights
            .iter()
            .zip(&self.c_weights)
            .map(|(w, c)| w / c)
            .fold(0.0, f64::max)
    }

    pub fn max_c(&self) -> f64 {
        self.c_weights.iter().copied().fold(0.0, f64::max)
    }

    /// `c(x) = ‖x‖_c`.
    pub fn constraint_value(&self, x: &[f64]) -> Result<f64> {
        weighted_l1(x, &self.c_weights)
    }

    pub fn switching(&self, x: &[f64], prev: &[f64]) -> Result<f64> {
        check_dim(self.d(), x.len())?;
        check_dim(self.d(), prev.len())?;
        Ok(weighted_distance(x, prev, &self.w_weights))
    }

    /// Index of the largest constraint weight, lowest index on ties.
    pub fn max_c_index(&self) -> usize {
        argmax_first(&self.c_weights)
    }
}

pub(crate) fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmin_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

/// A full problem instance: setting plus `T` linear cost vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub setting: Setting,
    pub costs: Vec<Vec<f64>>,
}

impl Instance {
    pub fn new(setting: Setting, costs: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(setting.horizon, costs.len())?;
        for f in &costs {
            check_dim(setting.d(), f.len())?;
            if f.iter().any(|v| !v.is_finite()) {
                return Err(CflError::domain("cost coefficients must be finite"));
            }
        }
        Ok(Instance { setting, costs })
    }

    pub fn d(&self) -> usize {
        self.setting.d()
    }

    pub fn horizon(&self) -> usize {
        self.setting.horizon
    }

    pub fn beta(&self) -> f64 {
        self.setting.beta()
    }

    pub fn lower(&self) -> f64 {
        self.setting.lower
    }

    pub fn upper(&self) -> f64 {
        self.setting.upper
    }
}

pub fn constraint_value(x: &[f64], instance: &Instance) -> Result<f64> {
    instance.setting.constraint_value(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub hitting: f64,
    pub switching: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(hitting: f64, switching: f64) -> Self {
        CostBreakdown {
            hitting,
            switching,
            total: hitting + switching,
        }
    }
}

/// Hitting plus switching cost of a full decision sequence, including the moves
/// out of and back into the origin.
pub fn trajectory_cost(instance: &Instance, decisions: &[Decision]) -> Result<CostBreakdown> {
    check_dim(instance.horizon(), decisions.len())?;
    let setting = &instance.setting;
    let mut acc = CostAccumulator::new(setting.d());
    for (f, x) in instance.costs.iter().zip(decisions) {
        check_dim(setting.d(), x.dim())?;
        acc.push(f, x, &setting.w_weights);
    }
    Ok(acc.finish(&setting.w_weights))
}

/// Streaming cost accounting, one step at a time.
#[derive(Debug, Clone)]
pub struct CostAccumulator {
    prev: Vec<f64>,
    hitting: f64,
    switching: f64,
}

impl CostAccumulator {
    pub fn new(d: usize) -> Self {
        CostAccumulator {
            prev: vec![0.0; d],
            hitting: 0.0,
            switching: 0.0,
        }
    }

    /// Adds step cost and returns the increment `f·x + ‖x − x_prev‖_w`.
    pub fn push(&mut self, cost: &[f64], x: &[f64], w: &[f64]) -> f64 {
        let hit = dot(cost, x);
        let sw = weighted_distance(x, &self.prev, w);
        self.hitting += hit;
        self.switching += sw;
        self.prev.copy_from_slice(x);
        hit + sw
    }

    /// Cost so far, excluding the final move back to the origin.
    pub fn running_total(&self) -> f64 {
        self.hitting + self.switching
    }

    pub fn finish(&self, w: &[f64]) -> CostBreakdown {
        let closing = weighted_l1_unchecked(&self.prev, w);
        CostBreakdown::new(self.hitting, self.switching + closing)
    }
}

/// A complete decision sequence with its cost breakdown and cumulative utilization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub decisions: Vec<Decision>,
    pub hitting_cost: f64,
    pub switching_cost: f64,
    pub utilization_profile: Vec<f64>,
    /// Steps where a constrained solve had no feasible point and fell back to the advice.
    #[serde(default)]
    pub fallback_steps: usize,
}

impl Trajectory {
    pub fn from_decisions(instance: &Instance, decisions: Vec<Decision>) -> Result<Self> {
        let costs = trajectory_cost(instance, &decisions)?;
        let mut z = 0.0;
        let utilization_profile = decisions
            .iter()
            .map(|x| {
                z += weighted_l1_unchecked(x, &instance.setting.c_weights);
                z
            })
            .collect();
        Ok(Trajectory {
            decisions,
            hitting_cost: costs.hitting,
            switching_cost: costs.switching,
            utilization_profile,
            fallback_steps: 0,
        })
    }

    pub fn total_cost(&self) -> f64 {
        self.hitting_cost + self.switching_cost
    }

    pub fn breakdown(&self) -> CostBreakdown {
        CostBreakdown::new(self.hitting_cost, self.switching_cost)
    }

    pub fn final_utilization(&self) -> f64 {
        self.utilization_profile.last().copied().unwrap_or(0.0)
    }

    pub fn is_feasible(&self) -> bool {
        self.final_utilization() >= 1.0 - FEASIBILITY_TOL
    }
}

/// A violated instance invariant. Violations are reported as data.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    BoundsOrder { lower: f64, upper: f64 },
    GradientBelowLower { t: usize, i: usize, ratio: f64 },
    GradientAboveUpper { t: usize, i: usize, ratio: f64 },
    BetaTooLarge { beta: f64, limit: f64 },
    Unfinishable { capacity: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BoundsOrder { lower, upper } => {
                write!(f, "U ≤ L (L={lower}, U={upper})")
            }
            Violation::GradientBelowLower { t, i, ratio } => {
                write!(f, "gradient below L at t={t}, i={i} (f/c={ratio})")
            }
            Violation::GradientAboveUpper { t, i, ratio } => {
                write!(f, "gradient above U at t={t}, i={i} (f/c={ratio})")
            }
            Violation::BetaTooLarge { beta, limit } => {
                write!(f, "β ≥ (U−L)/2 (β={beta}, limit={limit})")
            }
            Violation::Unfinishable { capacity } => {
                write!(f, "T·max c < 1 (capacity {capacity})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub violations: Vec<Violation>,
    pub beta: f64,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_instance(instance: &Instance) -> Validation {
    let s = &instance.setting;
    let (lower, upper) = (s.lower, s.upper);
    let beta = s.beta();
    let mut violations = Vec::new();
    if upper <= lower {
        violations.push(Violation::BoundsOrder { lower, upper });
    }
    let slack = 1e-12 * upper.max(1.0);
    for (t, f) in instance.costs.iter().enumerate() {
        for (i, (fi, ci)) in f.iter().zip(&s.c_weights).enumerate() {
            let ratio = fi / ci;
            if ratio < lower - slack {
                violations.push(Violation::GradientBelowLower { t: t + 1, i, ratio });
            } else if ratio > upper + slack {
                violations.push(Violation::GradientAboveUpper { t: t + 1, i, ratio });
            }
        }
    }
    let limit = (upper - lower) / 2.0;
    if beta >= limit && !(beta == 0.0 && limit == 0.0 && upper <= lower) {
        violations.push(Violation::BetaTooLarge { beta, limit });
    }
    let capacity = s.horizon as f64 * s.max_c();
    if capacity < 1.0 - FEASIBILITY_TOL {
        violations.push(Violation::Unfinishable { capacity });
    }
    Validation { violations, beta }
}

/// True when the steps remaining after `t` can no longer finish the constraint
/// from utilization `z` in any single dimension: `(T − (t+1))·c^i < 1 − z ∀i`.
///
/// Players evaluate this with `t − 1` and `z^(t−1)` before deciding step `t`, so
/// that step `t` is the first step of the compulsory trade.
pub fn compulsory_start(t: usize, z: f64, setting: &Setting) -> bool {
    let remaining = setting.horizon as f64 - (t as f64 + 1.0);
    let need = 1.0 - z;
    need > FEASIBILITY_TOL && setting.c_weights.iter().all(|c| remaining * c < need)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting(t: usize, c: Vec<f64>, w: Vec<f64>) -> Setting {
        Setting::new(t, 1.0, 10.0, c, w).unwrap()
    }

    #[test]
    fn weighted_l1_examples() {
        assert_eq!(weighted_l1(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(weighted_l1(&[1.0, 1.0], &[3.0, 4.0]).unwrap(), 7.0);
        assert_eq!(weighted_l1(&[0.5, -0.5], &[2.0, 2.0]).unwrap(), 2.0);
        assert!(matches!(
            weighted_l1(&[1.0], &[1.0, 2.0]),
            Err(CflError::Dimension { .. })
        ));
    }

    #[test]
    fn constraint_value_examples() {
        let s = setting(4, vec![1.0, 1.0], vec![0.0, 0.0]);
        assert_eq!(s.constraint_value(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((s.constraint_value(&[0.3, 0.2]).unwrap() - 0.5).abs() < 1e-15);
        let s1 = setting(4, vec![0.25], vec![0.0]);
        assert_eq!(s1.constraint_value(&[1.0]).unwrap(), 0.25);
        assert!(s1.constraint_value(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn evaluate_cost_examples() {
        assert_eq!(evaluate_cost(&[5.0, 7.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(evaluate_cost(&[5.0, 7.0], &[1.0, 0.0]).unwrap(), 5.0);
        assert_eq!(evaluate_cost(&[5.0, 7.0], &[0.5, 0.5]).unwrap(), 6.0);
        assert!(evaluate_cost(&[5.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn trajectory_cost_examples() {
        let inst = Instance::new(
            setting(2, vec![1.0], vec![1.0]),
            vec![vec![3.0], vec![9.0]],
        )
        .unwrap();
        let idle = trajectory_cost(&inst, &[Decision::zeros(1), Decision::zeros(1)]).unwrap();
        assert_eq!(idle, CostBreakdown::new(0.0, 0.0));
        let c = trajectory_cost(&inst, &[vec![1.0].into(), vec![0.0].into()]).unwrap();
        assert_eq!((c.hitting, c.switching, c.total), (3.0, 2.0, 5.0));

        let inst2 = Instance::new(
            setting(2, vec![1.0, 1.0], vec![1.0, 2.0]),
            vec![vec![3.0, 3.0], vec![3.0, 3.0]],
        )
        .unwrap();
        let c2 =
            trajectory_cost(&inst2, &[vec![1.0, 0.0].into(), vec![0.0, 1.0].into()]).unwrap();
        // up 1·1, swap 1·1 + 2·1, down 2·1
        assert_eq!((c2.hitting, c2.switching, c2.total), (6.0, 6.0, 12.0));

        assert!(trajectory_cost(&inst2, &[vec![1.0, 0.0].into()]).is_err());
    }

    #[test]
    fn validate_instance_examples() {
        let ok = Instance::new(
            setting(4, vec![1.0], vec![4.0]),
            vec![vec![2.0]; 4],
        )
        .unwrap();
        let v = validate_instance(&ok);
        assert!(v.is_valid(), "{:?}", v.violations);
        assert_eq!(v.beta, 4.0);

        let boundary = Instance::new(setting(4, vec![1.0], vec![5.0]), vec![vec![2.0]; 4]).unwrap();
        let v = validate_instance(&boundary);
        assert!(matches!(v.violations[..], [Violation::BetaTooLarge { .. }]));
        assert!(v.violations[0].to_string().contains("β ≥ (U−L)/2"));

        let low = Instance::new(setting(4, vec![1.0], vec![0.0]), vec![vec![0.5]; 4]).unwrap();
        let v = validate_instance(&low);
        assert!(v
            .violations
            .iter()
            .all(|x| matches!(x, Violation::GradientBelowLower { .. })));
        assert_eq!(v.violations.len(), 4);
        assert!(v.violations[0].to_string().contains("gradient below L"));

        let short = Instance::new(setting(2, vec![0.25], vec![0.0]), vec![vec![0.5]; 2]).unwrap();
        assert!(validate_instance(&short)
            .violations
            .iter()
            .any(|x| matches!(x, Violation::Unfinishable { .. })));
    }

    #[test]
    fn compulsory_start_examples() {
        assert!(compulsory_start(1, 0.0, &setting(2, vec![1.0], vec![0.0])));
        assert!(!compulsory_start(1, 0.0, &setting(24, vec![1.0; 3], vec![0.0; 3])));
        assert!(compulsory_start(8, 0.5, &setting(10, vec![0.4], vec![0.0])));
        // finished constraint never triggers
        assert!(!compulsory_start(1, 1.0, &setting(2, vec![1.0], vec![0.0])));
    }

    #[test]
    fn setting_rejects_bad_data() {
        assert!(Setting::new(0, 1.0, 2.0, vec![1.0], vec![0.0]).is_err());
        assert!(Setting::new(2, 0.0, 2.0, vec![1.0], vec![0.0]).is_err());
        assert!(Setting::new(2, 1.0, 2.0, vec![0.0], vec![0.0]).is_err());
        assert!(Setting::new(2, 1.0, 2.0, vec![1.0], vec![-1.0]).is_err());
        assert!(Setting::new(2, 1.0, 2.0, vec![1.0], vec![0.0, 1.0]).is_err());
    }
}
