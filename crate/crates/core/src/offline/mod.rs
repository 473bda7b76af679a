//! Offline oracles: the optimal schedule, an objective-maximizing schedule and
//! synthetic advice between the two.
//!
//! The optimum is computed through the Lagrangian dual of the single coupling
//! constraint `Σ c(x_t) ≥ 1`. For a fixed multiplier each dimension is a 1-D
//! linear program with a total-variation penalty, whose minimizers include a 0/1
//! schedule found by a two-state dynamic program. The dual is concave and
//! piecewise linear, so a cutting-plane search over the multiplier terminates at
//! the exact maximizer, and the two supporting schedules mix into a primal optimum.

pub mod lp;

use serde::{Deserialize, Serialize};

use crate::error::{CflError, Result};
use crate::model::{trajectory_cost, Decision, Instance, Trajectory, FEASIBILITY_TOL};
use lp::{LinearProgram, LpStatus, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptMethod {
    /// Dual cutting plane with per-dimension dynamic programs.
    Lagrangian,
    /// Full linear program through the dense simplex.
    Simplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub method: String,
    pub iterations: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution {
    pub trajectory: Trajectory,
    pub objective: f64,
    pub solver_stats: SolverStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdviceConfig {
    pub xi: f64,
}

impl AdviceConfig {
    pub fn new(xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(CflError::domain(format!("xi={xi} outside [0,1]")));
        }
        Ok(AdviceConfig { xi })
    }
}

pub fn solve_opt(instance: &Instance) -> Result<OfflineSolution> {
    solve_opt_with(instance, OptMethod::Lagrangian)
}

pub fn solve_opt_with(instance: &Instance, method: OptMethod) -> Result<OfflineSolution> {
    check_finishable(instance)?;
    match method {
        OptMethod::Lagrangian => solve_lagrangian(instance),
        OptMethod::Simplex => solve_simplex(instance),
    }
}

fn check_finishable(instance: &Instance) -> Result<()> {
    let s = &instance.setting;
    if (s.horizon as f64) * s.c_weights.iter().sum::<f64>() < 1.0 - FEASIBILITY_TOL {
        return Err(CflError::Infeasible(
            "horizon too short to satisfy the long-term constraint".into(),
        ));
    }
    Ok(())
}

/// Minimizer of one relaxed dimension: a 0/1 schedule and its value.
struct Relaxed {
    on: Vec<bool>,
    value: f64,
}

/// `min Σ_t a_t·x_t + w·(number of switches)` over 0/1 schedules starting and
/// ending off. Ties resolve toward staying off.
fn relaxed_dimension(coef: impl Iterator<Item = f64>, w: f64, horizon: usize) -> Relaxed {
    let mut off = 0.0;
    let mut on = f64::INFINITY;
    // from_on[t][state]: whether the best path into `state` at t came from "on".
    let mut from_on = Vec::with_capacity(horizon);
    for a in coef {
        let off_from_on = on + w < off;
        let on_from_on = on <= off + w;
        let new_off = if off_from_on { on + w } else { off };
        let new_on = if on_from_on { on } else { off + w } + a;
        from_on.push([off_from_on, on_from_on]);
        off = new_off;
        on = new_on;
    }
    let end_on = on + w < off;
    let value = if end_on { on + w } else { off };
    let mut sched = vec![false; horizon];
    let mut state_on = end_on;
    for t in (0..horizon).rev() {
        sched[t] = state_on;
        state_on = from_on[t][usize::from(state_on)];
    }
    Relaxed { on: sched, value }
}

/// Dual function and its supporting schedule at multiplier `lambda`.
#[derive(Clone)]
struct DualPoint {
    lambda: f64,
    value: f64,
    /// Throughput `Σ c(x_t)` of the supporting schedule.
    throughput: f64,
    schedule: Vec<Vec<bool>>,
}

impl DualPoint {
    fn slope(&self) -> f64 {
        1.0 - self.throughput
    }

    fn line(&self, lambda: f64) -> f64 {
        self.value + self.slope() * (lambda - self.lambda)
    }
}

fn dual_at(instance: &Instance, lambda: f64) -> DualPoint {
    let s = &instance.setting;
    let mut value = lambda;
    let mut throughput = 0.0;
    let mut schedule = Vec::with_capacity(s.d());
    for i in 0..s.d() {
        let c = s.c_weights[i];
        let r = relaxed_dimension(
            instance.costs.iter().map(|f| f[i] - lambda * c),
            s.w_weights[i],
            s.horizon,
        );
        value += r.value;
        throughput += c * r.on.iter().filter(|b| **b).count() as f64;
        schedule.push(r.on);
    }
    DualPoint {
        lambda,
        value,
        throughput,
        schedule,
    }
}

fn schedule_decisions(schedule: &[Vec<bool>], horizon: usize) -> Vec<Vec<f64>> {
    (0..horizon)
        .map(|t| schedule.iter().map(|dim| f64::from(u8::from(dim[t]))).collect())
        .collect()
}

fn solve_lagrangian(instance: &Instance) -> Result<OfflineSolution> {
    let s = &instance.setting;
    let mut lo = dual_at(instance, 0.0);
    let mut hi_lambda = 2.0 * (s.upper + 2.0 * s.beta()) / s.c_weights.iter().copied().fold(f64::INFINITY, f64::min) + 1.0;
    let mut hi = dual_at(instance, hi_lambda);
    let mut iterations = 2;
    while hi.slope() > 0.0 {
        hi_lambda *= 2.0;
        hi = dual_at(instance, hi_lambda);
        iterations += 1;
        if !hi_lambda.is_finite() {
            return Err(CflError::numeric("dual bracket diverged"));
        }
    }
    if lo.slope() <= 0.0 {
        return Err(CflError::numeric("dual slope non-positive at zero multiplier"));
    }
    let mut best_dual = lo.value.max(hi.value);
    loop {
        if iterations > 10_000 {
            return Err(CflError::numeric("dual cutting plane did not terminate"));
        }
        let (sl, sh) = (lo.slope(), hi.slope());
        let mid = if sl - sh > 0.0 {
            ((hi.value - sh * hi.lambda) - (lo.value - sl * lo.lambda)) / (sl - sh)
        } else {
            0.5 * (lo.lambda + hi.lambda)
        }
        .clamp(lo.lambda, hi.lambda);
        let probe = dual_at(instance, mid);
        iterations += 1;
        best_dual = best_dual.max(probe.value);
        let cap = lo.line(mid).min(hi.line(mid));
        if probe.value >= cap - 1e-12 * (1.0 + cap.abs()) || hi.lambda - lo.lambda <= 1e-14 * (1.0 + hi.lambda) {
            break;
        }
        if probe.slope() > 0.0 {
            lo = probe;
        } else if probe.slope() < 0.0 {
            hi = probe;
        } else {
            lo = probe;
            hi = lo.clone();
            break;
        }
    }

    // Mix the two supporting schedules so that throughput is exactly one.
    let (tl, th) = (lo.throughput, hi.throughput);
    let theta = if th - tl > 0.0 { (th - 1.0) / (th - tl) } else { 0.0 };
    let xl = schedule_decisions(&lo.schedule, s.horizon);
    let xh = schedule_decisions(&hi.schedule, s.horizon);
    let decisions: Vec<Decision> = xl
        .iter()
        .zip(&xh)
        .map(|(a, b)| Decision(a.iter().zip(b).map(|(p, q)| theta * p + (1.0 - theta) * q).collect()))
        .collect();
    let trajectory = Trajectory::from_decisions(instance, decisions)?;
    let objective = trajectory.total_cost();
    let dual = best_dual;
    if objective > dual + 1e-7 * dual.abs().max(1.0) {
        return Err(CflError::numeric(format!(
            "duality gap {objective} vs {dual}"
        )));
    }
    Ok(OfflineSolution {
        trajectory,
        objective,
        solver_stats: SolverStats {
            method: "lagrangian".into(),
            iterations,
            status: "optimal".into(),
        },
    })
}

/// Builds the full linear program: decision variables, absolute-value auxiliaries
/// for every move including the two boundary moves, box bounds and the demand row.
pub fn opt_linear_program(instance: &Instance) -> LinearProgram {
    let s = &instance.setting;
    let (d, horizon) = (s.d(), s.horizon);
    let xv = |t: usize, i: usize| t * d + i;
    let n_x = horizon * d;
    let sv = |t: usize, i: usize| n_x + t * d + i; // t in 0..=horizon
    let mut lp = LinearProgram::new(n_x + (horizon + 1) * d);
    for t in 0..horizon {
        for i in 0..d {
            lp.objective[xv(t, i)] = instance.costs[t][i];
            lp.add_row(vec![(xv(t, i), 1.0)], Relation::Le, 1.0);
        }
    }
    for t in 0..=horizon {
        for i in 0..d {
            lp.objective[sv(t, i)] = s.w_weights[i];
            // s ≥ |x_t − x_{t−1}| with x outside [1, T] fixed at zero
            let mut diff = Vec::new();
            if t < horizon {
                diff.push((xv(t, i), 1.0));
            }
            if t > 0 {
                diff.push((xv(t - 1, i), -1.0));
            }
            let mut up = vec![(sv(t, i), 1.0)];
            up.extend(diff.iter().map(|&(j, v)| (j, -v)));
            lp.add_row(up, Relation::Ge, 0.0);
            let mut down = vec![(sv(t, i), 1.0)];
            down.extend(diff.iter().copied());
            lp.add_row(down, Relation::Ge, 0.0);
        }
    }
    let demand = (0..horizon)
        .flat_map(|t| (0..d).map(move |i| (t, i)))
        .map(|(t, i)| (xv(t, i), s.c_weights[i]))
        .collect();
    lp.add_row(demand, Relation::Ge, 1.0);
    lp
}

fn solve_simplex(instance: &Instance) -> Result<OfflineSolution> {
    let s = &instance.setting;
    let sol = opt_linear_program(instance).solve()?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(CflError::Infeasible("offline program infeasible".into())),
        LpStatus::Unbounded => return Err(CflError::numeric("offline program unbounded")),
    }
    let d = s.d();
    let decisions = (0..s.horizon)
        .map(|t| Decision(sol.values[t * d..(t + 1) * d].iter().map(|v| v.clamp(0.0, 1.0)).collect()))
        .collect();
    let trajectory = Trajectory::from_decisions(instance, decisions)?;
    Ok(OfflineSolution {
        objective: trajectory.total_cost(),
        trajectory,
        solver_stats: SolverStats {
            method: "simplex".into(),
            iterations: sol.pivots,
            status: "optimal".into(),
        },
    })
}

/// A feasible schedule with the largest hitting cost, meeting the demand exactly.
/// Among equally priced slots, the preferred dimension rotates with the step so that
/// consecutive purchases tend to switch dimensions.
pub fn solve_worst(instance: &Instance) -> Result<OfflineSolution> {
    check_finishable(instance)?;
    let s = &instance.setting;
    let (d, horizon) = (s.d(), s.horizon);
    let mut slots: Vec<(usize, usize)> = (0..horizon).flat_map(|t| (0..d).map(move |i| (t, i))).collect();
    let price = |t: usize, i: usize| instance.costs[t][i] / s.c_weights[i];
    slots.sort_by(|&(t1, i1), &(t2, i2)| {
        price(t2, i2)
            .total_cmp(&price(t1, i1))
            .then(((i1 + d - t1 % d) % d).cmp(&((i2 + d - t2 % d) % d)))
            .then(t1.cmp(&t2))
    });
    let mut x = vec![vec![0.0; d]; horizon];
    let mut left = 1.0;
    let mut used = 0;
    for (t, i) in slots {
        if left <= 0.0 {
            break;
        }
        let c = s.c_weights[i];
        let v = (left / c).min(1.0);
        x[t][i] = v;
        left -= v * c;
        used += 1;
    }
    let trajectory = Trajectory::from_decisions(instance, x.into_iter().map(Decision).collect())?;
    Ok(OfflineSolution {
        objective: trajectory.total_cost(),
        trajectory,
        solver_stats: SolverStats {
            method: "fractional-knapsack".into(),
            iterations: used,
            status: "optimal".into(),
        },
    })
}

/// Advice `(1−ξ)·x⋆_t + ξ·x̆_t` between the optimal and the worst schedule.
pub fn make_advice(instance: &Instance, xi: f64) -> Result<Vec<Decision>> {
    let cfg = AdviceConfig::new(xi)?;
    let opt = solve_opt(instance)?;
    let worst = solve_worst(instance)?;
    mix_advice(&opt.trajectory.decisions, &worst.trajectory.decisions, cfg.xi)
}

/// Pointwise `(1−ξ)·good + ξ·bad`, returning the endpoints exactly at `ξ ∈ {0, 1}`.
pub fn mix_advice(good: &[Decision], bad: &[Decision], xi: f64) -> Result<Vec<Decision>> {
    AdviceConfig::new(xi)?;
    crate::error::check_dim(good.len(), bad.len())?;
    if xi == 0.0 {
        return Ok(good.to_vec());
    }
    if xi == 1.0 {
        return Ok(bad.to_vec());
    }
    good.iter()
        .zip(bad)
        .map(|(g, b)| Decision::mix(xi, b, g))
        .collect()
}

/// Total cost of an advice sequence.
pub fn advice_cost(instance: &Instance, advice: &[Decision]) -> Result<f64> {
    Ok(trajectory_cost(instance, advice)?.total)
}
