//! Online players. Each consumes cost vectors one step at a time.

mod alg1;
mod baseline;
mod clip;
mod compulsory;
mod heuristics;

pub use alg1::{run_alg1, Alg1};
pub use baseline::{run_baseline, Baseline, BaselineConfig};
pub use clip::{run_clip, Clip, ClipState};
pub use compulsory::{compulsory_along, compulsory_amount, compulsory_controller, in_compulsory};
pub use heuristics::{
    run_agnostic, run_idle, run_move_to_minimizer, run_simple_threshold, Agnostic, Idle,
    MoveToMinimizer, SimpleThreshold,
};

use crate::error::{CflError, Result};
use crate::model::{
    dot, CostAccumulator, Decision, Instance, Setting, Trajectory, FEASIBILITY_TOL,
};

/// An online player. `step` is called once per step with `t` running from 1 to `T`.
pub trait OnlineAlgorithm {
    fn name(&self) -> String;

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision>;

    /// Steps where a constrained solve fell back to the advice.
    fn fallback_steps(&self) -> usize {
        0
    }
}

/// Running utilization, previous decision and accumulated cost of one player.
#[derive(Debug, Clone)]
pub struct Progress {
    pub z: f64,
    pub x_prev: Vec<f64>,
    acc: CostAccumulator,
}

impl Progress {
    pub fn new(d: usize) -> Self {
        Progress {
            z: 0.0,
            x_prev: vec![0.0; d],
            acc: CostAccumulator::new(d),
        }
    }

    /// Commits decision `x`; returns the step's hitting plus switching cost.
    pub fn record(&mut self, setting: &Setting, cost: &[f64], x: &[f64]) -> f64 {
        self.z += dot(x, &setting.c_weights);
        self.x_prev.copy_from_slice(x);
        self.acc.push(cost, x, &setting.w_weights)
    }

    /// Cost so far, excluding the final move back to the origin.
    pub fn running_cost(&self) -> f64 {
        self.acc.running_total()
    }

    pub fn compulsory(&self, setting: &Setting, t: usize) -> bool {
        in_compulsory(setting, t, self.z)
    }

    /// Budget left on the long-term constraint.
    pub fn remaining(&self) -> f64 {
        (1.0 - self.z).max(0.0)
    }
}

/// Runs a player over the full instance and checks feasibility of the result.
pub fn simulate(alg: &mut dyn OnlineAlgorithm, instance: &Instance) -> Result<Trajectory> {
    let mut decisions = Vec::with_capacity(instance.horizon());
    for (t, cost) in instance.costs.iter().enumerate() {
        let x = alg.step(t + 1, cost)?;
        crate::error::check_dim(instance.d(), x.dim())?;
        decisions.push(x);
    }
    let mut traj = Trajectory::from_decisions(instance, decisions)?;
    traj.fallback_steps = alg.fallback_steps();
    if !traj.is_feasible() {
        return Err(CflError::Infeasible(format!(
            "{} finished at utilization {} < 1 - {FEASIBILITY_TOL}",
            alg.name(),
            traj.final_utilization()
        )));
    }
    Ok(traj)
}

/// Rejects advice sequences that do not complete the constraint.
pub fn check_advice(instance: &Instance, advice: &[Decision]) -> Result<()> {
    crate::error::check_dim(instance.horizon(), advice.len())?;
    let mut total = 0.0;
    for a in advice {
        total += instance.setting.constraint_value(a)?;
    }
    if total < 1.0 - FEASIBILITY_TOL {
        return Err(CflError::Infeasible(format!(
            "advice reaches utilization {total} < 1"
        )));
    }
    Ok(())
}
