//! Simple cost-driven players used as comparison points. All are notified of the
//! compulsory trade and hand over to the filling controller when it starts.

use super::{compulsory_controller, simulate, OnlineAlgorithm, Progress};
use crate::error::Result;
use crate::model::{argmin_first, Decision, Instance, Setting, Trajectory};

/// Shared skeleton: the controller overrides `rule` during the compulsory trade.
#[derive(Debug, Clone)]
struct Shell {
    setting: Setting,
    progress: Progress,
}

impl Shell {
    fn new(setting: &Setting) -> Self {
        Shell {
            setting: setting.clone(),
            progress: Progress::new(setting.d()),
        }
    }

    fn step(
        &mut self,
        t: usize,
        cost: &[f64],
        rule: impl FnOnce(&Setting, &Progress) -> Decision,
    ) -> Result<Decision> {
        let x = if self.progress.compulsory(&self.setting, t) {
            compulsory_controller(&self.setting, t, self.progress.z)?
        } else {
            rule(&self.setting, &self.progress)
        };
        self.progress.record(&self.setting, cost, &x);
        Ok(x)
    }
}

/// Decision with throughput `amount` placed in coordinate `k`, clipped to the box.
fn single(d: usize, k: usize, c: f64, amount: f64) -> Decision {
    let mut x = vec![0.0; d];
    x[k] = (amount / c).clamp(0.0, 1.0);
    Decision(x)
}

/// Fills as much as possible in the cheapest dimension of the first step.
#[derive(Debug, Clone)]
pub struct Agnostic(Shell);

impl Agnostic {
    pub fn new(setting: &Setting) -> Self {
        Agnostic(Shell::new(setting))
    }
}

impl OnlineAlgorithm for Agnostic {
    fn name(&self) -> String {
        "agnostic".into()
    }

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        self.0.step(t, cost, |s, p| {
            if t == 1 {
                let k = argmin_first(cost);
                single(s.d(), k, s.c_weights[k], p.remaining())
            } else {
                Decision::zeros(s.d())
            }
        })
    }
}

/// Each step buys `1/T` of the constraint in that step's cheapest dimension.
#[derive(Debug, Clone)]
pub struct MoveToMinimizer(Shell);

impl MoveToMinimizer {
    pub fn new(setting: &Setting) -> Self {
        MoveToMinimizer(Shell::new(setting))
    }
}

impl OnlineAlgorithm for MoveToMinimizer {
    fn name(&self) -> String {
        "move_to_minimizer".into()
    }

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        self.0.step(t, cost, |s, p| {
            let k = argmin_first(cost);
            let share = (1.0 / s.horizon as f64).min(p.remaining());
            single(s.d(), k, s.c_weights[k], share)
        })
    }
}

/// Buys everything at the first price at or below `√(UL)`.
#[derive(Debug, Clone)]
pub struct SimpleThreshold {
    shell: Shell,
    threshold: f64,
    fired: bool,
}

impl SimpleThreshold {
    pub fn new(setting: &Setting) -> Self {
        SimpleThreshold {
            threshold: (setting.upper * setting.lower).sqrt(),
            shell: Shell::new(setting),
            fired: false,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl OnlineAlgorithm for SimpleThreshold {
    fn name(&self) -> String {
        "simple_threshold".into()
    }

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        let (psi, fired) = (self.threshold, &mut self.fired);
        self.shell.step(t, cost, |s, p| {
            if *fired {
                return Decision::zeros(s.d());
            }
            // prices are compared per unit of throughput
            let hit = (0..s.d()).find(|&i| cost[i] / s.c_weights[i] <= psi);
            match hit {
                Some(k) => {
                    *fired = true;
                    single(s.d(), k, s.c_weights[k], p.remaining())
                }
                None => Decision::zeros(s.d()),
            }
        })
    }
}

/// Does nothing until the compulsory trade, then fills.
#[derive(Debug, Clone)]
pub struct Idle(Shell);

impl Idle {
    pub fn new(setting: &Setting) -> Self {
        Idle(Shell::new(setting))
    }
}

impl OnlineAlgorithm for Idle {
    fn name(&self) -> String {
        "inactive".into()
    }

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        self.0.step(t, cost, |s, _| Decision::zeros(s.d()))
    }
}

pub fn run_agnostic(instance: &Instance) -> Result<Trajectory> {
    simulate(&mut Agnostic::new(&instance.setting), instance)
}

pub fn run_move_to_minimizer(instance: &Instance) -> Result<Trajectory> {
    simulate(&mut MoveToMinimizer::new(&instance.setting), instance)
}

pub fn run_simple_threshold(instance: &Instance) -> Result<Trajectory> {
    simulate(&mut SimpleThreshold::new(&instance.setting), instance)
}

pub fn run_idle(instance: &Instance) -> Result<Trajectory> {
    simulate(&mut Idle::new(&instance.setting), instance)
}
