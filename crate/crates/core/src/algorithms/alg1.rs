use super::{compulsory_controller, simulate, OnlineAlgorithm, Progress};
use crate::error::Result;
use crate::model::{Decision, Instance, Setting, Trajectory};
use crate::subproblem::{minimize_pseudo_cost, StepContext, DEFAULT_TOL};
use crate::thresholds::ThresholdParams;

/// Pseudo-cost minimization with the optimal threshold.
#[derive(Debug, Clone)]
pub struct Alg1 {
    setting: Setting,
    params: ThresholdParams,
    progress: Progress,
}

impl Alg1 {
    pub fn new(setting: &Setting) -> Result<Self> {
        let params = ThresholdParams::new(setting.lower, setting.upper, setting.beta())?;
        Ok(Alg1 {
            setting: setting.clone(),
            params,
            progress: Progress::new(setting.d()),
        })
    }

    pub fn params(&self) -> &ThresholdParams {
        &self.params
    }

    pub fn progress(&self) -> &Progress {
        &self.progress
    }
}

impl OnlineAlgorithm for Alg1 {
    fn name(&self) -> String {
        "alg1".into()
    }

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        let p = &self.progress;
        let x = if p.compulsory(&self.setting, t) {
            compulsory_controller(&self.setting, t, p.z)?
        } else {
            let ctx = StepContext {
                cost,
                x_prev: &p.x_prev,
                c_weights: &self.setting.c_weights,
                w_weights: &self.setting.w_weights,
                z: p.z.min(1.0),
                cap: p.remaining(),
                threshold: self.params.phi_fn(),
            };
            minimize_pseudo_cost(&ctx, DEFAULT_TOL)?
        };
        self.progress.record(&self.setting, cost, &x);
        Ok(x)
    }
}

pub fn run_alg1(instance: &Instance) -> Result<Trajectory> {
    simulate(&mut Alg1::new(&instance.setting)?, instance)
}
