use super::{check_advice, simulate, Alg1, OnlineAlgorithm};
use crate::error::{CflError, Result};
use crate::model::{Decision, Instance, Setting, Trajectory};
use crate::thresholds::ThresholdParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub epsilon: f64,
    /// Weight on the advice: `(α − 1 − ε)/(α − 1)`, floored at zero.
    pub lambda: f64,
}

impl BaselineConfig {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(CflError::domain(format!("epsilon must be positive, got {epsilon}")));
        }
        let lambda = if alpha > 1.0 {
            ((alpha - 1.0 - epsilon) / (alpha - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(BaselineConfig { epsilon, lambda })
    }
}

/// Fixed convex combination of the advice and an internal ALG1 run.
#[derive(Debug, Clone)]
pub struct Baseline {
    config: BaselineConfig,
    inner: Alg1,
    advice: Vec<Decision>,
}

impl Baseline {
    pub fn new(setting: &Setting, advice: Vec<Decision>, epsilon: f64) -> Result<Self> {
        let params = ThresholdParams::new(setting.lower, setting.upper, setting.beta())?;
        Ok(Baseline {
            config: BaselineConfig::new(epsilon, params.alpha)?,
            inner: Alg1::new(setting)?,
            advice,
        })
    }

    pub fn config(&self) -> BaselineConfig {
        self.config
    }
}

impl OnlineAlgorithm for Baseline {
    fn name(&self) -> String {
        format!("baseline:eps={}", self.config.epsilon)
    }

    // The internal ALG1 handles its own compulsory trade; mixing two feasible
    // sequences keeps the output feasible, so no outer override is applied.
    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        let own = self.inner.step(t, cost)?;
        let a = self
            .advice
            .get(t - 1)
            .ok_or_else(|| CflError::domain(format!("no advice for step {t}")))?;
        Decision::mix(self.config.lambda, a, &own)
    }
}

pub fn run_baseline(instance: &Instance, advice: &[Decision], epsilon: f64) -> Result<Trajectory> {
    check_advice(instance, advice)?;
    simulate(&mut Baseline::new(&instance.setting, advice.to_vec(), epsilon)?, instance)
}
