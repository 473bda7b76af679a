use super::{check_advice, compulsory_along, simulate, OnlineAlgorithm, Progress};
use crate::error::{CflError, Result};
use crate::model::{dot, weighted_distance, Decision, Instance, Setting, Trajectory};
use crate::subproblem::{
    minimize_pseudo_cost, minimize_pseudo_cost_constrained, ConsistencyContext, StepContext,
    DEFAULT_TOL,
};
use crate::thresholds::{ThresholdFn, ThresholdParams};

/// Running totals of the consistency-limited player.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipState {
    pub z: f64,
    /// Pseudo-utilization: the part of `z` justified by the robust threshold.
    pub p: f64,
    /// Advice utilization.
    pub advice_z: f64,
    pub clip_cost: f64,
    pub adv_cost: f64,
    pub x_prev: Vec<f64>,
    pub a_prev: Vec<f64>,
}

/// Consistency-limited pseudo-cost minimization: follows untrusted advice only as
/// far as needed to stay within `(1+ε)` of it.
#[derive(Debug, Clone)]
pub struct Clip {
    setting: Setting,
    params: ThresholdParams,
    robust: ThresholdFn,
    epsilon: f64,
    advice: Vec<Decision>,
    state: ClipState,
    progress: Progress,
    fallbacks: usize,
}

impl Clip {
    /// `ε` above `α − 1` keeps the raw value in the constraint while the threshold
    /// uses `α − 1`, where the robust threshold coincides with the optimal one.
    pub fn new(setting: &Setting, advice: Vec<Decision>, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(CflError::domain(format!("epsilon must be non-negative, got {epsilon}")));
        }
        let base = ThresholdParams::new(setting.lower, setting.upper, setting.beta())?;
        let params = base.with_epsilon(epsilon.min(base.alpha - 1.0))?;
        let robust = params.phi_eps_fn()?;
        let d = setting.d();
        Ok(Clip {
            setting: setting.clone(),
            params,
            robust,
            epsilon,
            advice,
            state: ClipState {
                z: 0.0,
                p: 0.0,
                advice_z: 0.0,
                clip_cost: 0.0,
                adv_cost: 0.0,
                x_prev: vec![0.0; d],
                a_prev: vec![0.0; d],
            },
            progress: Progress::new(d),
            fallbacks: 0,
        })
    }

    pub fn state(&self) -> &ClipState {
        &self.state
    }

    pub fn params(&self) -> &ThresholdParams {
        &self.params
    }

    /// Step and consistency contexts for the current state.
    fn context<'a>(&'a self, cost: &'a [f64], advice: &'a [f64], adv_cost: f64, advice_z: f64) -> (StepContext<'a>, ConsistencyContext<'a>) {
        let st = &self.state;
        let ctx = StepContext {
            cost,
            x_prev: &st.x_prev,
            c_weights: &self.setting.c_weights,
            w_weights: &self.setting.w_weights,
            z: st.p.min(1.0),
            cap: (1.0 - st.z).max(0.0),
            threshold: self.robust,
        };
        let cc = ConsistencyContext {
            clip_cost_so_far: st.clip_cost,
            adv_cost,
            advice,
            advice_utilization: advice_z,
            z_prev: st.z,
            epsilon: self.epsilon,
            lower: self.setting.lower,
            upper: self.setting.upper,
        };
        (ctx, cc)
    }
}

impl OnlineAlgorithm for Clip {
    fn name(&self) -> String {
        format!("clip:eps={}", self.epsilon)
    }

    fn fallback_steps(&self) -> usize {
        self.fallbacks
    }

    fn step(&mut self, t: usize, cost: &[f64]) -> Result<Decision> {
        let a = self
            .advice
            .get(t - 1)
            .ok_or_else(|| CflError::domain(format!("no advice for step {t}")))?
            .clone();
        crate::error::check_dim(self.setting.d(), a.dim())?;
        let w = &self.setting.w_weights;
        let adv_cost = self.state.adv_cost + dot(cost, &a) + weighted_distance(&a, &self.state.a_prev, w);
        let advice_z = self.state.advice_z + dot(&a, &self.setting.c_weights);

        let (x, p_gain) = if self.progress.compulsory(&self.setting, t) {
            // the advice is followed through the compulsory trade where it has throughput
            (compulsory_along(&self.setting, t, self.state.z, &a, cost)?, 0.0)
        } else {
            let (ctx, cc) = self.context(cost, &a, adv_cost, advice_z);
            let out = minimize_pseudo_cost_constrained(&ctx, &cc, DEFAULT_TOL)?;
            let free = minimize_pseudo_cost(&ctx, DEFAULT_TOL)?;
            let c = &self.setting.c_weights;
            let gain = dot(&free, c).min(dot(&out.decision, c));
            if out.fallback {
                self.fallbacks += 1;
            }
            (out.decision, gain)
        };

        let step_cost = self.progress.record(&self.setting, cost, &x);
        let st = &mut self.state;
        st.clip_cost += step_cost;
        st.adv_cost = adv_cost;
        st.advice_z = advice_z;
        st.z = self.progress.z;
        st.p = (st.p + p_gain).min(st.z);
        st.x_prev.copy_from_slice(&x);
        st.a_prev.copy_from_slice(&a);
        Ok(x)
    }
}

pub fn run_clip(instance: &Instance, advice: &[Decision], epsilon: f64) -> Result<Trajectory> {
    check_advice(instance, advice)?;
    let mut clip = Clip::new(&instance.setting, advice.to_vec(), epsilon)?;
    simulate(&mut clip, instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::run_alg1;
    use crate::instances::{generate_synthetic, make_inactive_advice, GeneratorConfig};
    use crate::offline::{make_advice, solve_opt};
    use crate::subproblem::{consistency_slack, SLACK_TOL};

    fn sample(count: usize, seed: u64) -> Vec<Instance> {
        let cfg = GeneratorConfig { count, ..GeneratorConfig::standard(seed) };
        generate_synthetic(&cfg).unwrap()
    }

    #[test]
    fn loose_constraint_reproduces_alg1() {
        for inst in sample(40, 2) {
            let advice = make_inactive_advice(&inst).unwrap();
            let alpha = ThresholdParams::new(inst.lower(), inst.upper(), inst.beta()).unwrap().alpha;
            let clip = run_clip(&inst, &advice, alpha - 1.0 + 1e3).unwrap();
            let alg = run_alg1(&inst).unwrap();
            for (a, b) in clip.decisions.iter().zip(&alg.decisions) {
                for (u, v) in a.iter().zip(b.iter()) {
                    assert!((u - v).abs() < 1e-9, "{a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn consistent_with_optimal_advice() {
        for inst in sample(25, 4) {
            let opt = solve_opt(&inst).unwrap();
            for eps in [0.5, 2.0] {
                let tr = run_clip(&inst, &opt.trajectory.decisions, eps).unwrap();
                assert!(tr.total_cost() <= (1.0 + eps) * opt.objective + 1e-6 * inst.upper());
            }
        }
    }

    #[test]
    fn slack_and_pseudo_utilization_invariants() {
        for inst in sample(25, 6) {
            let advice = make_advice(&inst, 0.5).unwrap();
            let mut clip = Clip::new(&inst.setting, advice.clone(), 2.0).unwrap();
            let w = inst.setting.w_weights.clone();
            for (t, f) in inst.costs.iter().enumerate() {
                let step = t + 1;
                let compulsory = clip.progress.compulsory(&inst.setting, step);
                let a = &advice[t];
                let adv_cost = clip.state.adv_cost + dot(f, a) + weighted_distance(a, &clip.state.a_prev, &w);
                let advice_z = clip.state.advice_z + dot(a, &inst.setting.c_weights);
                let snapshot = clip.clone();
                let x = clip.step(step, f).unwrap();
                if !compulsory && clip.fallback_steps() == 0 {
                    let (ctx, cc) = snapshot.context(f, a, adv_cost, advice_z);
                    assert!(consistency_slack(&x, &ctx, &cc).unwrap() >= -SLACK_TOL);
                }
                assert!(clip.state.p <= clip.state.z + 1e-12);
            }
        }
    }
}
