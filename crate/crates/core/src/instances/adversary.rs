//! Adaptive lower-bound adversary. Prices fall in steps of `δ` in one dimension;
//! whenever the player buys, the adversary answers with maximal prices until the
//! player is back at the origin, then continues falling. The stream ends with a
//! batch just above the final level `y`, then maximal prices.

use serde::{Deserialize, Serialize};

use crate::algorithms::OnlineAlgorithm;
use crate::error::{CflError, Result};
use crate::model::{Decision, Instance, Setting, ACTIVITY_EPS};
use crate::offline::solve_opt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub d: usize,
    pub lower: f64,
    pub upper: f64,
    /// Switching weight of every dimension.
    pub beta: f64,
    /// Number of price levels between `U` and `L`.
    pub w_steps: usize,
    /// Batch length.
    pub m: usize,
    /// How many levels the price falls: `y = U − level·δ`.
    pub level: usize,
    /// Dimension whose price falls.
    pub k: usize,
}

impl AdversaryConfig {
    pub fn delta(&self) -> f64 {
        (self.upper - self.lower) / self.w_steps as f64
    }

    pub fn y(&self) -> f64 {
        self.upper - self.level as f64 * self.delta()
    }

    /// Margin of the final batch above `y`.
    pub fn final_margin(&self) -> f64 {
        self.delta() / 10.0
    }

    pub fn horizon(&self) -> usize {
        self.m * (self.w_steps + 4)
    }

    pub fn setting(&self) -> Result<Setting> {
        Setting::new(
            self.horizon(),
            self.lower,
            self.upper,
            vec![1.0; self.d],
            vec![self.beta; self.d],
        )
    }

    /// Closed-form optimum of the realized stream when the final batch is the cheapest.
    pub fn analytic_opt(&self) -> f64 {
        let spread = 2.0 * self.beta / self.m as f64;
        if self.level == 0 {
            self.upper + spread
        } else {
            (self.y() + self.final_margin()).min(self.upper) + spread
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.m == 0 || self.w_steps == 0 {
            return Err(CflError::config("adversary needs d, m, w_steps > 0"));
        }
        if self.level > self.w_steps {
            return Err(CflError::config(format!(
                "level {} exceeds w_steps {}",
                self.level, self.w_steps
            )));
        }
        if self.k >= self.d {
            return Err(CflError::config("falling dimension out of range"));
        }
        if !(self.lower > 0.0 && self.upper > self.lower) {
            return Err(CflError::config("need 0 < L < U"));
        }
        if !(self.beta >= 0.0 && self.beta < (self.upper - self.lower) / 2.0) {
            return Err(CflError::config("beta outside [0, (U-L)/2)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AdversaryOutcome {
    pub alg_cost: f64,
    /// Closed-form optimum; absent when the player filled before the final batch.
    pub opt_analytic: Option<f64>,
    /// Exact optimum of the realized stream.
    pub opt_cost: f64,
    pub instance: Instance,
    pub decisions: Vec<Decision>,
}

impl AdversaryOutcome {
    pub fn ratio(&self) -> f64 {
        self.alg_cost / self.opt_cost
    }
}

struct Driver<'a> {
    alg: &'a mut dyn OnlineAlgorithm,
    setting: Setting,
    costs: Vec<Vec<f64>>,
    decisions: Vec<Decision>,
    z: f64,
}

impl Driver<'_> {
    fn done(&self) -> bool {
        self.costs.len() >= self.setting.horizon
    }

    fn emit(&mut self, f: Vec<f64>) -> Result<bool> {
        if self.done() {
            return Err(CflError::config(format!(
                "adversary horizon {} exhausted before the protocol finished",
                self.setting.horizon
            )));
        }
        let t = self.costs.len() + 1;
        let x = self.alg.step(t, &f)?;
        let bought = self.setting.constraint_value(&x)?;
        self.z += bought;
        self.costs.push(f);
        self.decisions.push(x);
        Ok(bought > ACTIVITY_EPS)
    }

    fn up(&self) -> Vec<f64> {
        vec![self.setting.upper; self.setting.d()]
    }

    fn priced(&self, k: usize, price: f64) -> Vec<f64> {
        let mut f = self.up();
        f[k] = price;
        f
    }

    fn filled(&self) -> bool {
        self.z >= 1.0 - 1e-9
    }

    fn at_origin(&self) -> bool {
        self.decisions.last().is_none_or(|x| x.is_origin())
    }

    /// Maximal prices until the player returns to the origin or has filled.
    fn interrupt(&mut self) -> Result<()> {
        while !self.at_origin() && !self.filled() {
            self.emit(self.up())?;
        }
        Ok(())
    }
}

/// Plays the adversary against `alg`, which must have been built for `cfg.setting()`.
pub fn y_adversary_run(alg: &mut dyn OnlineAlgorithm, cfg: &AdversaryConfig) -> Result<AdversaryOutcome> {
    cfg.validate()?;
    let setting = cfg.setting()?;
    let mut drv = Driver {
        alg,
        setting: setting.clone(),
        costs: Vec::with_capacity(setting.horizon),
        decisions: Vec::with_capacity(setting.horizon),
        z: 0.0,
    };
    let (m, k, delta) = (cfg.m, cfg.k, cfg.delta());
    for _ in 0..m {
        drv.emit(drv.up())?;
    }
    drv.interrupt()?;
    'levels: for i in 1..=cfg.level {
        if drv.filled() {
            break;
        }
        let price = cfg.upper - i as f64 * delta;
        for _ in 0..m {
            if drv.emit(drv.priced(k, price))? {
                drv.interrupt()?;
                continue 'levels;
            }
        }
    }
    drv.interrupt()?;
    let full_stream = !drv.filled();
    if full_stream && cfg.level > 0 {
        let price = (cfg.y() + cfg.final_margin()).min(cfg.upper);
        for _ in 0..m {
            drv.emit(drv.priced(k, price))?;
        }
    }
    for _ in 0..m {
        if drv.done() {
            break;
        }
        drv.emit(drv.up())?;
    }
    while !drv.done() {
        drv.emit(drv.up())?;
    }

    let instance = Instance::new(setting, drv.costs)?;
    let traj = crate::model::Trajectory::from_decisions(&instance, drv.decisions)?;
    if !traj.is_feasible() {
        return Err(CflError::Infeasible(format!(
            "player finished the adversary stream at utilization {}",
            traj.final_utilization()
        )));
    }
    let opt = solve_opt(&instance)?;
    Ok(AdversaryOutcome {
        alg_cost: traj.total_cost(),
        opt_analytic: full_stream.then(|| cfg.analytic_opt()),
        opt_cost: opt.objective,
        instance,
        decisions: traj.decisions,
    })
}

/// Levels `round(j·w_steps/(n−1))` for `j = 0..n`.
pub fn level_grid(w_steps: usize, n: usize) -> Vec<usize> {
    if n <= 1 {
        return vec![w_steps];
    }
    let mut v: Vec<usize> = (0..n)
        .map(|j| ((j * w_steps) as f64 / (n - 1) as f64).round() as usize)
        .collect();
    v.dedup();
    v
}
