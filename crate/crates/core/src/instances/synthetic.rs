use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CflError, Result};
use crate::model::{validate_instance, Instance, Setting};

/// Random-instance protocol: `L = 1`, `U` the bound ratio, unit constraint weights,
/// uniform switching weights, a random horizon and per-step cost levels with
/// dimension-wise Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub d: usize,
    pub t_min: usize,
    pub t_max: usize,
    pub upper_over_lower: f64,
    pub beta_nominal: f64,
    pub sigma: f64,
    pub seed: u64,
    pub count: usize,
}

impl GeneratorConfig {
    /// `d = 5`, `U/L = 250`, `β = 50`, `σ = 50`, `T ∈ [6, 24]`, 1000 instances.
    pub fn standard(seed: u64) -> Self {
        GeneratorConfig {
            d: 5,
            t_min: 6,
            t_max: 24,
            upper_over_lower: 250.0,
            beta_nominal: 50.0,
            sigma: 50.0,
            seed,
            count: 1000,
        }
    }

    pub fn lower(&self) -> f64 {
        1.0
    }

    pub fn upper(&self) -> f64 {
        self.upper_over_lower
    }

    pub fn validate(&self) -> Result<()> {
        let (l, u) = (self.lower(), self.upper());
        if self.d == 0 {
            return Err(CflError::config("d must be positive"));
        }
        if !(self.t_min >= 1 && self.t_min <= self.t_max) {
            return Err(CflError::config(format!(
                "invalid horizon range [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if !(u > l && u.is_finite()) {
            return Err(CflError::config(format!("U/L must exceed 1, got {u}")));
        }
        if !(self.beta_nominal >= 0.0 && self.beta_nominal < (u - l) / 2.0) {
            return Err(CflError::config(format!(
                "beta {} outside [0, (U-L)/2 = {})",
                self.beta_nominal,
                (u - l) / 2.0
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(CflError::config("sigma must be non-negative"));
        }
        Ok(())
    }
}

/// Instance `index` of the configuration; each index draws from its own stream.
pub fn generate_one(cfg: &GeneratorConfig, index: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let (l, u, d) = (cfg.lower(), cfg.upper(), cfg.d);
    let w: Vec<f64> = (0..d)
        .map(|_| {
            if cfg.beta_nominal > 0.0 {
                rng.random_range(0.0..cfg.beta_nominal)
            } else {
                0.0
            }
        })
        .collect();
    let horizon = rng.random_range(cfg.t_min..=cfg.t_max);
    let costs = (0..horizon)
        .map(|_| {
            let mu = rng.random_range(l..=u);
            if cfg.sigma == 0.0 {
                return Ok(vec![mu; d]);
            }
            let noise = Normal::new(mu, cfg.sigma).map_err(|e| CflError::config(e.to_string()))?;
            Ok((0..d).map(|_| noise.sample(&mut rng).clamp(l, u)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let setting = Setting::new(horizon, l, u, vec![1.0; d], w)?;
    let instance = Instance::new(setting, costs)?;
    let check = validate_instance(&instance);
    if !check.is_valid() {
        return Err(CflError::config(format!(
            "generated instance {index} invalid: {}",
            check.violations[0]
        )));
    }
    Ok(instance)
}

pub fn generate_synthetic(cfg: &GeneratorConfig) -> Result<Vec<Instance>> {
    cfg.validate()?;
    (0..cfg.count)
        .into_par_iter()
        .map(|k| generate_one(cfg, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_gives_uniform_costs() {
        let cfg = GeneratorConfig { sigma: 0.0, count: 5, ..GeneratorConfig::standard(1) };
        for inst in generate_synthetic(&cfg).unwrap() {
            for f in &inst.costs {
                assert!(f.iter().all(|v| *v == f[0]));
            }
        }
    }

    #[test]
    fn zero_beta_gives_free_switching() {
        let cfg = GeneratorConfig { beta_nominal: 0.0, count: 5, ..GeneratorConfig::standard(1) };
        for inst in generate_synthetic(&cfg).unwrap() {
            assert!(inst.setting.w_weights.iter().all(|w| *w == 0.0));
            assert_eq!(inst.beta(), 0.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = GeneratorConfig { count: 20, ..GeneratorConfig::standard(42) };
        let a = serde_json::to_string(&generate_synthetic(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_synthetic(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = GeneratorConfig { seed: 43, ..cfg };
        assert_ne!(a, serde_json::to_string(&generate_synthetic(&other).unwrap()).unwrap());
    }

    #[test]
    fn outputs_are_valid_and_in_range() {
        let cfg = GeneratorConfig { count: 200, ..GeneratorConfig::standard(3) };
        for inst in generate_synthetic(&cfg).unwrap() {
            assert!(validate_instance(&inst).is_valid());
            assert!((6..=24).contains(&inst.horizon()));
            assert!(inst.beta() <= 50.0);
            assert!(inst.costs.iter().flatten().all(|v| (1.0..=250.0).contains(v)));
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let base = GeneratorConfig::standard(0);
        assert!(generate_synthetic(&GeneratorConfig { beta_nominal: 124.5, ..base.clone() }).is_err());
        assert!(generate_synthetic(&GeneratorConfig { sigma: -1.0, ..base.clone() }).is_err());
        assert!(generate_synthetic(&GeneratorConfig { t_min: 10, t_max: 5, ..base }).is_err());
    }
}
