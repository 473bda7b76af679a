use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::roster::AlgorithmSpec;
use crate::error::{CflError, Result};
use crate::instances::{level_grid, y_adversary_run, AdversaryConfig};
use crate::thresholds::compute_alpha;

/// One probe of the adaptive adversary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryRow {
    pub level: usize,
    pub y: f64,
    pub alg_cost: f64,
    pub opt_cost: f64,
    pub opt_analytic: Option<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryReport {
    pub algorithm: String,
    pub rows: Vec<AdversaryRow>,
    pub max_ratio: f64,
    pub alpha: f64,
}

/// Defaults of the lower-bound probe: `L = 1`, `U = 250`, `β = 0`, `d = 2`,
/// `m = 50`, `w_steps = 100`.
pub fn default_probe() -> AdversaryConfig {
    AdversaryConfig { d: 2, lower: 1.0, upper: 250.0, beta: 0.0, w_steps: 100, m: 50, level: 0, k: 0 }
}

/// Runs `spec` against the adversary at `points` evenly spaced levels of `base`.
pub fn cmd_adversary(spec: AlgorithmSpec, base: &AdversaryConfig, points: usize) -> Result<AdversaryReport> {
    if spec.needs_advice() {
        return Err(CflError::config(format!("{spec} needs advice and cannot face the adversary")));
    }
    if points < 2 {
        return Err(CflError::config("the level grid needs at least 2 points"));
    }
    base.validate()?;
    let setting = base.setting()?;
    let rows = level_grid(base.w_steps, points)
        .into_par_iter()
        .map(|level| {
            let cfg = AdversaryConfig { level, ..*base };
            let mut player = spec.player(&setting, None)?;
            let out = y_adversary_run(player.as_mut(), &cfg)?;
            Ok(AdversaryRow {
                level,
                y: cfg.y(),
                alg_cost: out.alg_cost,
                opt_cost: out.opt_cost,
                opt_analytic: out.opt_analytic,
                ratio: out.ratio(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AdversaryReport {
        algorithm: spec.to_string(),
        max_ratio: rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max),
        alpha: compute_alpha(base.lower, base.upper, base.beta)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_probe_stays_below_alpha() {
        let base = AdversaryConfig { upper: 50.0, w_steps: 20, m: 20, ..default_probe() };
        let rep = cmd_adversary(AlgorithmSpec::Alg1, &base, 6).unwrap();
        assert_eq!(rep.rows.len(), 6);
        assert!(rep.max_ratio <= rep.alpha + 0.01, "{} > {}", rep.max_ratio, rep.alpha);
        assert!(rep.rows.windows(2).all(|w| w[0].level < w[1].level));
    }

    #[test]
    fn advice_players_are_rejected() {
        let spec = AlgorithmSpec::Clip { epsilon: 2.0 };
        assert!(cmd_adversary(spec, &default_probe(), 5).is_err());
    }
}
