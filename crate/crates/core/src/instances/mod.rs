//! Instance sources: random generation, the adaptive adversary, the allocation
//! reduction, traces, and bad-advice constructions.

mod adversary;
mod mal;
mod synthetic;
mod trace;

pub use adversary::{level_grid, y_adversary_run, AdversaryConfig, AdversaryOutcome};
pub use mal::{mal_to_cfl, MalInstance, MalTransform};
pub use synthetic::{generate_one, generate_synthetic, GeneratorConfig};
pub use trace::{ingest_trace, ingest_trace_file, AffineMap, TraceInstance};

use crate::algorithms::run_idle;
use crate::error::Result;
use crate::model::{Decision, Instance};

/// Advice that stays at the origin and fills only in the compulsory trade.
pub fn make_inactive_advice(instance: &Instance) -> Result<Vec<Decision>> {
    Ok(run_idle(instance)?.decisions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::trajectory_cost;

    #[test]
    fn inactive_advice_fills_exactly() {
        let cfg = GeneratorConfig { count: 20, ..GeneratorConfig::standard(5) };
        for inst in generate_synthetic(&cfg).unwrap() {
            let adv = make_inactive_advice(&inst).unwrap();
            let z: f64 = adv.iter().map(|x| inst.setting.constraint_value(x).unwrap()).sum();
            assert!((z - 1.0).abs() < 1e-12);
            assert!(adv[..inst.horizon() - 1].iter().all(|x| x.is_origin()));
        }
    }

    #[test]
    fn inactive_advice_on_adversary_costs_upper_plus_switching() {
        let cfg = AdversaryConfig { d: 2, lower: 1.0, upper: 50.0, beta: 3.0, w_steps: 20, m: 30, level: 12, k: 0 };
        let setting = cfg.setting().unwrap();
        let mut alg = crate::algorithms::Alg1::new(&setting).unwrap();
        let out = y_adversary_run(&mut alg, &cfg).unwrap();
        let adv = make_inactive_advice(&out.instance).unwrap();
        let cost = trajectory_cost(&out.instance, &adv).unwrap().total;
        assert!((cost - (50.0 + 2.0 * 3.0)).abs() < 1e-9);
    }
}
