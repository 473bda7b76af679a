use crate::error::{CflError, Result};
use crate::model::{compulsory_start, Decision, Setting, FEASIBILITY_TOL};

/// Whether step `t` (1-based) lies in the compulsory trade, given utilization
/// `z_prev` through step `t − 1`.
pub fn in_compulsory(setting: &Setting, t: usize, z_prev: f64) -> bool {
    compulsory_start(t.saturating_sub(1), z_prev, setting)
}

/// Throughput the compulsory trade takes at step `t`: as much as one step allows,
/// or more when the later steps could not finish otherwise.
pub fn compulsory_amount(setting: &Setting, t: usize, z: f64) -> f64 {
    let remaining = 1.0 - z;
    if remaining <= FEASIBILITY_TOL {
        return 0.0;
    }
    let ck = setting.c_weights[setting.max_c_index()];
    let later = setting.horizon.saturating_sub(t) as f64;
    remaining.min(ck).max(remaining - later * ck)
}

/// Cost-agnostic filling at step `t`: puts throughput into the dimension with the
/// largest constraint weight, adding further dimensions (by descending weight) only
/// when the remaining steps could not otherwise finish the constraint.
pub fn compulsory_controller(setting: &Setting, t: usize, z: f64) -> Result<Decision> {
    let c = &setting.c_weights;
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|a, b| c[*b].total_cmp(&c[*a]).then(a.cmp(b)));
    top_up(setting, t, vec![0.0; c.len()], compulsory_amount(setting, t, z), order)
}

/// Compulsory filling that places the step's amount along `guide` first (scaled
/// down if the guide alone exceeds it). Any remainder goes to the dimensions that
/// are cheapest this step per unit of throughput, counting the move in and out.
pub fn compulsory_along(
    setting: &Setting,
    t: usize,
    z: f64,
    guide: &[f64],
    cost: &[f64],
) -> Result<Decision> {
    crate::error::check_dim(setting.d(), guide.len())?;
    crate::error::check_dim(setting.d(), cost.len())?;
    let amount = compulsory_amount(setting, t, z);
    let base: Vec<f64> = guide.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let have = setting.constraint_value(&base)?;
    if have >= amount {
        let scale = if have > 0.0 { amount / have } else { 0.0 };
        return Ok(Decision(base.iter().map(|v| v * scale).collect()));
    }
    let (c, w) = (&setting.c_weights, &setting.w_weights);
    let unit: Vec<f64> = (0..c.len()).map(|i| (cost[i] + 2.0 * w[i]) / c[i]).collect();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|a, b| unit[*a].total_cmp(&unit[*b]).then(a.cmp(b)));
    top_up(setting, t, base, amount - have, order)
}

fn top_up(setting: &Setting, t: usize, mut x: Vec<f64>, amount: f64, order: Vec<usize>) -> Result<Decision> {
    let c = &setting.c_weights;
    let mut left = amount;
    for i in order {
        if left <= 0.0 {
            break;
        }
        let add = (left / c[i]).min(1.0 - x[i]);
        x[i] += add;
        left -= add * c[i];
    }
    if left > FEASIBILITY_TOL {
        return Err(CflError::Infeasible(format!(
            "constraint cannot be finished: {left} short at step {t}"
        )));
    }
    Ok(Decision(x))
}
