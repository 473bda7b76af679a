use std::f64::consts::E;

use crate::error::{CflError, Result};

const BRANCH_POINT: f64 = -1.0 / E;
const BRANCH_SLACK: f64 = 1e-12;
const MAX_HALLEY: usize = 64;

/// Principal branch of the Lambert W function: the `w ≥ −1` with `w·e^w = x`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(CflError::domain("lambert_w0 of NaN"));
    }
    if x < BRANCH_POINT - BRANCH_SLACK {
        return Err(CflError::domain(format!(
            "lambert_w0 undefined below -1/e, got {x}"
        )));
    }
    if x <= BRANCH_POINT {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        if !next.is_finite() || next < -1.0 {
            break;
        }
        w = next;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    if residual_ok(w, x) {
        return Ok(w);
    }
    // Halley stalls only right at the branch point, where w·e^w is flat.
    bisect(x)
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        x.ln_1p() * 0.9
    } else {
        let l = x.ln();
        l - l.ln()
    }
}

fn residual_ok(w: f64, x: f64) -> bool {
    (w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0)
}

fn bisect(x: f64) -> Result<f64> {
    // w·e^w is increasing on [−1, ∞).
    let (mut lo, mut hi) = (-1.0_f64, x.max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
