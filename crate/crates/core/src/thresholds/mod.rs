//! Threshold functions for pseudo-cost minimization, the competitive ratio and
//! the consistency/robustness trade-off.

mod lambert;

pub use lambert::lambert_w0;

use serde::{Deserialize, Serialize};

use crate::error::{CflError, Result};

const BISECT_TOL: f64 = 1e-12;
const BISECT_ITERS: usize = 200;
const UNIT_SLACK: f64 = 1e-12;

/// `u ↦ U − β + (U/r − U + 2β)·e^{u/r}` for a ratio `r` (the competitive ratio or
/// a robustness factor). Decreasing in `u` whenever `U − U/r − 2β > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFn {
    upper: f64,
    beta: f64,
    ratio: f64,
}

impl ThresholdFn {
    pub fn new(upper: f64, beta: f64, ratio: f64) -> Self {
        ThresholdFn { upper, beta, ratio }
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Coefficient of the exponential term.
    pub fn scale(&self) -> f64 {
        self.upper / self.ratio - self.upper + 2.0 * self.beta
    }

    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        self.upper - self.beta + self.scale() * (u / self.ratio).exp()
    }

    /// `∫_{a}^{b} value(u) du` in closed form.
    #[inline]
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let r = self.ratio;
        (self.upper - self.beta) * (b - a) + r * self.scale() * (a / r).exp() * ((b - a) / r).exp_m1()
    }

    /// The `u` with `value(u) = level`, or `None` when the level is never attained
    /// (including the flat case).
    pub fn inverse(&self, level: f64) -> Option<f64> {
        let k = self.scale();
        if k == 0.0 {
            return None;
        }
        let q = (level - self.upper + self.beta) / k;
        if q > 0.0 {
            Some(self.ratio * q.ln())
        } else {
            None
        }
    }
}

/// Quantities derived from `(L, U, β)` and an optional consistency slack `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub lower: f64,
    pub upper: f64,
    pub beta: f64,
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub gamma_eps: Option<f64>,
}

impl ThresholdParams {
    pub fn new(lower: f64, upper: f64, beta: f64) -> Result<Self> {
        let alpha = compute_alpha(lower, upper, beta)?;
        Ok(ThresholdParams {
            lower,
            upper,
            beta,
            alpha,
            epsilon: None,
            gamma_eps: None,
        })
    }

    /// Attaches `ε ∈ [0, α − 1]` and its robustness factor.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        let gamma = gamma_given_alpha(epsilon, self.lower, self.upper, self.beta, self.alpha)?;
        self.epsilon = Some(epsilon);
        self.gamma_eps = Some(gamma);
        Ok(self)
    }

    pub fn phi_fn(&self) -> ThresholdFn {
        ThresholdFn::new(self.upper, self.beta, self.alpha)
    }

    pub fn phi_eps_fn(&self) -> Result<ThresholdFn> {
        let gamma = self
            .gamma_eps
            .ok_or_else(|| CflError::domain("robustness factor not computed; call with_epsilon"))?;
        Ok(ThresholdFn::new(self.upper, self.beta, gamma))
    }
}

fn check_unit(z: f64) -> Result<()> {
    if (-UNIT_SLACK..=1.0 + UNIT_SLACK).contains(&z) {
        Ok(())
    } else {
        Err(CflError::domain(format!("utilization {z} outside [0,1]")))
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    check_unit(a)?;
    check_unit(b)?;
    if a > b {
        return Err(CflError::domain(format!("reversed bounds {a} > {b}")));
    }
    Ok(())
}

fn check_beta(lower: f64, upper: f64, beta: f64) -> Result<()> {
    if !(lower > 0.0 && upper >= lower && upper.is_finite()) {
        return Err(CflError::domain(format!(
            "bounds must satisfy 0 < L <= U, got L={lower}, U={upper}"
        )));
    }
    let degenerate = upper == lower && beta == 0.0;
    if !(beta >= 0.0 && (beta < (upper - lower) / 2.0 || degenerate)) {
        return Err(CflError::domain(format!(
            "beta={beta} outside [0, (U-L)/2) for L={lower}, U={upper}"
        )));
    }
    Ok(())
}

/// Monotone bisection for a root of `g` on `[lo, hi]` with `g(lo) > 0 ≥ g(hi)`.
fn bisect_decreasing(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECT_TOL * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `ln(U−L−2β) − ln(U − U/α − 2β) = 1/α` by bisection on `(U/(U−2β), U/L]`.
pub fn alpha_by_bisection(lower: f64, upper: f64, beta: f64) -> Result<f64> {
    check_beta(lower, upper, beta)?;
    if upper == lower {
        return Ok(1.0);
    }
    let gap = upper - lower - 2.0 * beta;
    let g = |a: f64| {
        let inner = upper - upper / a - 2.0 * beta;
        if inner <= 0.0 {
            f64::INFINITY
        } else {
            gap.ln() - inner.ln() - 1.0 / a
        }
    };
    Ok(bisect_decreasing(
        upper / (upper - 2.0 * beta),
        upper / lower,
        g,
    ))
}

/// The optimal competitive ratio `α` via the principal Lambert W branch, cross-checked
/// against the fixed-point bisection.
pub fn compute_alpha(lower: f64, upper: f64, beta: f64) -> Result<f64> {
    check_beta(lower, upper, beta)?;
    if upper == lower {
        return Ok(1.0);
    }
    let b = 2.0 * beta / upper;
    let arg = (b + lower / upper - 1.0) * (b - 1.0).exp();
    let w = lambert_w0(arg)?;
    let alpha = (1.0 / (w - b + 1.0)).clamp(1.0, upper / lower);
    let check = alpha_by_bisection(lower, upper, beta)?;
    if (alpha - check).abs() > 1e-9 * alpha {
        return Err(CflError::numeric(format!(
            "alpha mismatch: lambert {alpha} vs bisection {check}"
        )));
    }
    Ok(alpha)
}

fn gamma_residual(gamma: f64, epsilon: f64, lower: f64, upper: f64, beta: f64) -> f64 {
    let inner = upper - upper / gamma - 2.0 * beta;
    if inner <= 0.0 {
        return f64::INFINITY;
    }
    let log = (upper - lower - 2.0 * beta).ln() - inner.ln();
    gamma - epsilon - upper / lower + gamma / lower * (upper - lower) * log
}

/// The robustness factor `γ^ε` of a `(1+ε)`-consistent algorithm.
pub fn compute_gamma(epsilon: f64, lower: f64, upper: f64, beta: f64) -> Result<f64> {
    let alpha = compute_alpha(lower, upper, beta)?;
    gamma_given_alpha(epsilon, lower, upper, beta, alpha)
}

fn gamma_given_alpha(epsilon: f64, lower: f64, upper: f64, beta: f64, alpha: f64) -> Result<f64> {
    let max_eps = alpha - 1.0;
    if !(epsilon >= 0.0 && epsilon <= max_eps + 1e-12 * alpha) {
        return Err(CflError::domain(format!(
            "epsilon={epsilon} outside [0, alpha-1={max_eps}]"
        )));
    }
    if upper == lower {
        return Ok(1.0);
    }
    let hi = upper / lower;
    if epsilon == 0.0 {
        return Ok(hi);
    }
    let lo = upper / (upper - 2.0 * beta) + 1e-12;
    let g = |x: f64| gamma_residual(x, epsilon, lower, upper, beta);
    if !(g(lo) > 0.0 && g(hi) <= 0.0) {
        return Err(CflError::numeric(format!(
            "no sign change for gamma on ({lo}, {hi}]"
        )));
    }
    Ok(bisect_decreasing(lo, hi, g))
}

pub fn phi(z: f64, params: &ThresholdParams) -> Result<f64> {
    check_unit(z)?;
    Ok(params.phi_fn().value(z))
}

pub fn phi_integral(z1: f64, z2: f64, params: &ThresholdParams) -> Result<f64> {
    check_interval(z1, z2)?;
    Ok(params.phi_fn().integral(z1, z2))
}

pub fn phi_eps(p: f64, params: &ThresholdParams) -> Result<f64> {
    check_unit(p)?;
    Ok(params.phi_eps_fn()?.value(p))
}

pub fn phi_eps_integral(p1: f64, p2: f64, params: &ThresholdParams) -> Result<f64> {
    check_interval(p1, p2)?;
    Ok(params.phi_eps_fn()?.integral(p1, p2))
}

/// Largest utilization the robust threshold alone can justify before its pseudo-cost
/// exceeds `(1+ε)·L`.
pub fn z_pcm(params: &ThresholdParams) -> Result<f64> {
    let gamma = params
        .gamma_eps
        .ok_or_else(|| CflError::domain("robustness factor not computed; call with_epsilon"))?;
    let (l, u, b) = (params.lower, params.upper, params.beta);
    if u == l {
        return Ok(1.0);
    }
    let z = gamma * ((u - l - 2.0 * b).ln() - (u - u / gamma - 2.0 * b).ln());
    Ok(z.clamp(0.0, 1.0))
}
