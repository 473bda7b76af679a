//! Per-step pseudo-cost minimization and its consistency-constrained variant.
//!
//! For linear costs the objective splits into a separable piecewise-linear part in
//! `x` and a convex function of the total throughput `y = c(x)`. The partial
//! minimum over `{c(x) = y}` is obtained greedily by filling per-coordinate
//! segments in order of marginal rate, so the solver walks `y` upward until the
//! derivative turns non-negative. The walk is exact; the constrained variant adds
//! a Lagrange multiplier and searches it by bisection.

use crate::error::{check_dim, CflError, Result};
use crate::model::{dot, weighted_distance, Decision};
use crate::thresholds::ThresholdFn;

pub const DEFAULT_TOL: f64 = 1e-7;
/// Slack below which a decision counts as violating the consistency constraint.
pub const SLACK_TOL: f64 = 1e-9;
const BOX_TOL: f64 = 1e-12;
const MAX_MULTIPLIER: f64 = 1e15;
const MULTIPLIER_ITERS: usize = 100;

/// Inputs of one online step.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub cost: &'a [f64],
    pub x_prev: &'a [f64],
    pub c_weights: &'a [f64],
    pub w_weights: &'a [f64],
    /// Lower limit of the threshold integral.
    pub z: f64,
    /// Budget on `c(x)`.
    pub cap: f64,
    pub threshold: ThresholdFn,
}

impl StepContext<'_> {
    pub fn d(&self) -> usize {
        self.cost.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.d();
        check_dim(d, self.x_prev.len())?;
        check_dim(d, self.c_weights.len())?;
        check_dim(d, self.w_weights.len())?;
        if !(self.cap.is_finite() && self.z.is_finite()) {
            return Err(CflError::domain("non-finite step context"));
        }
        Ok(())
    }

    pub fn budget(&self) -> f64 {
        self.cap.clamp(0.0, 1.0)
    }

    fn throughput(&self, x: &[f64]) -> f64 {
        dot(x, self.c_weights)
    }
}

/// Running totals that define the consistency constraint of a step.
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyContext<'a> {
    /// Algorithm cost through the previous step.
    pub clip_cost_so_far: f64,
    /// Advice cost through the current step.
    pub adv_cost: f64,
    pub advice: &'a [f64],
    /// Advice utilization through the current step.
    pub advice_utilization: f64,
    /// Algorithm utilization through the previous step.
    pub z_prev: f64,
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ConsistencyContext<'_> {
    /// Everything in the slack that does not depend on `x`.
    fn budget_constant(&self, w: &[f64]) -> f64 {
        let a_norm = weighted_distance(self.advice, &vec![0.0; self.advice.len()], w);
        (1.0 + self.epsilon) * (self.adv_cost + a_norm + (1.0 - self.advice_utilization) * self.lower)
            - self.clip_cost_so_far
            - a_norm
            - (1.0 - self.z_prev) * self.lower
    }

    fn advice_lead(&self) -> f64 {
        self.advice_utilization - self.z_prev
    }
}

fn check_feasible(x: &[f64], ctx: &StepContext) -> Result<()> {
    if x.iter().any(|v| !(-BOX_TOL..=1.0 + BOX_TOL).contains(v)) {
        return Err(CflError::domain("decision outside the unit box"));
    }
    let y = ctx.throughput(x);
    if y > ctx.budget() + 1e-9 {
        return Err(CflError::domain(format!(
            "c(x)={y} exceeds budget {}",
            ctx.budget()
        )));
    }
    Ok(())
}

/// `f·x + ‖x − x_prev‖_w − ∫_z^{z+c(x)} threshold`.
pub fn pseudo_cost_objective(x: &[f64], ctx: &StepContext) -> Result<f64> {
    ctx.validate()?;
    check_dim(ctx.d(), x.len())?;
    check_feasible(x, ctx)?;
    Ok(objective_unchecked(x, ctx))
}

fn objective_unchecked(x: &[f64], ctx: &StepContext) -> f64 {
    let y = ctx.throughput(x);
    dot(ctx.cost, x) + weighted_distance(x, ctx.x_prev, ctx.w_weights)
        - ctx.threshold.integral(ctx.z, ctx.z + y)
}

/// Consistency slack; non-negative exactly when `x` keeps the algorithm within
/// `(1+ε)` of the advice including the advance charges.
pub fn consistency_slack(x: &[f64], ctx: &StepContext, cc: &ConsistencyContext) -> Result<f64> {
    ctx.validate()?;
    check_dim(ctx.d(), x.len())?;
    check_dim(ctx.d(), cc.advice.len())?;
    Ok(slack_unchecked(x, ctx, cc))
}

fn slack_unchecked(x: &[f64], ctx: &StepContext, cc: &ConsistencyContext) -> f64 {
    let w = ctx.w_weights;
    let zeros = vec![0.0; x.len()];
    let a_norm = weighted_distance(cc.advice, &zeros, w);
    let y = ctx.throughput(x);
    let lhs = (1.0 + cc.epsilon)
        * (cc.adv_cost + a_norm + (1.0 - cc.advice_utilization) * cc.lower);
    let rhs = cc.clip_cost_so_far
        + dot(ctx.cost, x)
        + weighted_distance(x, ctx.x_prev, w)
        + weighted_distance(x, cc.advice, w)
        + a_norm
        + (1.0 - cc.z_prev - y) * cc.lower
        + (cc.advice_utilization - cc.z_prev - y).max(0.0) * (cc.upper - cc.lower);
    lhs - rhs
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    /// Marginal rate per unit of throughput.
    rate: f64,
    /// Length in throughput units.
    len: f64,
    coord: usize,
    order: u8,
}

/// Lagrangian weights: `mult` on the constraint, plus the constraint's own data.
#[derive(Clone, Copy)]
struct Penalty<'a> {
    mult: f64,
    advice: &'a [f64],
    lower: f64,
    upper: f64,
    lead: f64,
}

fn build_segments(ctx: &StepContext, pen: Option<&Penalty>) -> Vec<Segment> {
    let mut segs = Vec::with_capacity(3 * ctx.d());
    for i in 0..ctx.d() {
        let (f, w, c, xp) = (ctx.cost[i], ctx.w_weights[i], ctx.c_weights[i], ctx.x_prev[i]);
        let mut cuts = [0.0, xp.clamp(0.0, 1.0), 1.0, 1.0];
        let mut n = 3;
        if let Some(p) = pen {
            cuts[3] = p.advice[i].clamp(0.0, 1.0);
            n = 4;
        }
        let cuts = &mut cuts[..n];
        cuts.sort_by(f64::total_cmp);
        let mut order = 0u8;
        for k in 0..n - 1 {
            let (lo, hi) = (cuts[k], cuts[k + 1]);
            if hi <= lo {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let sgn = |v: f64| if mid > v { 1.0 } else { -1.0 };
            let mut slope = f + w * sgn(xp);
            if let Some(p) = pen {
                slope = (1.0 + p.mult) * slope + p.mult * w * sgn(p.advice[i]);
            }
            segs.push(Segment {
                rate: slope / c,
                len: c * (hi - lo),
                coord: i,
                order,
            });
            order += 1;
        }
    }
    segs.sort_by(|a, b| {
        a.rate
            .total_cmp(&b.rate)
            .then(a.coord.cmp(&b.coord))
            .then(a.order.cmp(&b.order))
    });
    segs
}

/// Greedy walk along the throughput axis. Returns the decision at the first point
/// where the directional derivative of the (penalized) objective is non-negative.
fn walk(ctx: &StepContext, pen: Option<&Penalty>) -> Decision {
    let d = ctx.d();
    let segs = build_segments(ctx, pen);
    let total: f64 = ctx.c_weights.iter().sum();
    let y_max = ctx.budget().min(total);
    let th = &ctx.threshold;
    let shift = |y: f64| match pen {
        Some(p) => p.mult * p.lower + if y < p.lead { p.mult * (p.upper - p.lower) } else { 0.0 },
        None => 0.0,
    };

    let mut x = vec![0.0; d];
    let mut y = 0.0;
    'outer: for seg in &segs {
        if y >= y_max {
            break;
        }
        let end = (y + seg.len).min(y_max);
        let mut pieces = [(y, end); 2];
        let mut n = 1;
        if let Some(p) = pen {
            if p.mult > 0.0 && y < p.lead && p.lead < end {
                pieces = [(y, p.lead), (p.lead, end)];
                n = 2;
            }
        }
        for &(s0, e0) in &pieces[..n] {
            let level = seg.rate - shift(s0);
            if level - th.value(ctx.z + s0) >= 0.0 {
                break 'outer;
            }
            let stop = if level - th.value(ctx.z + e0) <= 0.0 {
                e0
            } else {
                th.inverse(level)
                    .map(|u| (u - ctx.z).clamp(s0, e0))
                    .unwrap_or(e0)
            };
            x[seg.coord] += (stop - s0) / ctx.c_weights[seg.coord];
            y = stop;
            if stop < e0 {
                break 'outer;
            }
        }
    }
    finalize(x, ctx)
}

/// Projects onto the box and the budget.
fn finalize(mut x: Vec<f64>, ctx: &StepContext) -> Decision {
    for v in x.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    let y = ctx.throughput(&x);
    let budget = ctx.budget();
    if y > budget {
        let s = if y > 0.0 { budget / y } else { 0.0 };
        for v in x.iter_mut() {
            *v *= s;
        }
    }
    Decision(x)
}

/// Exact minimizer of the pseudo-cost over `{x ∈ [0,1]^d : c(x) ≤ min(1, cap)}`.
/// Among minimizers the smallest throughput is returned.
pub fn minimize_pseudo_cost(ctx: &StepContext, _tol: f64) -> Result<Decision> {
    ctx.validate()?;
    Ok(walk(ctx, None))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedOutcome {
    pub decision: Decision,
    /// Set when no feasible point was found and the truncated advice was used.
    pub fallback: bool,
}

/// Minimizes the pseudo-cost subject to a non-negative consistency slack.
pub fn minimize_pseudo_cost_constrained(
    ctx: &StepContext,
    cc: &ConsistencyContext,
    tol: f64,
) -> Result<ConstrainedOutcome> {
    ctx.validate()?;
    check_dim(ctx.d(), cc.advice.len())?;
    let free = walk(ctx, None);
    let feasible = |x: &[f64]| slack_unchecked(x, ctx, cc) >= -SLACK_TOL;
    if feasible(&free) {
        return Ok(ConstrainedOutcome {
            decision: free,
            fallback: false,
        });
    }
    let pen = |mult: f64| Penalty {
        mult,
        advice: cc.advice,
        lower: cc.lower,
        upper: cc.upper,
        lead: cc.advice_lead(),
    };

    let mut hi = 1.0;
    let mut x_hi = walk(ctx, Some(&pen(hi)));
    while !feasible(&x_hi) {
        hi *= 2.0;
        if hi > MAX_MULTIPLIER {
            return Ok(ConstrainedOutcome {
                decision: truncated_advice(ctx, cc),
                fallback: true,
            });
        }
        x_hi = walk(ctx, Some(&pen(hi)));
    }
    let mut lo = 0.0;
    let mut x_lo = free;
    for _ in 0..MULTIPLIER_ITERS {
        if hi - lo <= tol.max(1e-15) * 1e-6 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let x = walk(ctx, Some(&pen(mid)));
        if feasible(&x) {
            hi = mid;
            x_hi = x;
        } else {
            lo = mid;
            x_lo = x;
        }
    }

    // The optimum lies on the segment between the two multiplier iterates, where the
    // slack crosses zero.
    let point = |theta: f64| -> Vec<f64> {
        x_hi.iter()
            .zip(x_lo.iter())
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect()
    };
    let slack_at = |theta: f64| slack_unchecked(&point(theta), ctx, cc);
    let (mut a, mut b) = (0.0, 1.0);
    if slack_at(0.0) >= 0.0 {
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if slack_at(m) >= 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
    }
    let boundary = a;
    let obj = |theta: f64| objective_unchecked(&point(theta), ctx);
    let theta = golden_section(obj, 0.0, boundary, 80);
    let mut best = Decision(point(theta));
    let candidates = [Decision(point(boundary)), x_hi.clone()];
    for cand in candidates {
        if feasible(&cand) && objective_unchecked(&cand, ctx) < objective_unchecked(&best, ctx) {
            best = cand;
        }
    }
    let best = finalize(best.0, ctx);
    if !feasible(&best) {
        return Err(CflError::Numeric {
            message: "constrained step solve left the consistency set".into(),
            best: Some(x_hi),
        });
    }
    Ok(ConstrainedOutcome {
        decision: best,
        fallback: false,
    })
}

fn truncated_advice(ctx: &StepContext, cc: &ConsistencyContext) -> Decision {
    finalize(cc.advice.to_vec(), ctx)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if b - a <= 1e-15 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    if f(a) <= f(mid) {
        a
    } else {
        mid
    }
}

/// Exhaustive minimizer over the uniform grid `{0, 1/(n−1), …, 1}^d`, `d ≤ 3`.
/// Verification only.
pub fn grid_oracle(
    ctx: &StepContext,
    cc: Option<&ConsistencyContext>,
    grid_n: usize,
) -> Result<Decision> {
    ctx.validate()?;
    let d = ctx.d();
    if d > 3 {
        return Err(CflError::domain(format!(
            "grid oracle refuses d={d} (at most 3)"
        )));
    }
    if grid_n < 2 {
        return Err(CflError::domain("grid needs at least two levels"));
    }
    if let Some(cc) = cc {
        check_dim(d, cc.advice.len())?;
    }
    let levels: Vec<f64> = (0..grid_n).map(|j| j as f64 / (grid_n - 1) as f64).collect();
    let th = &ctx.threshold;
    let r = th.ratio();
    let k = th.scale();

    // Per-coordinate tables; absent coordinates get a single zero level.
    struct Table {
        vals: Vec<f64>,
        hit: Vec<f64>,
        adv: Vec<f64>,
        thr: Vec<f64>,
        expo: Vec<f64>,
    }
    let tables: Vec<Table> = (0..3)
        .map(|i| {
            if i >= d {
                return Table {
                    vals: vec![0.0],
                    hit: vec![0.0],
                    adv: vec![0.0],
                    thr: vec![0.0],
                    expo: vec![1.0],
                };
            }
            let (f, w, c, xp) = (ctx.cost[i], ctx.w_weights[i], ctx.c_weights[i], ctx.x_prev[i]);
            Table {
                vals: levels.clone(),
                hit: levels.iter().map(|v| f * v + w * (v - xp).abs()).collect(),
                adv: levels
                    .iter()
                    .map(|v| cc.map_or(0.0, |cc| w * (v - cc.advice[i]).abs()))
                    .collect(),
                thr: levels.iter().map(|v| c * v).collect(),
                expo: levels.iter().map(|v| (c * v / r).exp()).collect(),
            }
        })
        .collect();
    let budget = ctx.budget() + BOX_TOL;
    let ez = (ctx.z / r).exp();
    let konst = cc.map(|cc| (cc.budget_constant(ctx.w_weights), cc.advice_lead()));
    let (upper, beta) = (th.upper(), th.beta());

    let mut best: Option<(f64, f64, [usize; 3])> = None;
    let (t0, t1, t2) = (&tables[0], &tables[1], &tables[2]);
    for j0 in 0..t0.vals.len() {
        for j1 in 0..t1.vals.len() {
            let y01 = t0.thr[j0] + t1.thr[j1];
            if y01 > budget {
                break;
            }
            let h01 = t0.hit[j0] + t1.hit[j1];
            let a01 = t0.adv[j0] + t1.adv[j1];
            let e01 = t0.expo[j0] * t1.expo[j1];
            for j2 in 0..t2.vals.len() {
                let y = y01 + t2.thr[j2];
                if y > budget {
                    break;
                }
                let hit = h01 + t2.hit[j2];
                if let (Some((c0, lead)), Some(cc)) = (konst, cc) {
                    let g = hit + a01 + t2.adv[j2] - cc.lower * y
                        + (lead - y).max(0.0) * (cc.upper - cc.lower);
                    if c0 - g < -SLACK_TOL {
                        continue;
                    }
                }
                let integral = (upper - beta) * y + r * k * ez * (e01 * t2.expo[j2] - 1.0);
                let obj = hit - integral;
                let better = match best {
                    None => true,
                    Some((bo, by, _)) => obj < bo || (obj == bo && y < by),
                };
                if better {
                    best = Some((obj, y, [j0, j1, j2]));
                }
            }
        }
    }
    let (_, _, idx) = best.ok_or_else(|| CflError::Infeasible("no grid point satisfies the constraints".into()))?;
    Ok(Decision(
        (0..d).map(|i| tables[i].vals[idx[i]]).collect(),
    ))
}
