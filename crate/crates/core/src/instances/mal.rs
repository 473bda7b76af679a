//! Metric allocation on a weighted star, and its reduction to a CFL instance by
//! dropping the OFF point.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, CflError, Result};
use crate::model::{weighted_l1, Decision, Instance, Setting};

/// Allocation problem over `n` points of a star metric. Point `off_index` is the
/// idle state: zero throughput, zero cost. Allocations are points of the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MalInstance {
    pub n: usize,
    pub off_index: usize,
    /// Edge weight from the hub to each point.
    pub edge_weights: Vec<f64>,
    pub c_weights: Vec<f64>,
    /// `T × n` linear costs.
    pub costs: Vec<Vec<f64>>,
    pub lower: f64,
    pub upper: f64,
}

impl MalInstance {
    pub fn validate(&self) -> Result<()> {
        if self.off_index >= self.n {
            return Err(CflError::domain(format!(
                "OFF point {} missing from {} points",
                self.off_index, self.n
            )));
        }
        if self.n < 2 {
            return Err(CflError::domain("need at least one point besides OFF"));
        }
        check_dim(self.n, self.edge_weights.len())?;
        check_dim(self.n, self.c_weights.len())?;
        if self.c_weights[self.off_index] != 0.0 {
            return Err(CflError::domain("OFF point must have zero throughput"));
        }
        for f in &self.costs {
            check_dim(self.n, f.len())?;
            if f[self.off_index] != 0.0 {
                return Err(CflError::domain("OFF point must have zero cost"));
            }
        }
        Ok(())
    }

    /// Weighted-ℓ1 distance between two allocations.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dim(self.n, a.len())?;
        check_dim(self.n, b.len())?;
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        weighted_l1(&diff, &self.edge_weights)
    }

    pub fn hitting_cost(&self, t: usize, a: &[f64]) -> Result<f64> {
        check_dim(self.n, a.len())?;
        Ok(self.costs[t].iter().zip(a).map(|(f, x)| f * x).sum())
    }
}

/// Result of the reduction: the CFL instance and the coordinate maps.
#[derive(Debug, Clone)]
pub struct MalTransform {
    pub instance: Instance,
    /// `points[i]` is the MAL point behind CFL coordinate `i`.
    pub points: Vec<usize>,
    pub off_index: usize,
    pub n: usize,
}

impl MalTransform {
    /// Drops the OFF coordinate of a simplex allocation.
    pub fn embed(&self, a: &[f64]) -> Result<Decision> {
        check_dim(self.n, a.len())?;
        Ok(Decision(self.points.iter().map(|&p| a[p]).collect()))
    }

    /// Inverse of `embed`: the OFF coordinate takes the remaining mass.
    pub fn extract(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.points.len(), x.len())?;
        let used: f64 = x.iter().sum();
        if used > 1.0 + 1e-12 {
            return Err(CflError::domain(format!(
                "decision mass {used} exceeds the simplex"
            )));
        }
        let mut a = vec![0.0; self.n];
        for (&p, v) in self.points.iter().zip(x) {
            a[p] = *v;
        }
        a[self.off_index] = (1.0 - used).max(0.0);
        Ok(a)
    }
}

/// CFL coordinates are the non-OFF points in index order; each carries its own
/// edge weight plus the OFF edge weight.
pub fn mal_to_cfl(mal: &MalInstance) -> Result<MalTransform> {
    mal.validate()?;
    let points: Vec<usize> = (0..mal.n).filter(|&p| p != mal.off_index).collect();
    let w_off = mal.edge_weights[mal.off_index];
    let w = points.iter().map(|&p| mal.edge_weights[p] + w_off).collect();
    let c = points.iter().map(|&p| mal.c_weights[p]).collect();
    let costs = mal
        .costs
        .iter()
        .map(|f| points.iter().map(|&p| f[p]).collect())
        .collect();
    let setting = Setting::new(mal.costs.len(), mal.lower, mal.upper, c, w)?;
    Ok(MalTransform {
        instance: Instance::new(setting, costs)?,
        points,
        off_index: mal.off_index,
        n: mal.n,
    })
}
