use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::records::{sort_records, ExperimentRecord, InstanceFile};
use super::roster::AlgorithmSpec;
use crate::error::{CflError, Result};
use crate::instances::{generate_one, GeneratorConfig};
use crate::model::{Decision, Instance};
use crate::offline::{mix_advice, solve_opt, solve_worst};

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub d: usize,
    pub upper_over_lower: f64,
    pub beta: f64,
    pub sigma: f64,
}

impl Cell {
    pub const DEFAULT: Cell = Cell { d: 5, upper_over_lower: 250.0, beta: 50.0, sigma: 50.0 };

    fn generator(&self, seed: u64, count: usize) -> GeneratorConfig {
        GeneratorConfig {
            d: self.d,
            upper_over_lower: self.upper_over_lower,
            beta_nominal: self.beta,
            sigma: self.sigma,
            seed,
            count,
            ..GeneratorConfig::standard(seed)
        }
    }
}

/// Parses `d=5,ul=250,beta=50,sigma=50`; missing keys take the default cell's value.
impl std::str::FromStr for Cell {
    type Err = CflError;

    fn from_str(s: &str) -> Result<Self> {
        let mut cell = Cell::DEFAULT;
        for kv in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CflError::config(format!("expected key=value, got {kv:?}")))?;
            let num = || {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CflError::config(format!("bad value in {kv:?}")))
            };
            match k.trim() {
                "d" => {
                    cell.d = v
                        .trim()
                        .parse()
                        .map_err(|_| CflError::config(format!("bad value in {kv:?}")))?
                }
                "ul" | "U/L" => cell.upper_over_lower = num()?,
                "beta" => cell.beta = num()?,
                "sigma" => cell.sigma = num()?,
                other => return Err(CflError::config(format!("unknown cell key {other:?}"))),
            }
        }
        Ok(cell)
    }
}

/// Grid, advice levels, roster and sample size of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub cells: Vec<Cell>,
    /// Advice mixing levels. Empty means advice-driven entries are dropped.
    pub xi_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub per_cell: usize,
    pub seed: u64,
    pub roster: Vec<AlgorithmSpec>,
}

pub const PRESETS: [&str; 7] = ["default", "beta_d", "beta", "ul", "sigma", "d", "xi"];

fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| from + k as f64 * step).collect()
}

fn advice_free() -> Vec<AlgorithmSpec> {
    vec![
        AlgorithmSpec::Alg1,
        AlgorithmSpec::SimpleThreshold,
        AlgorithmSpec::Agnostic,
        AlgorithmSpec::MoveToMinimizer,
    ]
}

impl SweepConfig {
    /// Named experiment. `quick` uses 100 instances per cell instead of 1000.
    pub fn preset(name: &str, seed: u64, quick: bool) -> Result<Self> {
        let base = Cell::DEFAULT;
        let eps_list = vec![2.0, 5.0, 10.0];
        let clips = || eps_list.iter().map(|&epsilon| AlgorithmSpec::Clip { epsilon });
        let (cells, xi_list, roster): (Vec<Cell>, Vec<f64>, Vec<AlgorithmSpec>) = match name {
            "default" => (vec![base], vec![], advice_free()),
            "beta_d" => {
                let mut cells: Vec<Cell> = steps(0.0, 100.0, 5.0)
                    .into_iter()
                    .map(|beta| Cell { beta, ..base })
                    .collect();
                cells.extend((5..=21).step_by(2).map(|d| Cell { d, ..base }));
                (cells, vec![], advice_free())
            }
            "beta" => (
                steps(0.0, base.upper_over_lower / 2.5, 5.0)
                    .into_iter()
                    .map(|beta| Cell { beta, ..base })
                    .collect(),
                vec![0.0],
                advice_free().into_iter().chain(clips()).collect(),
            ),
            "ul" => (
                steps(50.0, 1250.0, 100.0)
                    .into_iter()
                    .map(|ul| Cell {
                        upper_over_lower: ul,
                        beta: base.beta.min(ul / 2.5),
                        sigma: base.sigma.min(ul / 2.0),
                        ..base
                    })
                    .collect(),
                vec![],
                advice_free(),
            ),
            "sigma" => (
                steps(0.0, base.upper_over_lower / 2.0, 10.0)
                    .into_iter()
                    .map(|sigma| Cell { sigma, ..base })
                    .collect(),
                vec![],
                advice_free(),
            ),
            "d" => (
                (5..=21).step_by(2).map(|d| Cell { d, ..base }).collect(),
                vec![],
                advice_free(),
            ),
            "xi" => (
                vec![base],
                steps(0.0, 1.0, 0.1).into_iter().map(|x| (x * 10.0).round() / 10.0).collect(),
                std::iter::once(AlgorithmSpec::Alg1)
                    .chain(clips())
                    .chain(eps_list.iter().map(|&epsilon| AlgorithmSpec::Baseline { epsilon }))
                    .collect(),
            ),
            other => {
                return Err(CflError::config(format!(
                    "unknown preset {other:?}; expected one of {PRESETS:?}"
                )))
            }
        };
        Ok(SweepConfig {
            cells,
            xi_list,
            eps_list,
            per_cell: if quick { 100 } else { 1000 },
            seed,
            roster,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() || self.roster.is_empty() || self.per_cell == 0 {
            return Err(CflError::config("sweep needs cells, a roster and instances per cell"));
        }
        if let Some(x) = self.xi_list.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(CflError::config(format!("xi={x} outside [0,1]")));
        }
        for (k, cell) in self.cells.iter().enumerate() {
            cell.generator(self.cell_seed(k), self.per_cell).validate()?;
        }
        Ok(())
    }

    /// Seed of cell `k`, a fixed function of the master seed.
    pub fn cell_seed(&self, k: usize) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        rng.next_u64()
    }
}

/// Labels carried into each record of one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceMeta {
    pub seed: u64,
    pub index: usize,
    pub beta_nominal: f64,
    pub sigma: f64,
}

/// Runs the roster on one instance. Advice-free entries give one record each;
/// advice-driven entries give one record per `xi`. OPT and the worst schedule
/// are solved once and shared.
pub fn evaluate_instance(
    instance: &Instance,
    meta: InstanceMeta,
    roster: &[AlgorithmSpec],
    xi_list: &[f64],
) -> Result<Vec<ExperimentRecord>> {
    let opt = solve_opt(instance)?;
    let opt_cost = opt.objective;
    let needs_advice = !xi_list.is_empty() && roster.iter().any(AlgorithmSpec::needs_advice);
    let worst = if needs_advice { Some(solve_worst(instance)?) } else { None };
    let record = |spec: &AlgorithmSpec, xi: Option<f64>, advice: Option<&[Decision]>| {
        let alg_cost = spec.run(instance, advice)?.total_cost();
        let empirical_cr = alg_cost / opt_cost;
        if empirical_cr < 1.0 - 1e-6 {
            return Err(CflError::numeric(format!(
                "{spec} beat the offline optimum on instance {} ({alg_cost} < {opt_cost})",
                meta.index
            )));
        }
        Ok(ExperimentRecord {
            seed: meta.seed,
            instance_index: meta.index,
            d: instance.d(),
            horizon: instance.horizon(),
            lower: instance.lower(),
            upper: instance.upper(),
            beta_nominal: meta.beta_nominal,
            beta_realized: instance.beta(),
            sigma: meta.sigma,
            xi,
            algorithm: spec.family().to_string(),
            epsilon: spec.epsilon(),
            alg_cost,
            opt_cost,
            empirical_cr,
        })
    };
    let mut out = Vec::new();
    for spec in roster.iter().filter(|s| !s.needs_advice()) {
        out.push(record(spec, None, None)?);
    }
    if let Some(worst) = &worst {
        for &xi in xi_list {
            let advice = mix_advice(&opt.trajectory.decisions, &worst.trajectory.decisions, xi)?;
            for spec in roster.iter().filter(|s| s.needs_advice()) {
                out.push(record(spec, Some(xi), Some(&advice))?);
            }
        }
    }
    Ok(out)
}

/// Runs the full grid in parallel and returns records in sorted order.
pub fn cmd_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.cells.len())
        .flat_map(|c| (0..cfg.per_cell).map(move |i| (c, i)))
        .collect();
    let chunks = jobs
        .par_iter()
        .map(|&(c, i)| {
            let cell = cfg.cells[c];
            let seed = cfg.cell_seed(c);
            let instance = generate_one(&cell.generator(seed, cfg.per_cell), i)?;
            let meta = InstanceMeta { seed, index: i, beta_nominal: cell.beta, sigma: cell.sigma };
            evaluate_instance(&instance, meta, &cfg.roster, &cfg.xi_list)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ExperimentRecord> = chunks.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Runs the roster over instance files. Instances without generator metadata
/// carry their realized `β` as nominal and `σ = NaN`.
pub fn cmd_run(
    files: &[impl AsRef<Path>],
    roster: &[AlgorithmSpec],
    xi_list: &[f64],
) -> Result<Vec<ExperimentRecord>> {
    if roster.is_empty() {
        return Err(CflError::config("empty algorithm roster"));
    }
    if roster.iter().any(AlgorithmSpec::needs_advice) && xi_list.is_empty() {
        return Err(CflError::config("advice-driven algorithms need at least one xi"));
    }
    let loaded = files
        .iter()
        .map(|p| {
            let file = InstanceFile::load(p)?;
            let instance = file.to_instance()?;
            Ok((file, instance))
        })
        .collect::<Result<Vec<_>>>()?;
    let chunks = loaded
        .par_iter()
        .enumerate()
        .map(|(k, (file, instance))| {
            let meta = InstanceMeta {
                seed: file.seed.unwrap_or(0),
                index: file.index.unwrap_or(k),
                beta_nominal: file
                    .generator_config
                    .as_ref()
                    .map_or(instance.beta(), |g| g.beta_nominal),
                sigma: file.generator_config.as_ref().map_or(f64::NAN, |g| g.sigma),
            };
            evaluate_instance(instance, meta, roster, xi_list)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ExperimentRecord> = chunks.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Generates the instances of one cell and writes `instance_NNNN.json` files.
pub fn cmd_gen(cell: Cell, seed: u64, count: usize, out_dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let cfg = cell.generator(seed, count);
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    (0..count)
        .into_par_iter()
        .map(|k| {
            let inst = generate_one(&cfg, k)?;
            let path = out_dir.join(format!("instance_{k:04}.json"));
            InstanceFile::from_instance(&inst, Some(seed), Some(cfg.clone()), Some(k)).save(&path)?;
            Ok(path)
        })
        .collect()
}
