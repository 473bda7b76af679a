use std::fmt;
use std::str::FromStr;

use crate::algorithms::{
    Agnostic, Alg1, Baseline, Clip, Idle, MoveToMinimizer, OnlineAlgorithm, SimpleThreshold,
    simulate, check_advice,
};
use crate::error::{CflError, Result};
use crate::model::{Decision, Instance, Setting, Trajectory};

/// One entry of an algorithm roster, e.g. `alg1` or `clip:eps=2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    Alg1,
    Clip { epsilon: f64 },
    Baseline { epsilon: f64 },
    /// The advice itself, played back.
    Advice,
    Agnostic,
    MoveToMinimizer,
    SimpleThreshold,
    Inactive,
}

impl AlgorithmSpec {
    pub fn needs_advice(&self) -> bool {
        matches!(
            self,
            AlgorithmSpec::Clip { .. } | AlgorithmSpec::Baseline { .. } | AlgorithmSpec::Advice
        )
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            AlgorithmSpec::Clip { epsilon } | AlgorithmSpec::Baseline { epsilon } => Some(*epsilon),
            _ => None,
        }
    }

    /// Name without parameters; the `algorithm` column of result files.
    pub fn family(&self) -> &'static str {
        match self {
            AlgorithmSpec::Alg1 => "alg1",
            AlgorithmSpec::Clip { .. } => "clip",
            AlgorithmSpec::Baseline { .. } => "baseline",
            AlgorithmSpec::Advice => "adv",
            AlgorithmSpec::Agnostic => "agnostic",
            AlgorithmSpec::MoveToMinimizer => "move_to_minimizer",
            AlgorithmSpec::SimpleThreshold => "simple_threshold",
            AlgorithmSpec::Inactive => "inactive",
        }
    }

    /// Fresh online player for a setting. Advice-driven players need `advice`.
    pub fn player(&self, setting: &Setting, advice: Option<&[Decision]>) -> Result<Box<dyn OnlineAlgorithm>> {
        let need = || {
            advice
                .map(<[Decision]>::to_vec)
                .ok_or_else(|| CflError::config(format!("{self} needs advice")))
        };
        Ok(match *self {
            AlgorithmSpec::Alg1 => Box::new(Alg1::new(setting)?),
            AlgorithmSpec::Clip { epsilon } => Box::new(Clip::new(setting, need()?, epsilon)?),
            AlgorithmSpec::Baseline { epsilon } => Box::new(Baseline::new(setting, need()?, epsilon)?),
            AlgorithmSpec::Advice => Box::new(Playback { advice: need()? }),
            AlgorithmSpec::Agnostic => Box::new(Agnostic::new(setting)),
            AlgorithmSpec::MoveToMinimizer => Box::new(MoveToMinimizer::new(setting)),
            AlgorithmSpec::SimpleThreshold => Box::new(SimpleThreshold::new(setting)),
            AlgorithmSpec::Inactive => Box::new(Idle::new(setting)),
        })
    }

    pub fn run(&self, instance: &Instance, advice: Option<&[Decision]>) -> Result<Trajectory> {
        if let Some(a) = advice.filter(|_| self.needs_advice()) {
            check_advice(instance, a)?;
        }
        let mut p = self.player(&instance.setting, advice)?;
        simulate(p.as_mut(), instance)
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.epsilon() {
            Some(e) => write!(f, "{}:eps={e}", self.family()),
            None => f.write_str(self.family()),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = CflError;

    /// Accepts `name` or `name:eps=<value>`; `eps` is required for clip and baseline.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let eps = match param {
            None => None,
            Some(p) => {
                let v = p
                    .strip_prefix("eps=")
                    .ok_or_else(|| CflError::config(format!("unknown parameter {p:?} in {s:?}")))?;
                Some(
                    v.parse::<f64>()
                        .map_err(|_| CflError::config(format!("bad epsilon {v:?} in {s:?}")))?,
                )
            }
        };
        let plain = |spec: AlgorithmSpec| match eps {
            None => Ok(spec),
            Some(_) => Err(CflError::config(format!("{name} takes no parameters"))),
        };
        let with_eps = |make: fn(f64) -> AlgorithmSpec| {
            eps.map(make)
                .ok_or_else(|| CflError::config(format!("{name} needs eps, e.g. {name}:eps=2")))
        };
        match name {
            "alg1" => plain(AlgorithmSpec::Alg1),
            "adv" => plain(AlgorithmSpec::Advice),
            "agnostic" => plain(AlgorithmSpec::Agnostic),
            "move_to_minimizer" => plain(AlgorithmSpec::MoveToMinimizer),
            "simple_threshold" => plain(AlgorithmSpec::SimpleThreshold),
            "inactive" => plain(AlgorithmSpec::Inactive),
            "clip" => with_eps(|epsilon| AlgorithmSpec::Clip { epsilon }),
            "baseline" => with_eps(|epsilon| AlgorithmSpec::Baseline { epsilon }),
            _ => Err(CflError::config(format!("unknown algorithm {name:?}"))),
        }
    }
}

/// Parses a comma-separated roster. Bare `clip` / `baseline` expand over `eps_list`.
pub fn parse_roster(text: &str, eps_list: &[f64]) -> Result<Vec<AlgorithmSpec>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "clip" | "baseline" => {
                if eps_list.is_empty() {
                    return Err(CflError::config(format!("{item} given without any epsilon")));
                }
                for &e in eps_list {
                    out.push(format!("{item}:eps={e}").parse()?);
                }
            }
            _ => out.push(item.parse()?),
        }
    }
    if out.is_empty() {
        return Err(CflError::config("empty algorithm roster"));
    }
    Ok(out)
}

/// Plays back a fixed decision sequence.
struct Playback {
    advice: Vec<Decision>,
}

impl OnlineAlgorithm for Playback {
    fn name(&self) -> String {
        "adv".into()
    }

    fn step(&mut self, t: usize, _cost: &[f64]) -> Result<Decision> {
        self.advice
            .get(t - 1)
            .cloned()
            .ok_or_else(|| CflError::domain(format!("no advice for step {t}")))
    }
}
