//! Flat key-value sweep configuration: one `key = value` per line, `#`
//! comments, unknown keys rejected.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use sombl::som::Schedule;
use sombl::{WeightScheme, WindowSpec};

use crate::harness::{EncoderSpec, SystemKind};

/// A parsed sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub train: PathBuf,
    pub test: PathBuf,
    pub windows: Vec<WindowSpec>,
    pub systems: Vec<SystemKind>,
    pub encoder: EncoderSpec,
    pub weights: WeightScheme,
    pub seed: u64,
    pub repeats: u64,
    /// Map size; `None` uses the square-root default per window.
    pub map_size: Option<usize>,
    pub winners: usize,
    /// Where to write machine-readable records, if anywhere.
    pub records: Option<PathBuf>,
    /// Where to write one model file per row, if anywhere.
    pub models_dir: Option<PathBuf>,
    /// Training-schedule override; `None` uses the size-matched default.
    pub schedule: Option<Schedule>,
}

impl Default for SweepConfig {
    fn default() -> SweepConfig {
        SweepConfig {
            train: PathBuf::new(),
            test: PathBuf::new(),
            windows: vec![WindowSpec::new(1, 1)],
            systems: vec![SystemKind::Mbl, SystemKind::Sommbl, SystemKind::Lsommbl],
            encoder: EncoderSpec::Orthogonal,
            weights: WeightScheme::GainRatio,
            seed: 1,
            repeats: 1,
            map_size: None,
            winners: sombl::classify::DEFAULT_WINNERS,
            records: None,
            models_dir: None,
            schedule: None,
        }
    }
}

fn parse_list<T: FromStr>(value: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse()
                .map_err(|e| anyhow::anyhow!("bad {what} {part:?}: {e}"))?,
        );
    }
    Ok(out)
}

/// Parses a configuration. Lines look like `windows = 0-0, 1-1`; every
/// key has a default except `train` and `test`, which are required. An
/// empty `windows` or `systems` list is allowed and sweeps nothing.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let mut saw_train = false;
    let mut saw_test = false;
    let mut sched: (Option<usize>, Option<usize>, Option<usize>, Option<f64>) =
        (None, None, None, None);

    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let no = no + 1;
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {no}: expected `key = value`, got {raw:?}");
        };
        let key = key.trim();
        let value = value.trim();
        let ctx = |what: &str| format!("config line {no}: {what}");
        match key {
            "train" => {
                cfg.train = PathBuf::from(value);
                saw_train = true;
            }
            "test" => {
                cfg.test = PathBuf::from(value);
                saw_test = true;
            }
            "windows" => {
                cfg.windows = parse_list(value, "window").with_context(|| ctx("windows"))?
            }
            "systems" => {
                cfg.systems = parse_list(value, "system").with_context(|| ctx("systems"))?
            }
            "encoder" => {
                cfg.encoder = value.parse().map_err(|e: String| anyhow::anyhow!(e))?
            }
            "weights" => cfg.weights = value.parse().with_context(|| ctx("weights"))?,
            "seed" => cfg.seed = value.parse().with_context(|| ctx("seed"))?,
            "repeats" => {
                cfg.repeats = value.parse().with_context(|| ctx("repeats"))?;
                if cfg.repeats == 0 {
                    bail!("config line {no}: repeats must be at least 1");
                }
            }
            "map-size" => {
                let n: usize = value.parse().with_context(|| ctx("map-size"))?;
                cfg.map_size = if n == 0 { None } else { Some(n) };
            }
            "winners" => cfg.winners = value.parse().with_context(|| ctx("winners"))?,
            "records" => cfg.records = Some(PathBuf::from(value)),
            "models-dir" => cfg.models_dir = Some(PathBuf::from(value)),
            "epochs" => sched.0 = Some(value.parse().with_context(|| ctx("epochs"))?),
            "initial-radius" => {
                sched.1 = Some(value.parse().with_context(|| ctx("initial-radius"))?)
            }
            "radius-step" => {
                sched.2 = Some(value.parse().with_context(|| ctx("radius-step"))?)
            }
            "learning-rate" => {
                sched.3 = Some(value.parse().with_context(|| ctx("learning-rate"))?)
            }
            other => bail!("config line {no}: unknown key {other:?}"),
        }
    }

    if !saw_train {
        bail!("config: missing required key `train`");
    }
    if !saw_test {
        bail!("config: missing required key `test`");
    }
    if let (Some(epochs), Some(initial_radius), Some(radius_step), Some(learning_rate)) = sched {
        cfg.schedule = Some(Schedule { epochs, initial_radius, radius_step, learning_rate });
    } else if sched != (None, None, None, None) {
        bail!(
            "config: schedule overrides need all of epochs, initial-radius, \
             radius-step and learning-rate"
        );
    }
    Ok(cfg)
}
