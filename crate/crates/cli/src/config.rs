//! Optional TOML config file. Every key mirrors a command-line flag; a flag
//! given on the command line overrides the file.

use std::path::{Path, PathBuf};

use gaussgrasp::ground_truth::{MapGenConfig, MapMode, SoftRule};
use gaussgrasp::metrics::{normalize_thresholds, DEFAULT_THRESHOLDS};
use gaussgrasp::oracle::GripperParams;
use serde::Deserialize;

use crate::args::{GripperArgs, MapArgs, ModeArg, SoftRuleArg};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub mode: Option<MapMode>,
    pub sigma: Option<f64>,
    pub bins: Option<usize>,
    pub wmax: Option<f64>,
    pub soft_floor: Option<f64>,
    pub soft_rule: Option<SoftRule>,
    /// Either an array of numbers or a CSV string.
    pub thresholds: Option<Thresholds>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jaw_thickness: Option<f64>,
    pub jaw_length: Option<f64>,
    pub grip_min: Option<f64>,
    pub grip_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Thresholds {
    List(Vec<f64>),
    Csv(String),
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn map_config(&self, flags: &MapArgs) -> CliResult<MapGenConfig> {
        let d = MapGenConfig::default();
        let mode = match flags.mode {
            Some(ModeArg::Binary) => MapMode::Binary,
            Some(ModeArg::Soft) => MapMode::Soft,
            Some(ModeArg::Strong) => MapMode::Strong,
            None => self.mode.unwrap_or(d.mode),
        };
        let soft_rule = match flags.soft_rule {
            Some(SoftRuleArg::Floor) => SoftRule::Floor,
            Some(SoftRuleArg::LiteralMin) => SoftRule::LiteralMin,
            None => self.soft_rule.unwrap_or(d.soft_rule),
        };
        let cfg = MapGenConfig {
            mode,
            sigma: flags.sigma.or(self.sigma).unwrap_or(d.sigma),
            bins: flags.bins.or(self.bins).unwrap_or(d.bins),
            w_max: self.w_max(flags.wmax),
            soft_floor: flags.soft_floor.or(self.soft_floor).unwrap_or(d.soft_floor),
            soft_rule,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn w_max(&self, flag: Option<f64>) -> f64 {
        flag.or(self.wmax).unwrap_or(MapGenConfig::default().w_max)
    }

    pub fn gripper(&self, flags: &GripperArgs) -> CliResult<GripperParams> {
        let d = GripperParams::default();
        let gp = GripperParams {
            jaw_thickness: flags.jaw_thickness.or(self.jaw_thickness).unwrap_or(d.jaw_thickness),
            jaw_length: flags.jaw_length.or(self.jaw_length).unwrap_or(d.jaw_length),
            w_min: flags.grip_min.or(self.grip_min).unwrap_or(d.w_min),
            w_max: flags.grip_max.or(self.grip_max).unwrap_or(d.w_max),
        };
        gp.validate()?;
        Ok(gp)
    }

    pub fn thresholds(&self, flag: Option<&str>) -> CliResult<Vec<f64>> {
        let raw = match (flag, &self.thresholds) {
            (Some(csv), _) => parse_csv(csv)?,
            (None, Some(Thresholds::Csv(csv))) => parse_csv(csv)?,
            (None, Some(Thresholds::List(v))) => v.clone(),
            (None, None) => DEFAULT_THRESHOLDS.to_vec(),
        };
        Ok(normalize_thresholds(&raw)?)
    }

    pub fn jobs(&self, flag: Option<usize>) -> CliResult<usize> {
        let jobs = flag
            .or(self.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::Invalid("--jobs must be >= 1".into()));
        }
        Ok(jobs)
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(0)
    }

    pub fn out(&self, flag: Option<&Path>) -> CliResult<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.out.clone())
            .ok_or_else(|| CliError::Invalid("no output directory: pass --out or set `out` in the config".into()))
    }
}

fn parse_csv(csv: &str) -> CliResult<Vec<f64>> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Invalid(format!("threshold `{s}` is not a number")))
        })
        .collect()
}
