//! Resolved run configuration and the flat `key = value` config file format.
//!
//! Precedence: built-in defaults < `TELESIM_SEED` environment fallback <
//! config file < command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Teleport,
    Swap,
    BaselineClassical,
    BaselineRandom,
    Calibrate,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Teleport => "teleport",
            Experiment::Swap => "swap",
            Experiment::BaselineClassical => "baseline-classical",
            Experiment::BaselineRandom => "baseline-random",
            Experiment::Calibrate => "calibrate",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "teleport" => Ok(Experiment::Teleport),
            "swap" => Ok(Experiment::Swap),
            "baseline-classical" => Ok(Experiment::BaselineClassical),
            "baseline-random" => Ok(Experiment::BaselineRandom),
            "calibrate" => Ok(Experiment::Calibrate),
            other => Err(CliError::config(format!("unknown experiment '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" | "montecarlo" => Ok(Mode::MonteCarlo),
            other => Err(CliError::config(format!("unknown mode '{other}' (use exact|mc)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::config(format!("unknown format '{other}' (use json|csv)"))),
        }
    }
}

/// Everything one run needs, after merging defaults, environment, config
/// file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub chi_forward: f64,
    pub chi_return: f64,
    pub overlap_v: f64,
    pub efficiency: f64,
    pub setting: String,
    pub theta_steps: usize,
    pub target_fidelity: Option<f64>,
    pub target_visibility: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            mode: Mode::Exact,
            trials: 1_000_000,
            seed: 0,
            chi_forward: 0.1,
            chi_return: 0.1,
            overlap_v: 1.0,
            efficiency: 1.0,
            setting: "plus45".to_string(),
            theta_steps: 16,
            target_fidelity: None,
            target_visibility: None,
            out: None,
            format: Format::Json,
        }
    }

    /// Applies the `TELESIM_SEED` fallback (weaker than config file and
    /// flags).
    pub fn apply_env_seed(&mut self) -> Result<(), CliError> {
        if let Ok(raw) = std::env::var("TELESIM_SEED") {
            self.seed = raw
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("TELESIM_SEED '{raw}' is not a u64")))?;
        }
        Ok(())
    }

    /// Applies one `key = value` assignment (config file line or mirror of a
    /// flag).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::config(format!("{key} = '{value}': expected {what}"));
        match key {
            "experiment" => self.experiment = Experiment::parse(value)?,
            "mode" => self.mode = Mode::parse(value)?,
            "trials" => self.trials = value.parse().map_err(|_| bad("an integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("a u64"))?,
            "chi" => {
                let chi: f64 = value.parse().map_err(|_| bad("a number"))?;
                self.chi_forward = chi;
                self.chi_return = chi;
            }
            "chi_forward" => self.chi_forward = value.parse().map_err(|_| bad("a number"))?,
            "chi_return" => self.chi_return = value.parse().map_err(|_| bad("a number"))?,
            "overlap_v" => self.overlap_v = value.parse().map_err(|_| bad("a number"))?,
            "efficiency" => self.efficiency = value.parse().map_err(|_| bad("a number"))?,
            "setting" => self.setting = value.to_string(),
            "theta_steps" => self.theta_steps = value.parse().map_err(|_| bad("an integer"))?,
            "target_fidelity" => {
                self.target_fidelity = Some(value.parse().map_err(|_| bad("a number"))?)
            }
            "target_visibility" => {
                self.target_visibility = Some(value.parse().map_err(|_| bad("a number"))?)
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Format::parse(value)?,
            other => return Err(CliError::config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses a flat config file; later lines override earlier ones.
    pub fn apply_file(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "{origin}:{}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Range validation with the violated constraint named.
    pub fn validate(&self) -> Result<(), CliError> {
        let check = |name: &str, v: f64, lo: f64, hi: f64| {
            if v.is_finite() && (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(CliError::config(format!("{name} = {v} violates range [{lo}, {hi}]")))
            }
        };
        check("chi_forward", self.chi_forward, 0.0, 0.2)?;
        check("chi_return", self.chi_return, 0.0, 0.2)?;
        check("overlap_v", self.overlap_v, 0.0, 1.0)?;
        check("efficiency", self.efficiency, 0.0, 1.0)?;
        if let Some(t) = self.target_fidelity {
            check("target_fidelity", t, 0.5, 1.0)?;
        }
        if let Some(t) = self.target_visibility {
            check("target_visibility", t, 0.0, 1.0)?;
        }
        if self.theta_steps == 0 {
            return Err(CliError::config("theta_steps = 0 violates range [1, ...]".into()));
        }
        parse_setting(&self.setting)?;
        Ok(())
    }
}

impl fmt::Display for RunConfig {
    /// The `--dump-config` serialization; re-parses to an identical config.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment = {}", self.experiment.as_str())?;
        writeln!(f, "mode = {}", self.mode.as_str())?;
        writeln!(f, "trials = {}", self.trials)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "chi_forward = {}", self.chi_forward)?;
        writeln!(f, "chi_return = {}", self.chi_return)?;
        writeln!(f, "overlap_v = {}", self.overlap_v)?;
        writeln!(f, "efficiency = {}", self.efficiency)?;
        writeln!(f, "setting = {}", self.setting)?;
        writeln!(f, "theta_steps = {}", self.theta_steps)?;
        if let Some(t) = self.target_fidelity {
            writeln!(f, "target_fidelity = {t}")?;
        }
        if let Some(t) = self.target_visibility {
            writeln!(f, "target_visibility = {t}")?;
        }
        if let Some(out) = &self.out {
            writeln!(f, "out = {}", out.display())?;
        }
        writeln!(f, "format = {}", self.format.as_str())
    }
}

/// Maps a setting name to the teleport input.
pub fn parse_setting(name: &str) -> Result<telesim_core::experiments::InputSetting, CliError> {
    use telesim_core::experiments::InputSetting;
    match name.to_ascii_lowercase().as_str() {
        "h" => Ok(InputSetting::H),
        "v" => Ok(InputSetting::V),
        "plus45" | "+45" => Ok(InputSetting::Plus45),
        "minus45" | "-45" => Ok(InputSetting::Minus45),
        "r" | "circular" => Ok(InputSetting::RightCircular),
        other => Err(CliError::config(format!(
            "unknown setting '{other}' (use h|v|plus45|minus45|r)"
        ))),
    }
}

/// Per-detector efficiency map: one uniform value for every detector id.
pub fn uniform_efficiency(ids: &[&str], eta: f64) -> BTreeMap<String, f64> {
    ids.iter().map(|id| (id.to_string(), eta)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips() {
        let mut cfg = RunConfig::defaults(Experiment::Swap);
        cfg.trials = 4242;
        cfg.seed = 7;
        cfg.chi_forward = 0.12;
        cfg.overlap_v = 0.8;
        cfg.target_visibility = Some(0.65);
        cfg.format = Format::Csv;
        let dumped = cfg.to_string();
        let mut reparsed = RunConfig::defaults(Experiment::Teleport);
        reparsed.apply_file(&dumped, "dump").unwrap();
        assert_eq!(cfg, reparsed);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut cfg = RunConfig::defaults(Experiment::Teleport);
        assert!(cfg.apply_file("bogus = 1\n", "t").is_err());
    }

    #[test]
    fn validation_names_the_constraint() {
        let mut cfg = RunConfig::defaults(Experiment::Teleport);
        cfg.overlap_v = 1.5;
        let err = cfg.validate().unwrap_err();
        assert!(format!("{err}").contains("overlap_v"));
    }
}
