//! Run configuration.
//!
//! A run is described by one TOML file. Every section is optional and
//! falls back to the defaults below; unknown keys are rejected.
//!
//! ```toml
//! experiment = "tradeoff_snr"   # or tradeoff_surface, montecarlo_verify, crb_sweep
//! seed = 0
//! trials = 1000
//! codebook_bits = 16.0
//! output_path = "out.csv"
//!
//! [system]
//! n = 1000
//! k = 16
//! m = 10
//! sigma_n2 = 1.0
//! sigma_h2 = 1.0
//!
//! [grids]
//! e_th = [1e-3, 5e-3]
//! snr_db = [0.0, 10.0]
//! n = [200, 800]        # surface and montecarlo
//! k = [8]               # montecarlo, defaults to [system.k]
//! m = [4]               # montecarlo, defaults to [system.m]
//!
//! [radio]
//! fc = 28e9
//! c = 3e8
//! ts = 4e-6
//! # d_a = 0.005         # half a wavelength when omitted
//!
//! [variations]
//! m = [8, 64, 128]
//! fc = [3e9, 28e9, 60e9]
//! n = [200, 800, 3200]
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    TradeoffSnr,
    TradeoffSurface,
    MontecarloVerify,
    CrbSweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::TradeoffSnr => "tradeoff_snr",
            Experiment::TradeoffSurface => "tradeoff_surface",
            Experiment::MontecarloVerify => "montecarlo_verify",
            Experiment::CrbSweep => "crb_sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub sigma_n2: f64,
    pub sigma_h2: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { n: 1000, k: 16, m: 10, sigma_n2: 1.0, sigma_h2: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub e_th: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub m: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub fc: f64,
    pub c: f64,
    pub ts: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_a: Option<f64>,
}

impl Default for RadioSection {
    fn default() -> Self {
        Self { fc: 28e9, c: 3e8, ts: 4e-6, d_a: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationSection {
    pub m: Vec<usize>,
    pub fc: Vec<f64>,
    pub n: Vec<usize>,
}

impl Default for VariationSection {
    fn default() -> Self {
        Self { m: vec![8, 64, 128], fc: vec![3e9, 28e9, 60e9], n: vec![200, 800, 3200] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    pub seed: u64,
    pub trials: usize,
    /// Information bits per user for sampled codebooks.
    pub codebook_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    pub system: SystemSection,
    pub grids: GridSection,
    pub radio: RadioSection,
    pub variations: VariationSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 0,
            trials: 1000,
            codebook_bits: 16.0,
            output_path: None,
            system: SystemSection::default(),
            grids: GridSection::default(),
            radio: RadioSection::default(),
            variations: VariationSection::default(),
        }
    }
}

impl FromStr for RunConfig {
    type Err = RunError;

    /// Parses and validates; the experiment must be named in the file.
    fn from_str(text: &str) -> Result<Self> {
        Self::parse_for(text, None)
    }
}

impl RunConfig {
    /// Parses `text`, filling `experiment` from `hint` when the file omits it.
    /// A file naming a different experiment than `hint` is rejected.
    pub fn parse_for(text: &str, hint: Option<Experiment>) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| RunError::Parse(e.to_string()))?;
        match (cfg.experiment, hint) {
            (Some(found), Some(wanted)) if found != wanted => {
                return Err(RunError::validation(
                    "experiment",
                    format!("file declares `{found}` but `{wanted}` was requested"),
                ));
            }
            (None, Some(wanted)) => cfg.experiment = Some(wanted),
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment.ok_or_else(|| RunError::validation("experiment", "missing"))
    }

    /// Canonical TOML form: every field explicit, fixed key order.
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let experiment = self.experiment()?;
        let s = &self.system;
        positive_count("system.n", s.n)?;
        positive_count("system.k", s.k)?;
        positive_count("system.m", s.m)?;
        positive_real("system.sigma_n2", s.sigma_n2)?;
        positive_real("system.sigma_h2", s.sigma_h2)?;
        positive_count("trials", self.trials)?;
        positive_real("codebook_bits", self.codebook_bits)?;

        let g = &self.grids;
        for (i, &e) in g.e_th.iter().enumerate() {
            positive_real(&format!("grids.e_th[{i}]"), e)?;
        }
        for (i, &v) in g.snr_db.iter().enumerate() {
            if !v.is_finite() {
                return Err(RunError::validation(format!("grids.snr_db[{i}]"), "must be finite"));
            }
        }
        for (name, list) in [("grids.n", &g.n), ("grids.k", &g.k), ("grids.m", &g.m)] {
            for (i, &v) in list.iter().enumerate() {
                positive_count(&format!("{name}[{i}]"), v)?;
            }
        }

        let r = &self.radio;
        positive_real("radio.fc", r.fc)?;
        positive_real("radio.c", r.c)?;
        positive_real("radio.ts", r.ts)?;
        if let Some(d) = r.d_a {
            positive_real("radio.d_a", d)?;
        }
        let v = &self.variations;
        for (i, &x) in v.m.iter().enumerate() {
            positive_count(&format!("variations.m[{i}]"), x)?;
        }
        for (i, &x) in v.fc.iter().enumerate() {
            positive_real(&format!("variations.fc[{i}]"), x)?;
        }
        for (i, &x) in v.n.iter().enumerate() {
            positive_count(&format!("variations.n[{i}]"), x)?;
        }

        non_empty("grids.snr_db", g.snr_db.len())?;
        match experiment {
            Experiment::TradeoffSnr | Experiment::TradeoffSurface => {
                if s.k < 2 {
                    return Err(RunError::validation("system.k", "rate bounds need at least 2 users"));
                }
                non_empty("grids.e_th", g.e_th.len())?;
                if experiment == Experiment::TradeoffSurface {
                    non_empty("grids.n", g.n.len())?;
                }
            }
            Experiment::MontecarloVerify => {
                for (n, k, _, _) in self.montecarlo_tuples() {
                    if k > n {
                        return Err(RunError::validation("grids.k", format!("k = {k} exceeds blocklength n = {n}")));
                    }
                }
            }
            Experiment::CrbSweep => {
                non_empty("variations.m", v.m.len())?;
                non_empty("variations.fc", v.fc.len())?;
                non_empty("variations.n", v.n.len())?;
            }
        }
        Ok(())
    }

    /// `(n, k, m, snr_db)` tuples of a Monte Carlo run, in output order.
    pub fn montecarlo_tuples(&self) -> Vec<(usize, usize, usize, f64)> {
        let or_default = |list: &Vec<usize>, d: usize| if list.is_empty() { vec![d] } else { list.clone() };
        let ns = or_default(&self.grids.n, self.system.n);
        let ks = or_default(&self.grids.k, self.system.k);
        let ms = or_default(&self.grids.m, self.system.m);
        let mut out = Vec::new();
        for &n in &ns {
            for &k in &ks {
                for &m in &ms {
                    for &snr in &self.grids.snr_db {
                        out.push((n, k, m, snr));
                    }
                }
            }
        }
        out
    }
}

fn positive_count(field: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(RunError::validation(field, "must be >= 1"));
    }
    Ok(())
}

fn positive_real(field: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(RunError::validation(field, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn non_empty(field: &str, len: usize) -> Result<()> {
    if len == 0 {
        return Err(RunError::validation(field, "must not be empty for this experiment"));
    }
    Ok(())
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    load_config_for(path, None)
}

pub fn load_config_for(path: &Path, hint: Option<Experiment>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    RunConfig::parse_for(&text, hint)
}
