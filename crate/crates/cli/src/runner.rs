//! Experiment runners. Each returns the complete CSV text; rows are
//! computed in parallel and emitted in grid order.

use std::f64::consts::PI;
use std::path::Path;

use isac_fbl_core::channel::{build_jacobian, Parameter, RadioConfig, UserState};
use isac_fbl_core::codebook::{sample_active_codewords, CodebookSpec};
use isac_fbl_core::crb::crb_trace;
use isac_fbl_core::gram::gram_matrix;
use isac_fbl_core::ls::{db_to_linear, monte_carlo_nmse, SystemConfig};
use isac_fbl_core::rng::derive_seed;
use isac_fbl_core::tradeoff::{tradeoff_sweep, TradeoffPoint};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Experiment, RunConfig};
use crate::error::{Result, RunError};

pub const TRADEOFF_COLUMNS: [&str; 10] = [
    "snr_db",
    "e_th",
    "e_min",
    "rho_achi",
    "rho_conv",
    "rate_achi",
    "rate_conv",
    "shannon_rate",
    "silent_achi",
    "silent_conv",
];
pub const MONTECARLO_COLUMNS: [&str; 8] = ["n", "k", "m", "snr_db", "trials", "nmse_analytic", "nmse_empirical", "rel_err"];
pub const CRB_COLUMNS: [&str; 5] = ["parameter", "variation_name", "variation_value", "snr_db", "crb_value"];

/// Twelve significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    match cfg.experiment()? {
        Experiment::TradeoffSnr | Experiment::TradeoffSurface => run_tradeoff(cfg),
        Experiment::MontecarloVerify => run_montecarlo(cfg),
        Experiment::CrbSweep => run_crb_sweep(cfg),
    }
}

/// Writes `csv` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, csv: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, csv).map_err(|source| RunError::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn system_at(cfg: &RunConfig, n: usize, k: usize, m: usize, snr_db: f64) -> SystemConfig {
    SystemConfig::with_snr_db(n, k, m, snr_db, cfg.system.sigma_n2, cfg.system.sigma_h2)
}

fn tradeoff_fields(p: &TradeoffPoint) -> Vec<String> {
    vec![
        fmt_f64(p.snr_db),
        fmt_f64(p.e_th),
        fmt_f64(p.e_min),
        fmt_f64(p.rho_achi),
        fmt_f64(p.rho_conv),
        fmt_f64(p.rate_achi),
        fmt_f64(p.rate_conv),
        fmt_f64(p.shannon_rate),
        p.silent_achi.to_string(),
        p.silent_conv.to_string(),
    ]
}

/// Rate bounds over the `(snr, e_th)` grid, or with `tradeoff_surface` the same
/// sweep repeated for every blocklength in `grids.n` with `n` prepended.
pub fn run_tradeoff(cfg: &RunConfig) -> Result<String> {
    let experiment = cfg.experiment()?;
    let s = &cfg.system;
    let mut out = CsvOut::new(cfg, &[]);
    match experiment {
        Experiment::TradeoffSnr => {
            out.header(&TRADEOFF_COLUMNS);
            let base = system_at(cfg, s.n, s.k, s.m, 0.0);
            let pts = tradeoff_sweep(&base, &cfg.grids.e_th, &cfg.grids.snr_db)
                .map_err(|e| RunError::from_core(format!("tradeoff sweep at n = {}", s.n), e))?;
            for p in &pts {
                out.row(tradeoff_fields(p));
            }
        }
        Experiment::TradeoffSurface => {
            let mut cols = vec!["n"];
            cols.extend(TRADEOFF_COLUMNS);
            out.header(&cols);
            for &n in &cfg.grids.n {
                let base = system_at(cfg, n, s.k, s.m, 0.0);
                let pts = tradeoff_sweep(&base, &cfg.grids.e_th, &cfg.grids.snr_db)
                    .map_err(|e| RunError::from_core(format!("tradeoff sweep at n = {n}"), e))?;
                for p in &pts {
                    let mut fields = vec![n.to_string()];
                    fields.extend(tradeoff_fields(p));
                    out.row(fields);
                }
            }
        }
        other => return Err(RunError::validation("experiment", format!("`{other}` is not a tradeoff experiment"))),
    }
    Ok(out.finish())
}

/// Analytic vs. empirical NMSE for every `(n, k, m, snr)` tuple.
///
/// Tuple `i` samples its codebook with seed `derive_seed(seed, 2i)` and runs
/// the trials with `derive_seed(seed, 2i + 1)`.
pub fn run_montecarlo(cfg: &RunConfig) -> Result<String> {
    let mut out = CsvOut::new(cfg, &[]);
    out.header(&MONTECARLO_COLUMNS);
    for (idx, (n, k, m, snr_db)) in cfg.montecarlo_tuples().into_iter().enumerate() {
        let sys = system_at(cfg, n, k, m, snr_db);
        let context = format!("montecarlo tuple (n = {n}, k = {k}, m = {m}, snr_db = {snr_db})");
        let spec = CodebookSpec::new(n, cfg.codebook_bits, k, sys.p_bar, derive_seed(cfg.seed, 2 * idx as u64));
        let x = sample_active_codewords(&spec).map_err(|e| RunError::from_core(&context, e))?;
        let r = monte_carlo_nmse(&sys, &x, cfg.trials, derive_seed(cfg.seed, 2 * idx as u64 + 1))
            .map_err(|e| RunError::from_core(&context, e))?;
        let empirical = r.nmse_empirical.expect("Monte Carlo run reports an empirical value");
        let rel = r.relative_error().expect("Monte Carlo run reports a relative error");
        log::info!("{context}: analytic {:.4e}, empirical {empirical:.4e}", r.nmse_analytic);
        out.row(vec![
            n.to_string(),
            k.to_string(),
            m.to_string(),
            fmt_f64(snr_db),
            cfg.trials.to_string(),
            fmt_f64(r.nmse_analytic),
            fmt_f64(empirical),
            fmt_f64(rel),
        ]);
    }
    Ok(out.finish())
}

/// Deterministic user placement for CRB sweeps: AoA evenly spaced strictly
/// inside (-60 deg, 60 deg), range evenly spaced over [20, 200] m and
/// velocity over [-30, 30] m/s.
pub fn default_user_states(k: usize) -> Vec<UserState> {
    let frac = |i: usize| if k == 1 { 0.5 } else { i as f64 / (k - 1) as f64 };
    (0..k)
        .map(|i| {
            let theta = (-60.0 + 120.0 * (i + 1) as f64 / (k + 1) as f64) * PI / 180.0;
            UserState::new(theta, 20.0 + 180.0 * frac(i), -30.0 + 60.0 * frac(i))
        })
        .collect()
}

pub const PLACEMENT_NOTE: &str =
    "users: theta_i = -60 + 120 (i+1)/(k+1) deg, r_i = 20 + 180 i/(k-1) m, v_i = -30 + 60 i/(k-1) m/s, beta_i = 1";

/// One row group of the CRB sweep.
#[derive(Debug, Clone, Copy)]
struct CrbCase {
    parameter: Parameter,
    variation_name: &'static str,
    variation_value: f64,
    radio: RadioConfig,
}

/// CRB of one parameter type at a time (AoA over `variations.m`, range over
/// `variations.fc`, velocity over `variations.n`) across `grids.snr_db`.
///
/// `crb_value` is `tr(F^-1)` summed over the `k` users for that parameter.
/// The codebook is drawn once per blocklength at unit power with seed
/// `derive_seed(seed, n)`; each SNR scales its Gram matrix by `p_bar`.
pub fn run_crb_sweep(cfg: &RunConfig) -> Result<String> {
    let s = &cfg.system;
    let r = &cfg.radio;
    let base = RadioConfig { fc: r.fc, c: r.c, ts: r.ts, n: s.n, m: s.m, d_a: r.d_a };
    let v = &cfg.variations;

    let mut cases = Vec::new();
    for &m in &v.m {
        cases.push(CrbCase { parameter: Parameter::Aoa, variation_name: "m", variation_value: m as f64, radio: RadioConfig { m, ..base } });
    }
    for &fc in &v.fc {
        cases.push(CrbCase { parameter: Parameter::Range, variation_name: "fc", variation_value: fc, radio: RadioConfig { fc, ..base } });
    }
    for &n in &v.n {
        cases.push(CrbCase { parameter: Parameter::Velocity, variation_name: "n", variation_value: n as f64, radio: RadioConfig { n, ..base } });
    }

    let states = default_user_states(s.k);
    let rows: Vec<Vec<Vec<String>>> = cases
        .par_iter()
        .map(|case| crb_case_rows(cfg, &states, case))
        .collect::<Result<_>>()?;

    let mut out = CsvOut::new(cfg, &[PLACEMENT_NOTE]);
    out.header(&CRB_COLUMNS);
    for row in rows.into_iter().flatten() {
        out.row(row);
    }
    Ok(out.finish())
}

fn crb_case_rows(cfg: &RunConfig, states: &[UserState], case: &CrbCase) -> Result<Vec<Vec<String>>> {
    let s = &cfg.system;
    let n = case.radio.n;
    let context = |snr: Option<f64>| {
        let mut c = format!("crb {} with {} = {}", case.parameter.name(), case.variation_name, case.variation_value);
        if let Some(snr) = snr {
            c.push_str(&format!(" at snr_db = {snr}"));
        }
        c
    };
    if s.k > n {
        return Err(RunError::validation("system.k", format!("k = {} exceeds blocklength n = {n}", s.k)));
    }
    let spec = CodebookSpec::new(n, cfg.codebook_bits, s.k, 1.0, derive_seed(cfg.seed, n as u64));
    let x_unit = sample_active_codewords(&spec).map_err(|e| RunError::from_core(context(None), e))?;
    let gram_unit = gram_matrix(&x_unit);
    let j = build_jacobian(states, &case.radio)
        .and_then(|j| j.select_columns(&[case.parameter.column()]))
        .map_err(|e| RunError::from_core(context(None), e))?;

    cfg.grids
        .snr_db
        .iter()
        .map(|&snr| {
            let p_bar = db_to_linear(snr) * s.sigma_n2;
            let g = &gram_unit * Complex64::new(p_bar, 0.0);
            let crb = crb_trace(&j, &g, s.sigma_n2).map_err(|e| RunError::from_core(context(Some(snr)), e))?;
            Ok(vec![
                case.parameter.name().to_string(),
                case.variation_name.to_string(),
                fmt_f64(case.variation_value),
                fmt_f64(snr),
                fmt_f64(crb.crb_trace),
            ])
        })
        .collect()
}

/// CSV text with `#` metadata lines ahead of the header.
struct CsvOut {
    meta: String,
    writer: csv::Writer<Vec<u8>>,
}

impl CsvOut {
    fn new(cfg: &RunConfig, notes: &[&str]) -> Self {
        // the output location is not part of the result
        let echo = RunConfig { output_path: None, ..cfg.clone() };
        let mut meta = format!("# isac-fbl {}\n", env!("CARGO_PKG_VERSION"));
        for note in notes {
            meta.push_str(&format!("# {note}\n"));
        }
        meta.push_str("# config:\n");
        for line in echo.to_canonical_toml().lines() {
            if line.is_empty() {
                meta.push_str("#\n");
            } else {
                meta.push_str(&format!("#   {line}\n"));
            }
        }
        Self { meta, writer: csv::Writer::from_writer(Vec::new()) }
    }

    fn header(&mut self, cols: &[&str]) {
        self.writer.write_record(cols).expect("in-memory write");
    }

    fn row(&mut self, fields: Vec<String>) {
        self.writer.write_record(&fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        let body = self.writer.into_inner().expect("in-memory flush");
        let mut text = self.meta;
        text.push_str(std::str::from_utf8(&body).expect("fields are UTF-8"));
        text
    }
}
