//! Code rate vs. sensing error bounds.
//!
//! For an NMSE threshold `e_th` the largest tolerable codeword correlation is
//!
//! ```text
//! achievability (worst case):  rho = (1 - e_min / e_th) / (k - 1)
//! converse (typical case):     rho = sqrt((e_th / e_min - 1) / (k - 1))
//! ```
//!
//! and the rate per user is `bits_from_rho(rho, n) / n`. The converse rate
//! is further capped by the per-user ergodic Shannon ceiling.

use rayon::prelude::*;

use crate::codebook::bits_from_rho;
use crate::ls::SystemConfig;
use crate::{Error, Result};

/// One bound evaluated at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    /// Permissible correlation, clamped to `[0, 1]`.
    pub rho: f64,
    /// Bits per channel use per user.
    pub rate: f64,
    pub silent: bool,
}

impl BoundPoint {
    const SILENT: BoundPoint = BoundPoint { rho: 0.0, rate: 0.0, silent: true };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub n: usize,
    pub snr_db: f64,
    pub e_th: f64,
    pub e_min: f64,
    pub rho_achi: f64,
    pub rho_conv: f64,
    pub rate_achi: f64,
    pub rate_conv: f64,
    pub shannon_rate: f64,
    pub silent_achi: bool,
    pub silent_conv: bool,
}

fn check_users(cfg: &SystemConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.k < 2 {
        return Err(Error::InvalidSpec(format!("rate bounds need k >= 2 users, got {}", cfg.k)));
    }
    Ok(())
}

/// Rate guaranteed under the worst-case (Gershgorin) codeword geometry.
pub fn achievability_point(e_th: f64, cfg: &SystemConfig) -> Result<BoundPoint> {
    check_users(cfg)?;
    let rho = (1.0 - cfg.e_min() / e_th) / (cfg.k as f64 - 1.0);
    if !(rho > 0.0) {
        return Ok(BoundPoint::SILENT);
    }
    let rho = rho.min(1.0);
    Ok(BoundPoint { rho, rate: bits_from_rho(rho, cfg.n) / cfg.n as f64, silent: false })
}

/// Rate ceiling for random codebooks under typical geometry, capped by
/// [`shannon_per_user`].
///
/// A permissible correlation above 1 means the sensing constraint does not
/// bind; the reported `rho` is then 1 and the rate is the Shannon ceiling.
pub fn converse_point(e_th: f64, cfg: &SystemConfig) -> Result<BoundPoint> {
    check_users(cfg)?;
    let e_min = cfg.e_min();
    if !(e_th > e_min) {
        return Ok(BoundPoint::SILENT);
    }
    let shannon = shannon_per_user(cfg);
    let rho = ((e_th / e_min - 1.0) / (cfg.k as f64 - 1.0)).sqrt();
    if rho > 1.0 {
        return Ok(BoundPoint { rho: 1.0, rate: shannon, silent: false });
    }
    let sensing_rate = bits_from_rho(rho, cfg.n) / cfg.n as f64;
    Ok(BoundPoint { rho, rate: sensing_rate.min(shannon), silent: false })
}

/// Per-user Jensen upper bound on the ergodic uplink sum capacity:
/// `log2(1 + m sigma_h2 SNR)` when `m >= k`, else
/// `(m / k) log2(1 + k sigma_h2 SNR)`, with `SNR = p_bar / sigma_n2`.
pub fn shannon_per_user(cfg: &SystemConfig) -> f64 {
    let (m, k) = (cfg.m as f64, cfg.k as f64);
    let snr = cfg.snr();
    if cfg.m >= cfg.k {
        (1.0 + m * cfg.sigma_h2 * snr).log2()
    } else {
        m / k * (1.0 + k * cfg.sigma_h2 * snr).log2()
    }
}

/// `E_b / N_0 = n p_bar / (b sigma_n2)`.
pub fn energy_per_bit(cfg: &SystemConfig, b: f64) -> f64 {
    cfg.n as f64 * cfg.p_bar / (b * cfg.sigma_n2)
}

/// Both bounds at one `(snr_db, e_th)` coordinate.
pub fn tradeoff_point(cfg: &SystemConfig, snr_db: f64, e_th: f64) -> Result<TradeoffPoint> {
    let at = cfg.at_snr_db(snr_db);
    let achi = achievability_point(e_th, &at)?;
    let conv = converse_point(e_th, &at)?;
    if achi.rate > conv.rate {
        // possible only when the Shannon ceiling caps the converse
        log::warn!(
            "rate_achi {:.4e} exceeds capped rate_conv {:.4e} at snr_db = {snr_db}, e_th = {e_th:e}",
            achi.rate,
            conv.rate
        );
    }
    Ok(TradeoffPoint {
        n: at.n,
        snr_db,
        e_th,
        e_min: at.e_min(),
        rho_achi: achi.rho,
        rho_conv: conv.rho,
        rate_achi: achi.rate,
        rate_conv: conv.rate,
        shannon_rate: shannon_per_user(&at),
        silent_achi: achi.silent,
        silent_conv: conv.silent,
    })
}

/// Evaluates every `(snr_db, e_th)` pair, ordered by SNR then threshold.
///
/// `cfg.p_bar` is overridden by each SNR value; grids are expected sorted
/// ascending.
pub fn tradeoff_sweep(cfg: &SystemConfig, e_th_grid: &[f64], snr_db_grid: &[f64]) -> Result<Vec<TradeoffPoint>> {
    check_users(cfg)?;
    let coords: Vec<(f64, f64)> = snr_db_grid
        .iter()
        .flat_map(|&snr| e_th_grid.iter().map(move |&e| (snr, e)))
        .collect();
    coords.par_iter().map(|&(snr, e)| tradeoff_point(cfg, snr, e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::bits_from_rho;

    fn reference_cfg(snr_db: f64) -> SystemConfig {
        SystemConfig::with_snr_db(1000, 16, 10, snr_db, 1.0, 1.0)
    }

    #[test]
    fn achievability_reference_point() {
        let cfg = reference_cfg(10.0);
        let p = achievability_point(2e-4, &cfg).unwrap();
        assert!((p.rho - 1.0 / 30.0).abs() < 1e-12);
        // 0.8014972449 bits over n = 1000
        assert!((p.rate - 8.014_972_449_383_13e-4).abs() < 1e-12);
        assert!(!p.silent);
    }

    #[test]
    fn achievability_silent_at_floor() {
        let cfg = reference_cfg(10.0);
        let p = achievability_point(cfg.e_min(), &cfg).unwrap();
        assert_eq!(p, BoundPoint { rho: 0.0, rate: 0.0, silent: true });
        assert!(achievability_point(cfg.e_min() / 2.0, &cfg).unwrap().silent);
    }

    #[test]
    fn achievability_high_snr_limit() {
        let cfg = reference_cfg(80.0);
        let p = achievability_point(1e-3, &cfg).unwrap();
        assert!((p.rho - 1.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn converse_reference_point() {
        let cfg = reference_cfg(10.0);
        let p = converse_point(2e-4, &cfg).unwrap();
        assert!((p.rho - (1.0f64 / 15.0).sqrt()).abs() < 1e-12);
        assert!((p.rate - 0.048_089_834_696_298_78).abs() < 1e-12);
        assert!((shannon_per_user(&cfg) - 4.582).abs() < 1e-3);
    }

    #[test]
    fn converse_silent_and_shannon_limited() {
        let cfg = reference_cfg(10.0);
        assert!(converse_point(cfg.e_min(), &cfg).unwrap().silent);
        assert_eq!(converse_point(0.5 * cfg.e_min(), &cfg).unwrap().rate, 0.0);
        let p = converse_point(1.0, &cfg).unwrap();
        assert_eq!(p.rho, 1.0);
        assert_eq!(p.rate, shannon_per_user(&cfg));
    }

    #[test]
    fn converse_capped_by_shannon_at_low_snr() {
        // at -30 dB the ceiling is below the clamped sensing rate 1/(2 ln 2)
        let cfg = reference_cfg(-30.0);
        let e_th = cfg.e_min() * 15.9;
        let p = converse_point(e_th, &cfg).unwrap();
        let sensing = bits_from_rho(p.rho, cfg.n) / cfg.n as f64;
        assert!(sensing > shannon_per_user(&cfg));
        assert_eq!(p.rate, shannon_per_user(&cfg));
    }

    #[test]
    fn achievability_can_exceed_capped_converse() {
        // k = 2, m = 1, -17 dB: rho_achi near 1 while the ceiling is ~0.028
        let cfg = SystemConfig::with_snr_db(1000, 2, 1, -17.0, 1.0, 1.0);
        let e_th = cfg.e_min() * 1e5;
        let a = achievability_point(e_th, &cfg).unwrap();
        let c = converse_point(e_th, &cfg).unwrap();
        assert!(c.rho > a.rho);
        assert_eq!(c.rate, shannon_per_user(&cfg));
        assert!(a.rate > c.rate);
    }

    #[test]
    fn shannon_branches() {
        let a = SystemConfig { n: 1, k: 16, m: 10, p_bar: 10.0, sigma_n2: 1.0, sigma_h2: 1.0 };
        assert!((shannon_per_user(&a) - 10.0 / 16.0 * 161f64.log2()).abs() < 1e-12);
        let b = SystemConfig { n: 1, k: 4, m: 16, p_bar: 1.0, sigma_n2: 1.0, sigma_h2: 1.0 };
        assert!((shannon_per_user(&b) - 4.087).abs() < 1e-3);
        for snr in [0.1, 1.0, 7.0, 1000.0] {
            let eq = SystemConfig { n: 1, k: 6, m: 6, p_bar: snr, sigma_n2: 1.0, sigma_h2: 0.7 };
            let other_branch = (eq.m as f64 / eq.k as f64) * (1.0 + eq.k as f64 * eq.sigma_h2 * snr).log2();
            assert!((shannon_per_user(&eq) - other_branch).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_per_bit_values() {
        let cfg = SystemConfig { n: 1000, k: 16, m: 10, p_bar: 10.0, sigma_n2: 1.0, sigma_h2: 1.0 };
        assert!((energy_per_bit(&cfg, 100.0) - 100.0).abs() < 1e-12);
        assert!((energy_per_bit(&cfg, 200.0) - 50.0).abs() < 1e-12);
        let unit = SystemConfig { n: 1, k: 2, m: 1, p_bar: 1.0, sigma_n2: 1.0, sigma_h2: 1.0 };
        assert_eq!(energy_per_bit(&unit, 1.0), 1.0);
    }

    #[test]
    fn single_user_is_rejected() {
        let cfg = SystemConfig { k: 1, ..reference_cfg(10.0) };
        assert!(achievability_point(1e-3, &cfg).is_err());
        assert!(converse_point(1e-3, &cfg).is_err());
    }

    #[test]
    fn sweep_order_and_composition() {
        let cfg = reference_cfg(0.0);
        let pts = tradeoff_sweep(&cfg, &[1e-3, 1e-2], &[0.0, 10.0, 20.0]).unwrap();
        assert_eq!(pts.len(), 6);
        let coords: Vec<(f64, f64)> = pts.iter().map(|p| (p.snr_db, p.e_th)).collect();
        assert_eq!(coords, vec![(0.0, 1e-3), (0.0, 1e-2), (10.0, 1e-3), (10.0, 1e-2), (20.0, 1e-3), (20.0, 1e-2)]);

        let single = tradeoff_sweep(&cfg, &[5e-3], &[10.0]).unwrap();
        assert_eq!(single.len(), 1);
        let at = cfg.at_snr_db(10.0);
        let a = achievability_point(5e-3, &at).unwrap();
        let c = converse_point(5e-3, &at).unwrap();
        assert_eq!((single[0].rho_achi, single[0].rate_achi), (a.rho, a.rate));
        assert_eq!((single[0].rho_conv, single[0].rate_conv), (c.rho, c.rate));
    }
}
