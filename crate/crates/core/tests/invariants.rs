use isac_fbl_core::channel::{build_channel, build_jacobian, finite_difference_jacobian, FdSteps, Parameter, RadioConfig, UserState};
use isac_fbl_core::codebook::{bits_from_rho, empirical_correlation, rho_max_approx, sample_active_codewords, CodebookSpec};
use isac_fbl_core::gram::{summarize_geometry, typical_geometry_factor, worst_case_geometry_factor};
use isac_fbl_core::ls::SystemConfig;
use isac_fbl_core::tradeoff::{achievability_point, converse_point, shannon_per_user, tradeoff_sweep};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn bits_rho_bijection(b in 0.01f64..500.0, n in 1usize..100_000) {
        let rho = rho_max_approx(b, n);
        let back = bits_from_rho(rho, n);
        prop_assert!((back - b).abs() <= 1e-10 * b);
        prop_assert!(rho_max_approx(b * 1.01, n) > rho);
        prop_assert!(rho_max_approx(b, n + 1) < rho);
    }

    #[test]
    fn delta_is_hermitian_with_zero_diagonal(seed in any::<u64>(), k in 2usize..7, n in 1usize..40) {
        let x = sample_active_codewords(&CodebookSpec::new(n, 12.0, k, 1.5, seed)).unwrap();
        let rep = empirical_correlation(&x, 1.5).unwrap();
        for i in 0..k {
            prop_assert_eq!(rep.delta[(i, i)], Complex64::new(0.0, 0.0));
            for j in 0..k {
                prop_assert_eq!(rep.delta[(i, j)], rep.delta[(j, i)].conj());
            }
        }
    }

    #[test]
    fn gershgorin_below_min_eigenvalue(seed in any::<u64>(), k in 2usize..6, extra in 0usize..40) {
        let n = k + 1 + extra;
        let x = sample_active_codewords(&CodebookSpec::new(n, 12.0, k, 1.0, seed)).unwrap();
        if let Ok(s) = summarize_geometry(&x, 1.0) {
            prop_assert!(s.gershgorin_lower <= s.min_eigenvalue() * (1.0 + 1e-12));
            let sum_inv: f64 = s.eigenvalues.iter().map(|l| 1.0 / l).sum();
            prop_assert!((s.trace_inverse - sum_inv).abs() <= 1e-9 * sum_inv);
        }
    }

    #[test]
    fn typical_penalty_below_worst_case(k in 2usize..64, rho in 0.0001f64..0.9999) {
        if let Ok(w) = worst_case_geometry_factor(k, rho) {
            prop_assert!(typical_geometry_factor(k, rho) <= w);
        }
    }

    #[test]
    fn bound_ordering(snr_db in -20.0f64..40.0, log_ratio in 0.0f64..6.0, k in 2usize..40, m in 1usize..40) {
        let cfg = SystemConfig::with_snr_db(1000, k, m, snr_db, 1.0, 1.0);
        let e_th = cfg.e_min() * 10f64.powf(log_ratio) * (1.0 + 1e-9);
        let a = achievability_point(e_th, &cfg).unwrap();
        let c = converse_point(e_th, &cfg).unwrap();
        prop_assert!(c.rate <= shannon_per_user(&cfg));
        prop_assert!(c.rho > a.rho);
        // the ordering holds for sensing-limited rates; the Shannon cap on the
        // converse alone can invert it at low SNR
        prop_assert!(bits_from_rho(c.rho, cfg.n) >= bits_from_rho(a.rho, cfg.n));
        if c.rate < shannon_per_user(&cfg) {
            prop_assert!(c.rate >= a.rate);
        }
        prop_assert_eq!(a.silent, a.rate == 0.0);
        prop_assert_eq!(c.silent, c.rate == 0.0);
    }

    #[test]
    fn jacobian_is_phase_only(theta in -1.5f64..1.5, r in 1.0f64..500.0, v in -50.0f64..50.0, m in 1usize..32) {
        let radio = RadioConfig { m, ..Default::default() };
        let s = UserState::new(theta, r, v);
        let h = build_channel(&[s], &radio).unwrap();
        let j = build_jacobian(&[s], &radio).unwrap();
        for a in 0..m {
            for p in 0..3 {
                let ratio = j.blocks[0][(a, p)] / h[(a, 0)];
                prop_assert!(ratio.re.abs() < 1e-12 * ratio.im.abs().max(1.0));
            }
        }
    }
}

#[test]
fn silent_below_floor() {
    for snr_db in [-10.0, 0.0, 10.0, 30.0] {
        let cfg = SystemConfig::with_snr_db(800, 16, 10, snr_db, 1.0, 1.0);
        for f in [0.1, 0.5, 1.0] {
            let e_th = cfg.e_min() * f;
            assert_eq!(achievability_point(e_th, &cfg).unwrap().rate, 0.0);
            assert_eq!(converse_point(e_th, &cfg).unwrap().rate, 0.0);
        }
    }
}

#[test]
fn rates_monotone_in_threshold_and_snr() {
    let cfg = SystemConfig::with_snr_db(1000, 16, 10, 0.0, 1.0, 1.0);
    let e_grid: Vec<f64> = (0..60).map(|i| 10f64.powf(-7.0 + i as f64 * 0.1)).collect();
    let snr_grid: Vec<f64> = (0..41).map(|i| -10.0 + i as f64).collect();
    let pts = tradeoff_sweep(&cfg, &e_grid, &snr_grid).unwrap();
    let at = |s: usize, e: usize| &pts[s * e_grid.len() + e];
    for s in 0..snr_grid.len() {
        for e in 1..e_grid.len() {
            assert!(at(s, e).rate_achi >= at(s, e - 1).rate_achi);
            assert!(at(s, e).rate_conv >= at(s, e - 1).rate_conv);
        }
    }
    for e in 0..e_grid.len() {
        for s in 1..snr_grid.len() {
            assert!(at(s, e).rate_achi >= at(s - 1, e).rate_achi);
            assert!(at(s, e).rate_conv >= at(s - 1, e).rate_conv);
        }
    }
}

#[test]
fn second_order_finite_differences() {
    let radio = RadioConfig::default();
    let states = [UserState::new(0.5, 75.0, 12.0)];
    let analytic = build_jacobian(&states, &radio).unwrap();
    let base = FdSteps { theta: 1e-3, range: 1e-5, velocity: 1e-3 };
    let errors: Vec<[f64; 3]> = [1.0, 0.5, 0.25]
        .iter()
        .map(|&f| {
            let fd = finite_difference_jacobian(&states, &radio, base.scaled(f)).unwrap();
            std::array::from_fn(|p| {
                (fd.blocks[0].column(p) - analytic.blocks[0].column(p)).norm() / analytic.blocks[0].column(p).norm()
            })
        })
        .collect();
    for p in 0..3 {
        for w in errors.windows(2) {
            let ratio = w[0][p] / w[1][p];
            assert!((3.5..4.5).contains(&ratio), "param {p}: ratio {ratio} ({errors:?})");
        }
    }
}

#[test]
fn sensitivity_column_norm_scaling() {
    let s = [UserState::new(0.7, 60.0, 3.0)];
    let norms = |m: usize, n: usize| {
        let j = build_jacobian(&s, &RadioConfig { m, n, ..Default::default() }).unwrap();
        Parameter::ALL.map(|p| j.column_norm(0, p.column()))
    };
    let (small, big) = (norms(8, 1000), norms(32, 1000));
    let root = (32.0f64 / 8.0).sqrt();
    assert!(big[0] / small[0] > root * 1.5);
    assert!((big[1] / small[1] - root).abs() < 1e-12);
    let (short, long) = (norms(10, 200), norms(10, 3200));
    assert!((long[2] / short[2] - 16.0).abs() < 1e-9);
}
