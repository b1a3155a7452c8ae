use isac_fbl::config::{Experiment, GridSection, RadioSection, RunConfig, SystemSection, VariationSection};
use isac_fbl::{load_config, RunError};

const MINIMAL: &str = r#"
[grids]
e_th = [1e-3, 1e-2]
snr_db = [0.0, 10.0]
"#;

fn field_of(err: RunError) -> String {
    match err {
        RunError::Validation { field, .. } => field,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn golden_defaults() {
    let cfg = RunConfig::parse_for(MINIMAL, Some(Experiment::TradeoffSnr)).unwrap();
    assert_eq!(cfg.experiment, Some(Experiment::TradeoffSnr));
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.trials, 1000);
    assert_eq!(cfg.codebook_bits, 16.0);
    assert_eq!(cfg.output_path, None);
    assert_eq!(cfg.system, SystemSection { n: 1000, k: 16, m: 10, sigma_n2: 1.0, sigma_h2: 1.0 });
    assert_eq!(cfg.radio, RadioSection { fc: 28e9, c: 3e8, ts: 4e-6, d_a: None });
    assert_eq!(
        cfg.variations,
        VariationSection { m: vec![8, 64, 128], fc: vec![3e9, 28e9, 60e9], n: vec![200, 800, 3200] }
    );
    assert_eq!(cfg.grids, GridSection { e_th: vec![1e-3, 1e-2], snr_db: vec![0.0, 10.0], ..Default::default() });
}

#[test]
fn canonical_round_trip() {
    let cfg = RunConfig::parse_for(MINIMAL, Some(Experiment::TradeoffSnr)).unwrap();
    let canonical = cfg.to_canonical_toml();
    let reparsed: RunConfig = canonical.parse().unwrap();
    assert_eq!(reparsed, cfg);
    assert_eq!(reparsed.to_canonical_toml(), canonical);

    let with_options = RunConfig {
        output_path: Some("out/run.csv".into()),
        radio: RadioSection { d_a: Some(0.004), ..Default::default() },
        ..cfg
    };
    let text = with_options.to_canonical_toml();
    assert_eq!(text.parse::<RunConfig>().unwrap(), with_options);
}

#[test]
fn zero_users_names_the_field() {
    let text = format!("{MINIMAL}\n[system]\nk = 0\n");
    let err = RunConfig::parse_for(&text, Some(Experiment::TradeoffSnr)).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert_eq!(field_of(err), "system.k");
}

#[test]
fn single_user_tradeoff_rejected() {
    let text = format!("{MINIMAL}\n[system]\nk = 1\n");
    assert_eq!(field_of(RunConfig::parse_for(&text, Some(Experiment::TradeoffSnr)).unwrap_err()), "system.k");
}

#[test]
fn empty_threshold_grid_rejected() {
    let text = "[grids]\nsnr_db = [0.0]\n";
    assert_eq!(field_of(RunConfig::parse_for(text, Some(Experiment::TradeoffSnr)).unwrap_err()), "grids.e_th");
}

#[test]
fn surface_needs_blocklengths() {
    assert_eq!(field_of(RunConfig::parse_for(MINIMAL, Some(Experiment::TradeoffSurface)).unwrap_err()), "grids.n");
}

#[test]
fn zero_trials_rejected() {
    let text = "trials = 0\n[grids]\nsnr_db = [10.0]\n";
    assert_eq!(field_of(RunConfig::parse_for(text, Some(Experiment::MontecarloVerify)).unwrap_err()), "trials");
}

#[test]
fn montecarlo_more_users_than_uses_rejected() {
    let text = "[grids]\nsnr_db = [10.0]\nn = [4]\nk = [8]\n";
    assert_eq!(field_of(RunConfig::parse_for(text, Some(Experiment::MontecarloVerify)).unwrap_err()), "grids.k");
}

#[test]
fn bad_values_name_their_path() {
    let cases = [
        ("[grids]\ne_th = [1e-3, -1.0]\nsnr_db = [0.0]\n", "grids.e_th[1]"),
        ("[grids]\ne_th = [1e-3]\nsnr_db = [0.0]\n[radio]\nfc = 0.0\n", "radio.fc"),
        ("[grids]\ne_th = [1e-3]\nsnr_db = [0.0]\n[system]\nsigma_n2 = -1.0\n", "system.sigma_n2"),
        ("[grids]\ne_th = [1e-3]\nsnr_db = [0.0]\n[variations]\nm = [8, 0]\n", "variations.m[1]"),
    ];
    for (text, field) in cases {
        assert_eq!(field_of(RunConfig::parse_for(text, Some(Experiment::TradeoffSnr)).unwrap_err()), field);
    }
}

#[test]
fn unknown_keys_are_errors() {
    for text in [
        format!("{MINIMAL}\nsede = 3\n"),
        format!("{MINIMAL}\n[system]\nusers = 4\n"),
        format!("{MINIMAL}\n[extras]\nx = 1\n"),
    ] {
        assert!(matches!(RunConfig::parse_for(&text, Some(Experiment::TradeoffSnr)), Err(RunError::Parse(_))));
    }
}

#[test]
fn malformed_file_is_parse_error() {
    let err = RunConfig::parse_for("[grids\ne_th = ", Some(Experiment::TradeoffSnr)).unwrap_err();
    assert!(matches!(err, RunError::Parse(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn experiment_resolution() {
    let named = format!("experiment = \"crb_sweep\"\n{MINIMAL}");
    assert_eq!(named.parse::<RunConfig>().unwrap().experiment, Some(Experiment::CrbSweep));
    assert_eq!(field_of(MINIMAL.parse::<RunConfig>().unwrap_err()), "experiment");
    assert_eq!(field_of(RunConfig::parse_for(&named, Some(Experiment::TradeoffSnr)).unwrap_err()), "experiment");
}

#[test]
fn load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, format!("experiment = \"tradeoff_snr\"\n{MINIMAL}")).unwrap();
    assert_eq!(load_config(&path).unwrap().system.n, 1000);
    assert!(matches!(load_config(&dir.path().join("missing.toml")), Err(RunError::Io { .. })));
}

#[test]
fn montecarlo_tuple_order() {
    let text = "[grids]\nsnr_db = [0.0, 10.0]\nn = [64, 128]\nk = [4]\nm = [2, 3]\n";
    let cfg = RunConfig::parse_for(text, Some(Experiment::MontecarloVerify)).unwrap();
    let t = cfg.montecarlo_tuples();
    assert_eq!(t.len(), 8);
    assert_eq!(t[0], (64, 4, 2, 0.0));
    assert_eq!(t[1], (64, 4, 2, 10.0));
    assert_eq!(t[2], (64, 4, 3, 0.0));
    assert_eq!(t[7], (128, 4, 3, 10.0));
}
