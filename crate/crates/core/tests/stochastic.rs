use rand::Rng;
use tsrm_core::exec::{stream_rng, Execution};
use tsrm_core::marginals::{MarginalKind, Marginals};
use tsrm_core::stochastic::stats::test_sample;
use tsrm_core::stochastic::{
    calibrate_and_test, sample_ensemble, tsaw_ensemble, CdfTable, EnsembleConfig, McConfig, PathConfig, SamplingMode,
};

#[test]
fn ks_machinery_accepts_exact_samples() {
    // Inverse-CDF draws from the exponential-time position law must look
    // like a null sample.
    let m = Marginals::new(50).unwrap();
    let kind = MarginalKind::PositionExpTime;
    let table = CdfTable::new(&m, kind, 40.0, 4001).unwrap();
    let mut rng = stream_rng(7, 1, 0);
    let xs: Vec<f64> = (0..4000).map(|_| m.quantile(kind, rng.gen_range(1e-9..1.0 - 1e-9)).unwrap()).collect();
    let r = test_sample(&xs, kind, &m, &table, 1.0).unwrap();
    assert!(r.ks_p_value > 0.01, "{r:?}");
    assert!(r.ks_statistic < 1.63 / (xs.len() as f64).sqrt());
    // A shifted sample is rejected.
    let shifted: Vec<f64> = xs.iter().map(|x| x + 0.3).collect();
    assert!(test_sample(&shifted, kind, &m, &table, 1.0).unwrap().ks_p_value < 1e-6);
}

#[test]
fn calibration_recovers_known_scale() {
    let m = Marginals::new(50).unwrap();
    let kind = MarginalKind::HeightFixedTime;
    let table = CdfTable::new(&m, kind, 8.0, 1601).unwrap();
    let mut rng = stream_rng(9, 2, 0);
    let (alpha, n) = (0.7_f64, 1e4_f64);
    let raw: Vec<f64> = (0..5000)
        .map(|_| m.quantile(kind, rng.gen_range(1e-9..1.0 - 1e-9)).unwrap() * (alpha * n).powf(1.0 / 3.0))
        .collect();
    let (r, scaled) = calibrate_and_test(&raw, n, kind, &m, &table).unwrap();
    assert!((r.calibrated_scale / alpha - 1.0).abs() < 0.05, "{}", r.calibrated_scale);
    assert_eq!(scaled.len(), raw.len());
    assert!(calibrate_and_test(&raw[..10], n, kind, &m, &table).is_err());
    assert!(calibrate_and_test(&vec![0.0; 2000], n, kind, &m, &table).is_err());
}

#[test]
fn walk_ensemble_is_reproducible_and_centred() {
    let cfg = EnsembleConfig {
        n_walks: 4000,
        n_steps: 2000,
        ..EnsembleConfig::default()
    };
    let a = tsaw_ensemble(&cfg).unwrap();
    let b = tsaw_ensemble(&EnsembleConfig {
        execution: Execution::Sequential,
        ..cfg
    })
    .unwrap();
    assert_eq!(a, b);
    let xs: Vec<f64> = a.iter().map(|r| r.position as f64).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 3.0 * sd / n.sqrt(), "mean {mean}, sd {sd}");
    assert!(a.iter().all(|r| r.position.unsigned_abs() <= r.n_steps && (r.position - r.n_steps as i64) % 2 == 0));
}

#[test]
fn geometric_lengths_have_requested_mean() {
    let cfg = EnsembleConfig {
        n_walks: 10_000,
        n_steps: 1000,
        mode: SamplingMode::GeometricTime,
        ..EnsembleConfig::default()
    };
    let w = tsaw_ensemble(&cfg).unwrap();
    let mean = w.iter().map(|r| r.n_steps as f64).sum::<f64>() / w.len() as f64;
    assert!((mean / 1000.0 - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn brownian_ensemble_independent_of_worker_count() {
    let cfg = McConfig {
        n_paths: 200,
        path: PathConfig {
            dt: 1e-3,
            ..PathConfig::default()
        },
        ..McConfig::default()
    };
    let grid = [0.25, 0.5];
    let a = sample_ensemble(0.5, &grid, &cfg).unwrap();
    let b = sample_ensemble(
        0.5,
        &grid,
        &McConfig {
            execution: Execution::Sequential,
            ..cfg
        },
    )
    .unwrap();
    assert_eq!(a, b);
    for p in &a {
        assert!(p.t1[0] <= p.t1[1]);
        assert!(p.total(0) <= p.total(1) * (1.0 + 1e-14));
    }
}

#[test]
fn geometric_time_positions_follow_exponential_time_law() {
    let cfg = EnsembleConfig {
        n_walks: 10_000,
        n_steps: 100_000,
        mode: SamplingMode::GeometricTime,
        ..EnsembleConfig::default()
    };
    let w = tsaw_ensemble(&cfg).unwrap();
    let m = Marginals::new(50).unwrap();
    let kind = MarginalKind::PositionExpTime;
    let table = CdfTable::new(&m, kind, 40.0, 4001).unwrap();
    let raw: Vec<f64> = w.iter().map(|r| r.position as f64).collect();
    let (r, _) = calibrate_and_test(&raw, cfg.n_steps as f64, kind, &m, &table).unwrap();
    assert!(r.ks_statistic <= 0.05, "{r:?}");
}
