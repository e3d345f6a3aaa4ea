mod common;

use ortholoc::gridmap::{OrthoMap, Pose2D};
use ortholoc::eval::experiments::EXPERIMENT_SEEDS;
use ortholoc::localization::{NoiseParams, OdometryDelta};
use ortholoc::matching::{make_kernel, score_sad, score_wncc, KernelKind};
use ortholoc::rng::Rng;
use ortholoc::synthdata::{dead_reckon, extract_local, gen_trajectory, DegradationParams, SceneSpec};

/// Bright, low-contrast patch: pixel values in 170..=200.
fn bright_flat_map(seed: u64) -> OrthoMap {
    let mut rng = Rng::new(seed);
    let pixels = (0..96 * 96).map(|_| 170 + rng.below(31) as u8).collect();
    OrthoMap::gray(96, 96, pixels).unwrap()
}

#[test]
fn gain_bias_keeps_wncc_but_misleads_sad() {
    let global = bright_flat_map(4);
    let pose = Pose2D::new(4.75, 4.75, 0.0);
    let d = DegradationParams {
        gain: 1.3,
        bias: -20.0,
        ..DegradationParams::identity()
    };
    let clean = extract_local(&global, &pose, 32, 32, &DegradationParams::identity(), 0).unwrap();
    let degraded = extract_local(&global, &pose, 32, 32, &d, 0).unwrap();

    let uniform = make_kernel(KernelKind::Uniform, 32, 32).unwrap();
    assert!(score_wncc(&clean, &degraded, &uniform).unwrap() >= 0.999);
    let corrected = make_kernel(KernelKind::Corrected, 32, 32).unwrap();
    let self_score = score_wncc(&clean, &clean, &corrected).unwrap();
    let shifted = score_wncc(&clean, &degraded, &corrected).unwrap();
    assert!((shifted - self_score).abs() <= 1e-3 * self_score, "{shifted} vs {self_score}");

    // unrelated texture with the degraded template's mean
    let mean = degraded.pixels().iter().map(|&p| p as f64).sum::<f64>() / 1024.0;
    let mut rng = Rng::new(99);
    let raw: Vec<f64> = (0..1024).map(|_| rng.below(40) as f64).collect();
    let raw_mean = raw.iter().sum::<f64>() / 1024.0;
    let unrelated: Vec<u8> = raw.iter().map(|r| (r - raw_mean + mean).round() as u8).collect();
    let unrelated = OrthoMap::gray(32, 32, unrelated).unwrap();

    let sad_true = score_sad(&clean, &degraded).unwrap();
    let sad_unrelated = score_sad(&unrelated, &degraded).unwrap();
    assert!(sad_true > sad_unrelated, "true {sad_true} unrelated {sad_unrelated}");
}

#[test]
fn heavy_hollows_leave_minority_valid() {
    let global = bright_flat_map(1);
    let d = DegradationParams {
        hollow_count: 40,
        hollow_radius_px: 8.0,
        edge_hollow_bias: 0.0,
        ..DegradationParams::identity()
    };
    let local = extract_local(&global, &Pose2D::new(4.75, 4.75, 0.3), 32, 32, &d, 8).unwrap();
    let valid = local.mask().unwrap().iter().filter(|&&b| b).count();
    assert!((valid as f64) / 1024.0 < 0.5, "{valid} valid pixels");
    assert_eq!(local.valid_fraction(), valid as f64 / 1024.0);
}

#[test]
fn dead_reckoning_drifts() {
    let noise = NoiseParams {
        motion_sigma_pos: 0.05,
        ..NoiseParams::default()
    };
    let mut drifted = 0;
    let mut growth = 0;
    for &seed in &EXPERIMENT_SEEDS {
        let (truth, odo) = gen_trajectory(&SceneSpec::with_seed(seed), 50, 0.5, 48.0, &noise, seed).unwrap();
        let est = dead_reckon(truth.entries()[0].pose, &odo);
        let err = |k: usize| est[k].distance(&truth.entries()[k].pose);
        if err(49) > 0.2 {
            drifted += 1;
        }
        if err(49) > err(10) {
            growth += 1;
        }
    }
    assert!(drifted >= 16, "drift > 0.2 m on {drifted}/20 seeds");
    assert!(growth >= 16, "error grew on {growth}/20 seeds");
}

#[test]
fn exact_odometry_integrates_to_truth() {
    let (truth, odo) =
        gen_trajectory(&SceneSpec::with_seed(2), 30, 0.5, 48.0, &NoiseParams::zero(), 2).unwrap();
    let est = dead_reckon(truth.entries()[0].pose, &odo);
    for (e, t) in est.iter().zip(truth.poses()) {
        assert!(e.distance(t) < 1e-9);
    }
    assert!(odo.iter().all(|d: &OdometryDelta| d.dx > 0.0));
}

#[test]
fn degraded_pair_keeps_planted_optimum() {
    use ortholoc::matching::{match_template, Method};
    let mut rng = Rng::new(12);
    let map = common::random_map(48, 40, &mut rng);
    let (u, v) = (17, 9);
    let clean = map.crop_window(u, v, 12, 12).unwrap();
    // exact integer gain/bias, no clamping: pixels stay in 0..=255
    let low: Vec<u8> = map.pixels().iter().map(|&p| p / 3).collect();
    let map = OrthoMap::gray(48, 40, low).unwrap();
    let clean = OrthoMap::gray(12, 12, clean.pixels().iter().map(|&p| p / 3).collect()).unwrap();
    let degraded = OrthoMap::gray(12, 12, clean.pixels().iter().map(|&p| 2 * p + 5).collect()).unwrap();
    let uniform = make_kernel(KernelKind::Uniform, 12, 12).unwrap();
    let corrected = make_kernel(KernelKind::Corrected, 12, 12).unwrap();
    for (method, kernel) in [(Method::Ncc, None), (Method::Wncc, Some(&uniform)), (Method::Wncc, Some(&corrected))] {
        let a = match_template(&map, &clean, method, kernel).unwrap();
        let b = match_template(&map, &degraded, method, kernel).unwrap();
        assert_eq!((a.best_u, a.best_v), (b.best_u, b.best_v), "{method}");
        if kernel != Some(&corrected) {
            assert_eq!((b.best_u, b.best_v), (u, v), "{method}");
        }
    }
}
