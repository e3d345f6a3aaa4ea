//! Seeded synthetic experiments comparing the scorers, for matching in
//! isolation and inside the particle filter.

use serde::{Deserialize, Serialize};

use super::compute_rmse;
use crate::error::Result;
use crate::gridmap::{OrthoMap, Pose2D};
use crate::localization::{
    run_localization, Frame, LocalizationConfig, LocalizationRun, NoiseParams, OdometryDelta,
    Trajectory,
};
use crate::matching::{make_kernel, match_template, KernelKind, Method};
use crate::rng::Rng;
use crate::synthdata::{extract_local, gen_global, gen_trajectory, DegradationParams, SceneSpec};

/// Seeds used by every randomized experiment.
pub const EXPERIMENT_SEEDS: [u64; 20] = [
    11, 23, 37, 41, 59, 67, 73, 89, 97, 101, 113, 127, 131, 149, 157, 163, 179, 191, 199, 211,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingSetup {
    /// Scene parameters; the seed is replaced per trial.
    pub scene: SceneSpec,
    pub template_size: usize,
    pub degradation: DegradationParams,
    pub kernel: KernelKind,
}

impl Default for MatchingSetup {
    fn default() -> Self {
        Self {
            scene: SceneSpec::default(),
            template_size: 64,
            degradation: DegradationParams::default(),
            kernel: KernelKind::Corrected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub best_u: usize,
    pub best_v: usize,
    pub best_score: f64,
    /// Pixel distance from the true placement.
    pub error_px: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingTrial {
    pub seed: u64,
    pub truth_u: usize,
    pub truth_v: usize,
    pub outcomes: Vec<MethodOutcome>,
}

impl MatchingTrial {
    pub fn error(&self, method: Method) -> Option<f64> {
        self.outcomes.iter().find(|o| o.method == method).map(|o| o.error_px)
    }
}

/// Scene, clean truth placement and degraded template for one matching trial.
pub fn matching_scenario(seed: u64, setup: &MatchingSetup) -> Result<(OrthoMap, OrthoMap, usize, usize)> {
    let spec = SceneSpec { seed, ..setup.scene };
    let global = gen_global(&spec)?;
    let m = setup.template_size;
    if m > spec.width || m > spec.height {
        return Err(crate::Error::TemplateTooLarge { tw: m, th: m, mw: spec.width, mh: spec.height });
    }
    let mut rng = Rng::derive(seed, 1);
    let u = rng.below(spec.width - m + 1);
    let v = rng.below(spec.height - m + 1);
    let (cx, cy) = (u as f64 + (m as f64 - 1.0) / 2.0, v as f64 + (m as f64 - 1.0) / 2.0);
    let (x, y) = global.pixel_to_world(cx, cy);
    let local = extract_local(&global, &Pose2D::new(x, y, 0.0), m, m, &setup.degradation, seed)?;
    Ok((global, local, u, v))
}

/// Runs every scorer on one degraded scene.
pub fn matching_trial(seed: u64, setup: &MatchingSetup, methods: &[Method]) -> Result<MatchingTrial> {
    let (global, local, u, v) = matching_scenario(seed, setup)?;
    let kernel = make_kernel(setup.kernel, local.width(), local.height())?;
    let mut outcomes = Vec::with_capacity(methods.len());
    for &method in methods {
        let r = match_template(&global, &local, method, Some(&kernel))?;
        let error_px = (r.best_u as f64 - u as f64).hypot(r.best_v as f64 - v as f64);
        outcomes.push(MethodOutcome {
            method,
            best_u: r.best_u,
            best_v: r.best_v,
            best_score: r.best_score,
            error_px,
        });
    }
    Ok(MatchingTrial {
        seed,
        truth_u: u,
        truth_v: v,
        outcomes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSetup {
    /// Scene parameters; the seed is replaced per trial.
    pub scene: SceneSpec,
    pub frames: usize,
    pub step: f64,
    pub local_size: usize,
    pub degradation: DegradationParams,
    pub odometry_noise: NoiseParams,
    pub particles: usize,
    pub filter_noise: NoiseParams,
    pub init_half_width: f64,
}

impl Default for SequenceSetup {
    fn default() -> Self {
        Self {
            scene: SceneSpec::default(),
            frames: 50,
            step: 0.5,
            local_size: 64,
            degradation: DegradationParams::default(),
            odometry_noise: NoiseParams::default(),
            particles: 1000,
            filter_noise: NoiseParams::default(),
            init_half_width: 1.0,
        }
    }
}

impl SequenceSetup {
    /// Exact crops and exact odometry.
    pub fn noise_free() -> Self {
        Self {
            degradation: DegradationParams::identity(),
            odometry_noise: NoiseParams::zero(),
            ..Self::default()
        }
    }
}

/// A synthetic drive: global map, ground truth, and per-frame local maps with odometry.
#[derive(Clone, Debug)]
pub struct Sequence {
    pub global: OrthoMap,
    pub truth: Trajectory,
    pub frames: Vec<Frame>,
}

pub fn make_sequence(seed: u64, setup: &SequenceSetup) -> Result<Sequence> {
    let spec = SceneSpec { seed, ..setup.scene };
    let global = gen_global(&spec)?;
    let margin = (setup.local_size as f64) * std::f64::consts::FRAC_1_SQRT_2 + 2.0;
    let (truth, odometry) = gen_trajectory(
        &spec,
        setup.frames,
        setup.step,
        margin,
        &setup.odometry_noise,
        Rng::derive(seed, 2).next_u64(),
    )?;
    let mut frames = Vec::with_capacity(setup.frames);
    for (k, entry) in truth.entries().iter().enumerate() {
        let local = extract_local(
            &global,
            &entry.pose,
            setup.local_size,
            setup.local_size,
            &setup.degradation,
            Rng::derive(seed, 1000 + k as u64).next_u64(),
        )?;
        let odometry = if k == 0 { OdometryDelta::default() } else { odometry[k - 1] };
        frames.push(Frame {
            index: entry.frame,
            local,
            odometry,
        });
    }
    Ok(Sequence {
        global,
        truth,
        frames,
    })
}

pub fn localization_config(seed: u64, setup: &SequenceSetup, truth: &Trajectory, method: Method) -> LocalizationConfig {
    LocalizationConfig {
        particles: setup.particles,
        seed: Rng::derive(seed, 3).next_u64(),
        noise: setup.filter_noise,
        kernel: KernelKind::Corrected,
        method,
        prior: truth.entries()[0].pose,
        init_half_width: setup.init_half_width,
        ..LocalizationConfig::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationTrial {
    pub seed: u64,
    pub method: Method,
    pub rmse: f64,
    pub final_error: f64,
    pub spreads: Vec<f64>,
}

pub fn localization_trial(seed: u64, setup: &SequenceSetup, method: Method) -> Result<(LocalizationTrial, LocalizationRun)> {
    let seq = make_sequence(seed, setup)?;
    localization_trial_on(&seq, seed, setup, method)
}

pub fn localization_trial_on(
    seq: &Sequence,
    seed: u64,
    setup: &SequenceSetup,
    method: Method,
) -> Result<(LocalizationTrial, LocalizationRun)> {
    let config = localization_config(seed, setup, &seq.truth, method);
    let run = run_localization(&seq.global, &seq.frames, &config)?;
    let report = compute_rmse(&run.trajectory, &seq.truth, &method.to_string())?;
    let trial = LocalizationTrial {
        seed,
        method,
        rmse: report.rmse,
        final_error: *report.per_frame_errors.last().expect("non-empty"),
        spreads: run.spreads.clone(),
    };
    Ok((trial, run))
}
