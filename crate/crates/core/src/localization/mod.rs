//! Monte Carlo localization of the ground robot inside the global map.
//!
//! Each frame runs motion update, observation update (local map scored
//! against the global map at every particle), estimate, then roulette
//! resampling. Randomness is drawn only in the sequential motion and
//! resampling steps, so parallel scoring cannot change the outcome.

mod config;
mod swarm;
mod trajectory;

pub use config::{
    read_manifest, write_manifest, ConfigFile, EstimatorKind, LocalizationConfig, ManifestEntry,
};
pub use swarm::{
    heading_error, pose_score, rotate_local, window_origin, NoiseParams, OdometryDelta, Particle,
    ParticleSwarm, MIN_CONFIDENCE,
};
pub use trajectory::{Trajectory, TrajectoryEntry};

use crate::error::{Error, Result};
use crate::gridmap::OrthoMap;
use crate::matching::{make_kernel, Method};

/// One observation: the local map built at this frame and the odometry since the last one.
#[derive(Clone, Debug)]
pub struct Frame {
    pub index: usize,
    pub local: OrthoMap,
    pub odometry: OdometryDelta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationRun {
    pub trajectory: Trajectory,
    /// Posterior positional spread (weighted RMS distance from the mean) per frame.
    pub spreads: Vec<f64>,
}

pub fn run_localization(
    global: &OrthoMap,
    frames: &[Frame],
    config: &LocalizationConfig,
) -> Result<LocalizationRun> {
    if frames.is_empty() {
        return Err(Error::InvalidArgument("no frames to localize".into()));
    }
    let global = global.to_grayscale();
    let kernel = match config.method {
        Method::Wncc => {
            let (m, n) = (frames[0].local.width(), frames[0].local.height());
            Some(make_kernel(config.kernel, m, n)?)
        }
        _ => None,
    };
    let pool = if config.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let mut swarm = ParticleSwarm::init(
        config.prior,
        config.init_half_width,
        config.particles,
        &config.noise,
        config.seed,
    )?;
    let mut trajectory = Trajectory::new();
    let mut spreads = Vec::with_capacity(frames.len());
    for frame in frames {
        let local = frame.local.to_grayscale();
        if kernel.as_ref().is_some_and(|k| k.m() != local.width() || k.n() != local.height()) {
            return Err(Error::DimensionMismatch(format!(
                "frame {} local map is {}x{}, expected a constant size",
                frame.index,
                local.width(),
                local.height()
            )));
        }
        swarm.motion_update(&frame.odometry, &config.noise);
        swarm
            .observation_update_in(&global, &local, kernel.as_ref(), config.method, pool.as_ref())
            .map_err(|e| match e {
                Error::SwarmLost { .. } => Error::SwarmLost {
                    frame: Some(frame.index),
                },
                other => other,
            })?;
        let pose = match config.estimator {
            EstimatorKind::WeightedMean => swarm.estimate(),
            EstimatorKind::BestParticle => swarm.best_particle(),
        };
        trajectory.push(frame.index, pose)?;
        spreads.push(swarm.position_spread());
        swarm.resample(config.particles, &config.noise)?;
    }
    Ok(LocalizationRun {
        trajectory,
        spreads,
    })
}
