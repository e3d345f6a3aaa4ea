use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{NoiseParams, OdometryDelta};
use crate::error::{Error, Result};
use crate::gridmap::Pose2D;
use crate::matching::{KernelKind, Method};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    WeightedMean,
    BestParticle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationConfig {
    pub particles: usize,
    pub seed: u64,
    pub noise: NoiseParams,
    pub kernel: KernelKind,
    pub method: Method,
    pub prior: Pose2D,
    pub init_half_width: f64,
    pub estimator: EstimatorKind,
    /// Threads used to score particles; 1 scores inline.
    pub workers: usize,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        Self {
            particles: 1000,
            seed: 0,
            noise: NoiseParams::default(),
            kernel: KernelKind::Corrected,
            method: Method::Wncc,
            prior: Pose2D::new(0.0, 0.0, 0.0),
            init_half_width: 1.0,
            estimator: EstimatorKind::WeightedMean,
            workers: 1,
        }
    }
}

/// Flat JSON form of [`LocalizationConfig`]. Angles in radians, lengths in
/// meters. Missing motion sigmas fall back to the resampling sigmas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub particles: usize,
    pub seed: u64,
    pub sigma_pos: f64,
    pub sigma_rot: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion_sigma_pos: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion_sigma_rot: Option<f64>,
    pub kernel: KernelKind,
    pub method: Method,
    pub prior_x: f64,
    pub prior_y: f64,
    pub prior_heading: f64,
    pub init_half_width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorKind>,
}

impl From<&LocalizationConfig> for ConfigFile {
    fn from(c: &LocalizationConfig) -> Self {
        Self {
            particles: c.particles,
            seed: c.seed,
            sigma_pos: c.noise.sigma_pos,
            sigma_rot: c.noise.sigma_rot,
            motion_sigma_pos: Some(c.noise.motion_sigma_pos),
            motion_sigma_rot: Some(c.noise.motion_sigma_rot),
            kernel: c.kernel,
            method: c.method,
            prior_x: c.prior.x,
            prior_y: c.prior.y,
            prior_heading: c.prior.heading,
            init_half_width: c.init_half_width,
            estimator: Some(c.estimator),
        }
    }
}

impl From<ConfigFile> for LocalizationConfig {
    fn from(f: ConfigFile) -> Self {
        Self {
            particles: f.particles,
            seed: f.seed,
            noise: NoiseParams {
                sigma_pos: f.sigma_pos,
                sigma_rot: f.sigma_rot,
                motion_sigma_pos: f.motion_sigma_pos.unwrap_or(f.sigma_pos),
                motion_sigma_rot: f.motion_sigma_rot.unwrap_or(f.sigma_rot),
            },
            kernel: f.kernel,
            method: f.method,
            prior: Pose2D::new(f.prior_x, f.prior_y, f.prior_heading),
            init_half_width: f.init_half_width,
            estimator: f.estimator.unwrap_or_default(),
            workers: 1,
        }
    }
}

impl LocalizationConfig {
    pub fn from_json_str(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str::<ConfigFile>(text).map(Into::into)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| Error::MalformedJson {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ConfigFile::from(self)).expect("config serializes")
    }
}

/// One manifest line: `frame,local_map_path,dx,dy,dtheta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub frame: usize,
    pub local_map_path: PathBuf,
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl ManifestEntry {
    pub fn odometry(&self) -> OdometryDelta {
        OdometryDelta::new(self.dx, self.dy, self.dtheta)
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let to_err = |e: csv::Error| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut r = csv::Reader::from_path(path).map_err(to_err)?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(to_err)
}

pub fn write_manifest(entries: &[ManifestEntry], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let to_err = |e: csv::Error| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for e in entries {
        w.serialize(e).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_and_defaults() {
        let text = r#"{
            "particles": 500, "seed": 7, "sigma_pos": 0.1, "sigma_rot": 0.0349,
            "kernel": "corrected", "method": "WNCC",
            "prior_x": 1.0, "prior_y": 2.0, "prior_heading": 0.5, "init_half_width": 0.8
        }"#;
        let c = LocalizationConfig::from_json_str(text).unwrap();
        assert_eq!(c.particles, 500);
        assert_eq!(c.noise.motion_sigma_pos, 0.1);
        assert_eq!(c.noise.motion_sigma_rot, 0.0349);
        assert_eq!(c.method, Method::Wncc);
        assert_eq!(c.estimator, EstimatorKind::WeightedMean);
        let back = LocalizationConfig::from_json_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = r#"{"particles": 1, "seed": 0, "sigma_pos": 0, "sigma_rot": 0,
            "kernel": "uniform", "method": "NCC", "prior_x": 0, "prior_y": 0,
            "prior_heading": 0, "init_half_width": 0, "bogus": 1}"#;
        assert!(LocalizationConfig::from_json_str(text).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("frames.csv");
        let entries = vec![
            ManifestEntry { frame: 0, local_map_path: "f0.pgm".into(), dx: 0.0, dy: 0.0, dtheta: 0.0 },
            ManifestEntry { frame: 1, local_map_path: "f1.pgm".into(), dx: 0.5, dy: -0.01, dtheta: 0.02 },
        ];
        write_manifest(&entries, &p).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().starts_with("frame,local_map_path,dx,dy,dtheta\n"));
        assert_eq!(read_manifest(&p).unwrap(), entries);
    }
}
