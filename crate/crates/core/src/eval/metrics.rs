use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::Trajectory;

/// Positional trajectory error. Heading is not scored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmseReport {
    pub method: String,
    pub rmse: f64,
    pub per_frame_errors: Vec<f64>,
}

/// Per-frame Euclidean position error and its RMS, pairing frames by index.
pub fn compute_rmse(estimate: &Trajectory, truth: &Trajectory, method: &str) -> Result<RmseReport> {
    if estimate.len() != truth.len() {
        return Err(Error::FrameMismatch(format!(
            "estimate has {} frames, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    if estimate.is_empty() {
        return Err(Error::FrameMismatch("empty trajectories".into()));
    }
    let mut errors = Vec::with_capacity(estimate.len());
    for (e, t) in estimate.entries().iter().zip(truth.entries()) {
        if e.frame != t.frame {
            return Err(Error::FrameMismatch(format!(
                "estimate frame {} paired with truth frame {}",
                e.frame, t.frame
            )));
        }
        errors.push(e.pose.distance(&t.pose));
    }
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
    Ok(RmseReport {
        method: method.to_string(),
        rmse: mse.sqrt(),
        per_frame_errors: errors,
    })
}
