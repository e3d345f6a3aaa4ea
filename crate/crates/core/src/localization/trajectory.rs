use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridmap::Pose2D;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub frame: usize,
    pub pose: Pose2D,
}

/// Poses keyed by strictly increasing frame index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    entries: Vec<TrajectoryEntry>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    frame: usize,
    x: f64,
    y: f64,
    heading: f64,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_poses(poses: impl IntoIterator<Item = Pose2D>) -> Self {
        Self {
            entries: poses
                .into_iter()
                .enumerate()
                .map(|(frame, pose)| TrajectoryEntry { frame, pose })
                .collect(),
        }
    }

    pub fn push(&mut self, frame: usize, pose: Pose2D) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if frame <= last.frame {
                return Err(Error::FrameMismatch(format!(
                    "frame {frame} does not follow frame {}",
                    last.frame
                )));
            }
        }
        self.entries.push(TrajectoryEntry { frame, pose });
        Ok(())
    }

    pub fn entries(&self) -> &[TrajectoryEntry] {
        &self.entries
    }

    pub fn poses(&self) -> impl Iterator<Item = &Pose2D> + '_ {
        self.entries.iter().map(|e| &e.pose)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV `frame,x,y,heading`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let to_err = |e: csv::Error| Error::MalformedCsv {
            path: path.to_path_buf(),
            reason: e.to_string(),
        };
        let mut w = csv::Writer::from_path(path).map_err(to_err)?;
        for e in &self.entries {
            w.serialize(Row {
                frame: e.frame,
                x: e.pose.x,
                y: e.pose.y,
                heading: e.pose.heading,
            })
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let to_err = |e: csv::Error| Error::MalformedCsv {
            path: path.to_path_buf(),
            reason: e.to_string(),
        };
        let mut r = csv::Reader::from_path(path).map_err(to_err)?;
        let mut t = Trajectory::new();
        for row in r.deserialize::<Row>() {
            let row = row.map_err(to_err)?;
            t.push(row.frame, Pose2D::new(row.x, row.y, row.heading))?;
        }
        Ok(t)
    }
}
