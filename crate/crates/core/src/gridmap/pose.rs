use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Planar pose in world meters; heading in radians, always in `[-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    /// Applies a motion expressed in this pose's frame (`dx` forward, `dy` left).
    pub fn compose(&self, dx: f64, dy: f64, dtheta: f64) -> Pose2D {
        let (s, c) = self.heading.sin_cos();
        Pose2D::new(
            self.x + c * dx - s * dy,
            self.y + s * dx + c * dy,
            self.heading + dtheta,
        )
    }

    /// The motion `(dx, dy, dtheta)` in this pose's frame that reaches `next`.
    pub fn delta_to(&self, next: &Pose2D) -> (f64, f64, f64) {
        let (s, c) = self.heading.sin_cos();
        let ex = next.x - self.x;
        let ey = next.y - self.y;
        (
            c * ex + s * ey,
            -s * ex + c * ey,
            normalize_angle(next.heading - self.heading),
        )
    }

    pub fn distance(&self, other: &Pose2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}
