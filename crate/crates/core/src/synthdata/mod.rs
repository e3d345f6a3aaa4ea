//! Deterministic synthetic scenes standing in for aerial/ground data pairs.
//!
//! The global map is clean procedural texture with roads, lane markings and
//! round manhole-style covers. Local maps are rotated crops of it, degraded
//! by a gain/bias style shift, pixel noise, and disk-shaped hollows that tend
//! to sit on the border the way stereo dropouts do.

mod scene;

pub use scene::{gen_global, SceneSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridmap::{OrthoMap, Pose2D, DEFAULT_RESOLUTION};
use crate::localization::{NoiseParams, OdometryDelta, Trajectory};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradationParams {
    pub gain: f64,
    pub bias: f64,
    pub noise_sigma: f64,
    pub hollow_count: usize,
    pub hollow_radius_px: f64,
    /// Probability that a hollow is centered in the border band.
    pub edge_hollow_bias: f64,
}

impl DegradationParams {
    /// No change at all: exact crop, all-valid mask.
    pub fn identity() -> Self {
        Self {
            gain: 1.0,
            bias: 0.0,
            noise_sigma: 0.0,
            hollow_count: 0,
            hollow_radius_px: 0.0,
            edge_hollow_bias: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.gain, self.bias, self.noise_sigma, self.hollow_radius_px, self.edge_hollow_bias]
            .iter()
            .all(|v| v.is_finite());
        if !finite
            || self.gain <= 0.0
            || self.noise_sigma < 0.0
            || self.hollow_radius_px < 0.0
            || !(0.0..=1.0).contains(&self.edge_hollow_bias)
        {
            return Err(Error::InvalidArgument(format!("bad degradation parameters {self:?}")));
        }
        Ok(())
    }
}

impl Default for DegradationParams {
    /// Ground-map look used by the experiments: much flatter than the aerial
    /// map, slightly grainy, with hollows eating into the rim.
    fn default() -> Self {
        Self {
            gain: 0.4,
            bias: 60.0,
            noise_sigma: 3.0,
            hollow_count: 12,
            hollow_radius_px: 5.0,
            edge_hollow_bias: 0.9,
        }
    }
}

/// Continuous pixel position of the local pixel `(i, j)` for a robot at `pose`.
fn local_to_global(global: &OrthoMap, pose: &Pose2D, m: usize, n: usize) -> impl Fn(usize, usize) -> (f64, f64) {
    let (px, py) = global.world_to_pixel(pose.x, pose.y);
    let (cx, cy) = ((m as f64 - 1.0) / 2.0, (n as f64 - 1.0) / 2.0);
    let (s, c) = pose.heading.sin_cos();
    move |i, j| {
        let (ox, oy) = (i as f64 - cx, j as f64 - cy);
        ((px + c * ox - s * oy).round(), (py + s * ox + c * oy).round())
    }
}

/// The `m`x`n` local map a robot at `pose` would build: the global window
/// rotated into the robot frame, then degraded.
pub fn extract_local(
    global: &OrthoMap,
    pose: &Pose2D,
    m: usize,
    n: usize,
    degrade: &DegradationParams,
    seed: u64,
) -> Result<OrthoMap> {
    degrade.validate()?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("local map must be at least 1x1".into()));
    }
    let global = global.to_grayscale();
    let sample = local_to_global(&global, pose, m, n);
    let mut pixels = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            let (gu, gv) = sample(i, j);
            if gu < 0.0 || gv < 0.0 || gu as usize >= global.width() || gv as usize >= global.height() {
                let (pu, pv) = global.world_to_pixel(pose.x, pose.y);
                return Err(Error::WindowOutOfBounds {
                    u: (pu - m as f64 / 2.0).round() as i64,
                    v: (pv - n as f64 / 2.0).round() as i64,
                    w: m,
                    h: n,
                    map_w: global.width(),
                    map_h: global.height(),
                });
            }
            pixels.push(global.get(gu as usize, gv as usize));
        }
    }

    let mut rng = Rng::new(seed);
    if degrade.gain != 1.0 || degrade.bias != 0.0 || degrade.noise_sigma > 0.0 {
        for p in &mut pixels {
            let v = degrade.gain * *p as f64 + degrade.bias + rng.gaussian(degrade.noise_sigma);
            *p = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    let mut local = OrthoMap::gray(m, n, pixels)?
        .with_resolution(global.resolution())?
        .with_mask(vec![true; m * n])?;
    for _ in 0..degrade.hollow_count {
        let (hx, hy) = hollow_center(&mut rng, m, n, degrade);
        stamp_disk(&mut local, hx, hy, degrade.hollow_radius_px);
    }
    Ok(local)
}

fn hollow_center(rng: &mut Rng, m: usize, n: usize, d: &DegradationParams) -> (f64, f64) {
    let (w, h) = (m as f64, n as f64);
    if rng.uniform() < d.edge_hollow_bias {
        let depth = rng.uniform() * d.hollow_radius_px;
        match rng.below(4) {
            0 => (rng.uniform() * w, depth),
            1 => (rng.uniform() * w, h - 1.0 - depth),
            2 => (depth, rng.uniform() * h),
            _ => (w - 1.0 - depth, rng.uniform() * h),
        }
    } else {
        (rng.uniform() * w, rng.uniform() * h)
    }
}

fn stamp_disk(map: &mut OrthoMap, cx: f64, cy: f64, radius: f64) {
    let (w, h) = (map.width(), map.height());
    let r2 = radius * radius;
    let v0 = (cy - radius).floor().max(0.0) as usize;
    let v1 = ((cy + radius).ceil().max(0.0) as usize).min(h - 1);
    let u0 = (cx - radius).floor().max(0.0) as usize;
    let u1 = ((cx + radius).ceil().max(0.0) as usize).min(w - 1);
    for v in v0..=v1 {
        for u in u0..=u1 {
            if (u as f64 - cx).powi(2) + (v as f64 - cy).powi(2) <= r2 {
                map.pixels_mut()[v * w + u] = 0;
                map.mask_mut()[v * w + u] = false;
            }
        }
    }
}

/// A smooth forward path centered on the map, with odometry.
///
/// The path starts half its length behind the map center on a random heading
/// and drifts with a bounded, slowly varying turn rate. Every pose must keep
/// `margin_px` pixels clear of the map edge. Odometry entry `k` moves frame
/// `k` to frame `k + 1` and carries zero-mean noise at the `motion_sigma_*`
/// levels of `odom_noise`.
pub fn gen_trajectory(
    spec: &SceneSpec,
    n_frames: usize,
    step: f64,
    margin_px: f64,
    odom_noise: &NoiseParams,
    seed: u64,
) -> Result<(Trajectory, Vec<OdometryDelta>)> {
    if n_frames == 0 {
        return Err(Error::InvalidArgument("need at least one frame".into()));
    }
    odom_noise.validate()?;
    let res = DEFAULT_RESOLUTION;
    let mut rng = Rng::new(seed);
    let heading = rng.uniform_range(-std::f64::consts::PI, std::f64::consts::PI);
    let half = step * (n_frames as f64 - 1.0) / 2.0;
    let (mx, my) = (spec.width as f64 * res / 2.0, spec.height as f64 * res / 2.0);
    let mut pose = Pose2D::new(mx - half * heading.cos(), my - half * heading.sin(), heading);

    let max_turn = 2f64.to_radians();
    let mut turn = 0.0f64;
    let mut poses = Vec::with_capacity(n_frames);
    for frame in 0..n_frames {
        if frame > 0 {
            turn = (turn + rng.gaussian(0.5f64.to_radians())).clamp(-max_turn, max_turn);
            pose = pose.compose(step, 0.0, turn);
        }
        let (u, v) = (pose.x / res, pose.y / res);
        let fits = u >= margin_px
            && v >= margin_px
            && u <= spec.width as f64 - 1.0 - margin_px
            && v <= spec.height as f64 - 1.0 - margin_px;
        if !fits {
            return Err(Error::TrajectoryExitsMap { frame });
        }
        poses.push(pose);
    }

    let odometry = poses
        .windows(2)
        .map(|w| {
            let (dx, dy, dt) = w[0].delta_to(&w[1]);
            OdometryDelta::new(
                dx + rng.gaussian(odom_noise.motion_sigma_pos),
                dy + rng.gaussian(odom_noise.motion_sigma_pos),
                dt + rng.gaussian(odom_noise.motion_sigma_rot),
            )
        })
        .collect();
    Ok((Trajectory::from_poses(poses), odometry))
}

/// Integrates odometry from `start`.
pub fn dead_reckon(start: Pose2D, odometry: &[OdometryDelta]) -> Vec<Pose2D> {
    let mut out = Vec::with_capacity(odometry.len() + 1);
    out.push(start);
    let mut pose = start;
    for d in odometry {
        pose = pose.compose(d.dx, d.dy, d.dtheta);
        out.push(pose);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene() -> (SceneSpec, OrthoMap) {
        let spec = SceneSpec {
            width: 160,
            height: 128,
            ..SceneSpec::default()
        };
        let g = gen_global(&spec).unwrap();
        (spec, g)
    }

    #[test]
    fn identity_degradation_is_exact_crop() {
        let (_, g) = scene();
        let pose = Pose2D::new(7.3, 5.1, 0.0);
        let local = extract_local(&g, &pose, 32, 24, &DegradationParams::identity(), 1).unwrap();
        let (px, py) = g.world_to_pixel(pose.x, pose.y);
        let u = (px - 15.5).round() as usize;
        let v = (py - 11.5).round() as usize;
        let crop = g.crop_window(u, v, 32, 24).unwrap();
        assert_eq!(local.pixels(), crop.pixels());
        assert_eq!(local.valid_fraction(), 1.0);
    }

    #[test]
    fn out_of_bounds_pose() {
        let (_, g) = scene();
        let pose = Pose2D::new(0.5, 0.5, 0.0);
        assert!(matches!(
            extract_local(&g, &pose, 32, 32, &DegradationParams::identity(), 1),
            Err(Error::WindowOutOfBounds { .. })
        ));
        // fits unrotated but a 45 degree turn pushes the corners out
        let edge = Pose2D::new(1.7, 6.0, 0.0);
        assert!(extract_local(&g, &edge, 32, 32, &DegradationParams::identity(), 1).is_ok());
        let turned = Pose2D::new(1.7, 6.0, std::f64::consts::FRAC_PI_4);
        assert!(extract_local(&g, &turned, 32, 32, &DegradationParams::identity(), 1).is_err());
    }

    #[test]
    fn heavy_hollows_cover_majority() {
        let (_, g) = scene();
        let d = DegradationParams {
            hollow_count: 40,
            hollow_radius_px: 10.0,
            edge_hollow_bias: 0.0,
            ..DegradationParams::identity()
        };
        let local = extract_local(&g, &Pose2D::new(8.0, 6.4, 0.3), 48, 48, &d, 5).unwrap();
        assert!(local.valid_fraction() < 0.5, "{}", local.valid_fraction());
    }

    #[test]
    fn hollows_are_exactly_the_invalid_zero_disks() {
        let (_, g) = scene();
        let d = DegradationParams {
            hollow_count: 6,
            hollow_radius_px: 5.0,
            edge_hollow_bias: 0.5,
            ..DegradationParams::identity()
        };
        let pose = Pose2D::new(8.0, 6.4, 0.0);
        let local = extract_local(&g, &pose, 40, 40, &d, 9).unwrap();
        let clean = extract_local(&g, &pose, 40, 40, &DegradationParams::identity(), 9).unwrap();
        // re-derive the stamped disks from the same stream
        let mut rng = Rng::new(9);
        let mut stamped = vec![false; 1600];
        for _ in 0..6 {
            let (cx, cy) = hollow_center(&mut rng, 40, 40, &d);
            for v in 0..40 {
                for u in 0..40 {
                    if (u as f64 - cx).powi(2) + (v as f64 - cy).powi(2) <= 25.0 {
                        stamped[v * 40 + u] = true;
                    }
                }
            }
        }
        for (i, &hit) in stamped.iter().enumerate() {
            assert_eq!(!local.mask().unwrap()[i], hit);
            if hit {
                assert_eq!(local.pixels()[i], 0);
            } else {
                assert_eq!(local.pixels()[i], clean.pixels()[i]);
            }
        }
    }

    #[test]
    fn edge_bias_concentrates_hollows_on_rim() {
        let (_, g) = scene();
        let pose = Pose2D::new(8.0, 6.4, 0.0);
        let rim_fraction = |bias: f64| {
            let d = DegradationParams {
                hollow_count: 10,
                hollow_radius_px: 4.0,
                edge_hollow_bias: bias,
                ..DegradationParams::identity()
            };
            let (mut rim, mut all) = (0, 0);
            for seed in 0..20 {
                let l = extract_local(&g, &pose, 48, 48, &d, seed).unwrap();
                for v in 0..48 {
                    for u in 0..48 {
                        if !l.is_valid(u, v) {
                            all += 1;
                            if u < 8 || v < 8 || u >= 40 || v >= 40 {
                                rim += 1;
                            }
                        }
                    }
                }
            }
            rim as f64 / all as f64
        };
        assert!(rim_fraction(1.0) > 0.95);
        assert!(rim_fraction(1.0) > rim_fraction(0.0) + 0.2);
    }

    #[test]
    fn degradation_is_deterministic() {
        let (_, g) = scene();
        let pose = Pose2D::new(8.0, 6.4, 1.0);
        let d = DegradationParams::default();
        let a = extract_local(&g, &pose, 32, 32, &d, 3).unwrap();
        let b = extract_local(&g, &pose, 32, 32, &d, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, extract_local(&g, &pose, 32, 32, &d, 4).unwrap());
    }

    #[test]
    fn bad_degradation_rejected() {
        let (_, g) = scene();
        let pose = Pose2D::new(8.0, 6.4, 0.0);
        let d = DegradationParams {
            gain: 0.0,
            ..DegradationParams::identity()
        };
        assert!(extract_local(&g, &pose, 8, 8, &d, 0).is_err());
    }

    #[test]
    fn noise_free_odometry_reproduces_truth() {
        let spec = SceneSpec::default();
        let (truth, odom) = gen_trajectory(&spec, 30, 0.5, 46.0, &NoiseParams::zero(), 4).unwrap();
        assert_eq!(odom.len(), 29);
        let start = truth.entries()[0].pose;
        for (dr, t) in dead_reckon(start, &odom).iter().zip(truth.poses()) {
            assert!(dr.distance(t) < 1e-9);
            assert!((dr.heading - t.heading).abs() < 1e-9);
        }
        // consecutive poses are one step apart
        for w in truth.entries().windows(2) {
            assert!((w[0].pose.distance(&w[1].pose) - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn single_frame_trajectory() {
        let (truth, odom) =
            gen_trajectory(&SceneSpec::default(), 1, 0.5, 46.0, &NoiseParams::default(), 0).unwrap();
        assert_eq!(truth.len(), 1);
        assert!(odom.is_empty());
    }

    #[test]
    fn path_exiting_map_reports_frame() {
        let spec = SceneSpec {
            width: 128,
            height: 128,
            ..SceneSpec::default()
        };
        let err = gen_trajectory(&spec, 200, 0.5, 10.0, &NoiseParams::zero(), 1).unwrap_err();
        assert!(matches!(err, Error::TrajectoryExitsMap { frame: 0 }));
        assert!(gen_trajectory(&spec, 0, 0.5, 10.0, &NoiseParams::zero(), 1).is_err());
    }

    #[test]
    fn trajectory_is_deterministic() {
        let spec = SceneSpec::default();
        let a = gen_trajectory(&spec, 20, 0.5, 46.0, &NoiseParams::default(), 12).unwrap();
        let b = gen_trajectory(&spec, 20, 0.5, 46.0, &NoiseParams::default(), 12).unwrap();
        assert_eq!(a, b);
    }
}
