use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridmap::{normalize_angle, OrthoMap, Pose2D};
use crate::matching::{Method, PreparedTemplate, WeightKernel};
use crate::rng::Rng;

/// Floor on observation confidence; keeps the swarm from collapsing to all-zero weights.
pub const MIN_CONFIDENCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub pose: Pose2D,
    pub weight: f64,
}

/// Odometry increment in the robot frame: `dx` forward, `dy` left.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OdometryDelta {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl OdometryDelta {
    pub fn new(dx: f64, dy: f64, dtheta: f64) -> Self {
        Self { dx, dy, dtheta }
    }
}

/// Noise levels. `sigma_*` jitter resampled particles, `motion_sigma_*`
/// perturb the odometry step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub sigma_pos: f64,
    pub sigma_rot: f64,
    pub motion_sigma_pos: f64,
    pub motion_sigma_rot: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        let sigma_rot = 2f64.to_radians();
        Self {
            sigma_pos: 0.1,
            sigma_rot,
            motion_sigma_pos: 0.1,
            motion_sigma_rot: sigma_rot,
        }
    }
}

impl NoiseParams {
    pub fn zero() -> Self {
        Self {
            sigma_pos: 0.0,
            sigma_rot: 0.0,
            motion_sigma_pos: 0.0,
            motion_sigma_rot: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.sigma_pos,
            self.sigma_rot,
            self.motion_sigma_pos,
            self.motion_sigma_rot,
        ];
        if all.iter().all(|s| s.is_finite() && *s >= 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("noise levels must be finite and >= 0: {self:?}")))
        }
    }
}

/// Weighted pose hypotheses plus the random stream that evolves them.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSwarm {
    particles: Vec<Particle>,
    rng: Rng,
}

/// Rotates `local` by `heading` about its center so its axes line up with the
/// global map. Nearest-neighbor; pixels whose source falls outside the local
/// frame are invalid and take the mean of the in-frame pixels, so they add
/// nothing to a correlation and leave the template mean where it was.
pub fn rotate_local(local: &OrthoMap, heading: f64) -> OrthoMap {
    if heading == 0.0 {
        return local.clone();
    }
    let (m, n) = (local.width(), local.height());
    let (cx, cy) = ((m as f64 - 1.0) / 2.0, (n as f64 - 1.0) / 2.0);
    let (s, c) = heading.sin_cos();
    let mut pixels = vec![0u8; m * n];
    let mut mask = vec![false; m * n];
    let mut inside = vec![false; m * n];
    let (mut sum, mut count) = (0u64, 0u64);
    for j in 0..n {
        let oy = j as f64 - cy;
        for i in 0..m {
            let ox = i as f64 - cx;
            // inverse rotation: aligned offset -> local offset
            let sx = (cx + c * ox + s * oy).round();
            let sy = (cy - s * ox + c * oy).round();
            if sx >= 0.0 && sy >= 0.0 && (sx as usize) < m && (sy as usize) < n {
                let (sx, sy) = (sx as usize, sy as usize);
                let p = local.get(sx, sy);
                pixels[j * m + i] = p;
                mask[j * m + i] = local.is_valid(sx, sy);
                inside[j * m + i] = true;
                sum += p as u64;
                count += 1;
            }
        }
    }
    if count > 0 && count < (m * n) as u64 {
        let fill = (sum as f64 / count as f64).round() as u8;
        for (p, _) in pixels.iter_mut().zip(&inside).filter(|(_, &ins)| !ins) {
            *p = fill;
        }
    }
    OrthoMap::gray(m, n, pixels)
        .and_then(|o| o.with_resolution(local.resolution()))
        .and_then(|o| o.with_mask(mask))
        .expect("rotation preserves dimensions")
}

/// Upper-left pixel of the `size`-pixel window centered on continuous pixel coordinate `center`.
pub fn window_origin(center: f64, size: usize) -> f64 {
    (center - (size as f64 - 1.0) / 2.0).round()
}

/// Similarity of `local` (rotated to `pose.heading`) against the global
/// window centered on `pose`. `None` when the window leaves the map.
pub fn pose_score(
    global: &OrthoMap,
    local: &OrthoMap,
    pose: &Pose2D,
    method: Method,
    kernel: Option<&WeightKernel>,
) -> Option<f64> {
    let (m, n) = (local.width(), local.height());
    let (px, py) = global.world_to_pixel(pose.x, pose.y);
    let (u, v) = (window_origin(px, m), window_origin(py, n));
    if !(u >= 0.0 && v >= 0.0) || u as usize + m > global.width() || v as usize + n > global.height() {
        return None;
    }
    let rotated = rotate_local(local, pose.heading);
    let score = PreparedTemplate::new(&rotated, method, kernel)
        .ok()
        .and_then(|t| t.score_at(global, u as usize, v as usize));
    Some(score.unwrap_or(MIN_CONFIDENCE))
}

impl ParticleSwarm {
    /// `n` particles uniform in the square of half-width `half_width` around
    /// the prior, headings uniform within `3 * noise.sigma_rot` of it.
    pub fn init(prior: Pose2D, half_width: f64, n: usize, noise: &NoiseParams, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("swarm needs at least one particle".into()));
        }
        if !(half_width.is_finite() && half_width >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad half width {half_width}")));
        }
        noise.validate()?;
        let mut rng = Rng::new(seed);
        let spread = 3.0 * noise.sigma_rot;
        let weight = 1.0 / n as f64;
        let particles = (0..n)
            .map(|_| {
                let x = prior.x + rng.uniform_range(-half_width, half_width);
                let y = prior.y + rng.uniform_range(-half_width, half_width);
                let h = prior.heading + rng.uniform_range(-spread, spread);
                Particle {
                    pose: Pose2D::new(x, y, h),
                    weight,
                }
            })
            .collect();
        Ok(Self { particles, rng })
    }

    pub fn from_particles(particles: Vec<Particle>, seed: u64) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidArgument("swarm needs at least one particle".into()));
        }
        if particles.iter().any(|p| !(p.weight.is_finite() && p.weight >= 0.0)) {
            return Err(Error::InvalidArgument("particle weights must be finite and >= 0".into()));
        }
        Ok(Self {
            particles,
            rng: Rng::new(seed),
        })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Moves every particle by `delta` in its own frame, plus motion noise.
    pub fn motion_update(&mut self, delta: &OdometryDelta, noise: &NoiseParams) {
        for p in &mut self.particles {
            let moved = p.pose.compose(delta.dx, delta.dy, delta.dtheta);
            let ex = self.rng.gaussian(noise.motion_sigma_pos);
            let ey = self.rng.gaussian(noise.motion_sigma_pos);
            let eh = self.rng.gaussian(noise.motion_sigma_rot);
            p.pose = Pose2D::new(moved.x + ex, moved.y + ey, moved.heading + eh);
        }
    }

    /// Reweights by similarity between `local` and the global map at each
    /// particle, then normalizes. Scores may be computed on `pool`.
    pub fn observation_update_in(
        &mut self,
        global: &OrthoMap,
        local: &OrthoMap,
        kernel: Option<&WeightKernel>,
        method: Method,
        pool: Option<&ThreadPool>,
    ) -> Result<()> {
        if method == Method::Wncc && kernel.is_none() {
            return Err(Error::MissingKernel);
        }
        if local.width() > global.width() || local.height() > global.height() {
            return Err(Error::TemplateTooLarge {
                tw: local.width(),
                th: local.height(),
                mw: global.width(),
                mh: global.height(),
            });
        }
        let global = &global.to_grayscale();
        let local = &local.to_grayscale();
        let score = |p: &Particle| pose_score(global, local, &p.pose, method, kernel);
        let scores: Vec<Option<f64>> = match pool {
            Some(pool) => pool.install(|| self.particles.par_iter().map(score).collect()),
            None => self.particles.iter().map(score).collect(),
        };
        if scores.iter().all(Option::is_none) {
            return Err(Error::SwarmLost { frame: None });
        }
        for (p, s) in self.particles.iter_mut().zip(&scores) {
            let confidence = s.map_or(MIN_CONFIDENCE, |s| s.max(MIN_CONFIDENCE));
            p.weight *= confidence;
        }
        self.normalize()
    }

    pub fn observation_update(
        &mut self,
        global: &OrthoMap,
        local: &OrthoMap,
        kernel: Option<&WeightKernel>,
        method: Method,
    ) -> Result<()> {
        self.observation_update_in(global, local, kernel, method, None)
    }

    fn normalize(&mut self) -> Result<()> {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::ZeroWeights);
        }
        for p in &mut self.particles {
            p.weight /= total;
        }
        Ok(())
    }

    /// Roulette-wheel resampling: `m` independent draws proportional to
    /// weight, each copy jittered by `sigma_pos` / `sigma_rot`, weights reset
    /// to `1/m`.
    pub fn resample(&mut self, m: usize, noise: &NoiseParams) -> Result<()> {
        if m == 0 {
            return Err(Error::InvalidArgument("resample count must be at least 1".into()));
        }
        let mut cumulative = Vec::with_capacity(self.particles.len());
        let mut acc = 0.0;
        for p in &self.particles {
            acc += p.weight;
            cumulative.push(acc);
        }
        if !(acc.is_finite() && acc > 0.0) {
            return Err(Error::ZeroWeights);
        }
        let weight = 1.0 / m as f64;
        let last = self.particles.len() - 1;
        let mut next = Vec::with_capacity(m);
        for _ in 0..m {
            let target = self.rng.uniform() * acc;
            let i = cumulative.partition_point(|&c| c <= target).min(last);
            let src = self.particles[i].pose;
            let x = src.x + self.rng.gaussian(noise.sigma_pos);
            let y = src.y + self.rng.gaussian(noise.sigma_pos);
            let h = src.heading + self.rng.gaussian(noise.sigma_rot);
            next.push(Particle {
                pose: Pose2D::new(x, y, h),
                weight,
            });
        }
        self.particles = next;
        Ok(())
    }

    /// Weighted mean position and weighted circular-mean heading.
    pub fn estimate(&self) -> Pose2D {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        let (mut x, mut y, mut s, mut c) = (0.0, 0.0, 0.0, 0.0);
        for p in &self.particles {
            let w = p.weight / total;
            x += w * p.pose.x;
            y += w * p.pose.y;
            s += w * p.pose.heading.sin();
            c += w * p.pose.heading.cos();
        }
        Pose2D::new(x, y, s.atan2(c))
    }

    pub fn best_particle(&self) -> Pose2D {
        self.particles
            .iter()
            .fold(None::<&Particle>, |best, p| match best {
                Some(b) if b.weight >= p.weight => Some(b),
                _ => Some(p),
            })
            .map(|p| p.pose)
            .expect("swarm is never empty")
    }

    /// Weighted RMS distance of particle positions from their weighted mean.
    pub fn position_spread(&self) -> f64 {
        let mean = self.estimate();
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        let var: f64 = self
            .particles
            .iter()
            .map(|p| p.weight / total * ((p.pose.x - mean.x).powi(2) + (p.pose.y - mean.y).powi(2)))
            .sum();
        var.sqrt()
    }

    pub fn weight_sum(&self) -> f64 {
        self.particles.iter().map(|p| p.weight).sum()
    }
}

/// Heading difference folded into `[-pi, pi)`.
pub fn heading_error(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}
