use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridmap::OrthoMap;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub road_count: usize,
    /// Painted fraction of each lane center line, in `[0, 1]`; also scales
    /// how many covers are scattered.
    pub marking_density: f64,
    /// Lattice spacing of the coarsest ground-texture octave, in pixels.
    pub texture_scale: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            width: 512,
            height: 512,
            road_count: 3,
            marking_density: 0.5,
            texture_scale: 12.0,
        }
    }
}

impl SceneSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.width < 64 || self.height < 64 {
            return Err(Error::InvalidScene(format!(
                "scene must be at least 64x64, got {}x{}",
                self.width, self.height
            )));
        }
        if !(0.0..=1.0).contains(&self.marking_density) {
            return Err(Error::InvalidScene("marking density must lie in [0, 1]".into()));
        }
        if !(self.texture_scale.is_finite() && self.texture_scale >= 1.0) {
            return Err(Error::InvalidScene("texture scale must be at least 1 pixel".into()));
        }
        Ok(())
    }
}

fn hash2(seed: u64, octave: u64, ix: i64, iy: i64) -> f64 {
    let mut h = seed
        ^ octave.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (ix as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ (iy as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
    h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Smoothstep-interpolated lattice noise in `[0, 1]`.
fn value_noise(seed: u64, octave: u64, x: f64, y: f64, scale: f64) -> f64 {
    let (fx, fy) = (x / scale, y / scale);
    let (ix, iy) = (fx.floor(), fy.floor());
    let (tx, ty) = (fx - ix, fy - iy);
    let (sx, sy) = (tx * tx * (3.0 - 2.0 * tx), ty * ty * (3.0 - 2.0 * ty));
    let (ix, iy) = (ix as i64, iy as i64);
    let a = hash2(seed, octave, ix, iy);
    let b = hash2(seed, octave, ix + 1, iy);
    let c = hash2(seed, octave, ix, iy + 1);
    let d = hash2(seed, octave, ix + 1, iy + 1);
    let top = a + (b - a) * sx;
    let bottom = c + (d - c) * sx;
    top + (bottom - top) * sy
}

struct Road {
    /// point on the center line
    px: f64,
    py: f64,
    /// unit direction
    dx: f64,
    dy: f64,
    half_width: f64,
}

impl Road {
    /// Signed distance across the road and position along it.
    fn frame(&self, x: f64, y: f64) -> (f64, f64) {
        let (rx, ry) = (x - self.px, y - self.py);
        (rx * -self.dy + ry * self.dx, rx * self.dx + ry * self.dy)
    }
}

/// Procedural aerial map: textured ground, dark roads with side lines and
/// dashed center lines, and bright round covers. Pure function of `spec`.
pub fn gen_global(spec: &SceneSpec) -> Result<OrthoMap> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut rng = Rng::new(spec.seed);
    let noise_seed = rng.next_u64();

    let roads: Vec<Road> = (0..spec.road_count)
        .map(|_| {
            let angle = rng.uniform_range(0.0, std::f64::consts::PI);
            Road {
                px: rng.uniform_range(0.2, 0.8) * w as f64,
                py: rng.uniform_range(0.2, 0.8) * h as f64,
                dx: angle.cos(),
                dy: angle.sin(),
                half_width: rng.uniform_range(10.0, 18.0),
            }
        })
        .collect();
    let cover_count = (spec.marking_density * (w * h) as f64 / 12_000.0).round() as usize;
    let covers: Vec<(f64, f64, f64)> = (0..cover_count)
        .map(|_| {
            (
                rng.uniform_range(0.0, w as f64),
                rng.uniform_range(0.0, h as f64),
                rng.uniform_range(5.0, 8.0),
            )
        })
        .collect();

    let scale = spec.texture_scale;
    let dash_period = 36.0;
    let dash_len = dash_period * spec.marking_density;
    let mut pixels = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let (x, y) = (u as f64, v as f64);
            let tex = 0.55 * value_noise(noise_seed, 0, x, y, scale)
                + 0.3 * value_noise(noise_seed, 1, x, y, (scale / 2.0).max(1.0))
                + 0.15 * value_noise(noise_seed, 2, x, y, (scale / 4.0).max(1.0));
            let grain = hash2(noise_seed, 9, u as i64, v as i64) - 0.5;
            let mut value = 60.0 + 120.0 * tex + 16.0 * grain;

            for road in &roads {
                let (across, along) = road.frame(x, y);
                let a = across.abs();
                if a <= road.half_width {
                    value = 45.0 + 25.0 * tex + 10.0 * grain;
                    if spec.marking_density > 0.0 {
                        let side = road.half_width - 3.0;
                        let on_side = (a - side).abs() <= 1.0;
                        let on_dash = a <= 1.5 && along.rem_euclid(dash_period) < dash_len;
                        if on_side || on_dash {
                            value = 225.0 + 20.0 * grain;
                        }
                    }
                }
            }
            for &(cx, cy, r) in &covers {
                let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                if d <= r {
                    value = if d >= r - 2.0 { 235.0 } else { 110.0 + 40.0 * grain };
                }
            }
            pixels.push(value.round().clamp(0.0, 255.0) as u8);
        }
    }
    OrthoMap::gray(w, h, pixels)
}
