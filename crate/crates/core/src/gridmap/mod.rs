//! Map data model shared by every other module.
//!
//! An [`OrthoMap`] is a top-down image at a fixed metric scale. Both the aerial
//! global map and the ground robot's local maps use it. Pixel `(u, v)` has its
//! center at world `origin + (u, v) * resolution`; `u` runs along world x and
//! `v` along world y.

mod elevation;
mod io;
mod pose;

pub use elevation::{render_orthomosaic, Cell, ElevationGrid};
pub use io::{
    load_elevation_csv, load_map, mask_path_for, write_elevation_csv, write_map, write_pgm,
    write_ppm,
};
pub use pose::{normalize_angle, Pose2D};

use crate::error::{Error, Result};

/// Ten centimeters per pixel, for global and local maps alike.
pub const DEFAULT_RESOLUTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channels {
    Gray,
    Rgb,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Gray => 1,
            Channels::Rgb => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMap {
    width: usize,
    height: usize,
    resolution: f64,
    channels: Channels,
    pixels: Vec<u8>,
    mask: Option<Vec<bool>>,
    origin: [f64; 2],
}

impl OrthoMap {
    pub fn new(width: usize, height: usize, channels: Channels, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMap(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels.count()))
            .ok_or_else(|| Error::InvalidMap("dimension overflow".into()))?;
        if pixels.len() != expected {
            return Err(Error::InvalidMap(format!(
                "expected {expected} samples, got {}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            resolution: DEFAULT_RESOLUTION,
            channels,
            pixels,
            mask: None,
            origin: [0.0, 0.0],
        })
    }

    pub fn gray(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        Self::new(width, height, Channels::Gray, pixels)
    }

    pub fn rgb(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        Self::new(width, height, Channels::Rgb, pixels)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::gray(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidMap(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.width * self.height {
            return Err(Error::InvalidMap(format!(
                "mask has {} entries, map has {} pixels",
                mask.len(),
                self.width * self.height
            )));
        }
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn without_mask(mut self) -> Self {
        self.mask = None;
        self
    }

    pub fn with_origin(mut self, origin: [f64; 2]) -> Self {
        self.origin = origin;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    /// Mutable mask, materializing an all-valid one if absent.
    pub fn mask_mut(&mut self) -> &mut [bool] {
        let n = self.width * self.height;
        self.mask.get_or_insert_with(|| vec![true; n])
    }

    pub fn is_grayscale(&self) -> bool {
        self.channels == Channels::Gray
    }

    /// Intensity at `(u, v)` of a grayscale map.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u8 {
        debug_assert!(self.is_grayscale());
        self.pixels[v * self.width + u]
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m[v * self.width + u])
    }

    pub fn valid_fraction(&self) -> f64 {
        match &self.mask {
            None => 1.0,
            Some(m) => m.iter().filter(|&&b| b).count() as f64 / m.len() as f64,
        }
    }

    /// Row `v` of a grayscale map.
    #[inline]
    pub fn row(&self, v: usize) -> &[u8] {
        &self.pixels[v * self.width..(v + 1) * self.width]
    }

    /// Continuous pixel coordinates of a world point.
    pub fn world_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.origin[0]) / self.resolution,
            (y - self.origin[1]) / self.resolution,
        )
    }

    pub fn pixel_to_world(&self, u: f64, v: f64) -> (f64, f64) {
        (
            self.origin[0] + u * self.resolution,
            self.origin[1] + v * self.resolution,
        )
    }

    /// Luminance conversion, `round(0.299 R + 0.587 G + 0.114 B)`.
    pub fn to_grayscale(&self) -> OrthoMap {
        if self.is_grayscale() {
            return self.clone();
        }
        let pixels = self
            .pixels
            .chunks_exact(3)
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect();
        OrthoMap {
            channels: Channels::Gray,
            pixels,
            ..self.clone()
        }
    }

    /// The `w`x`h` sub-map whose upper-left pixel is `(u, v)`.
    ///
    /// The crop keeps the resolution and moves the origin so that world
    /// coordinates of the cropped pixels are unchanged.
    pub fn crop_window(&self, u: usize, v: usize, w: usize, h: usize) -> Result<OrthoMap> {
        if w == 0 || h == 0 || u + w > self.width || v + h > self.height {
            return Err(Error::WindowOutOfBounds {
                u: u as i64,
                v: v as i64,
                w,
                h,
                map_w: self.width,
                map_h: self.height,
            });
        }
        let c = self.channels.count();
        let mut pixels = Vec::with_capacity(w * h * c);
        for row in v..v + h {
            let start = (row * self.width + u) * c;
            pixels.extend_from_slice(&self.pixels[start..start + w * c]);
        }
        let mask = self.mask.as_ref().map(|m| {
            let mut out = Vec::with_capacity(w * h);
            for row in v..v + h {
                let start = row * self.width + u;
                out.extend_from_slice(&m[start..start + w]);
            }
            out
        });
        Ok(OrthoMap {
            width: w,
            height: h,
            resolution: self.resolution,
            channels: self.channels,
            pixels,
            mask,
            origin: self.pixel_to_world(u as f64, v as f64).into(),
        })
    }
}

pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .round()
        .clamp(0.0, 255.0) as u8
}
