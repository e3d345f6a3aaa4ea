//! Per-window similarity scores.
//!
//! All four scorers read the window straight out of the map (no copy) and
//! compare it with a [`PreparedTemplate`] that caches the template-side terms.
//! SSD and SAD are integer sums. NCC and WNCC compute the window mean in a
//! first pass and the centered sums in a second.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::WeightKernel;
use crate::error::{Error, Result};
use crate::gridmap::OrthoMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Ssd,
    Sad,
    Ncc,
    Wncc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ssd, Method::Sad, Method::Ncc, Method::Wncc];

    pub fn higher_is_better(self) -> bool {
        matches!(self, Method::Ncc | Method::Wncc)
    }

    /// Score recorded for placements the scorer rejects.
    pub fn worst(self) -> f64 {
        if self.higher_is_better() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    pub fn is_better(self, candidate: f64, incumbent: f64) -> bool {
        if self.higher_is_better() {
            candidate > incumbent
        } else {
            candidate < incumbent
        }
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            Method::Ssd => 0,
            Method::Sad => 1,
            Method::Ncc => 2,
            Method::Wncc => 3,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ssd => "SSD",
            Method::Sad => "SAD",
            Method::Ncc => "NCC",
            Method::Wncc => "WNCC",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SSD" => Ok(Method::Ssd),
            "SAD" => Ok(Method::Sad),
            "NCC" => Ok(Method::Ncc),
            "WNCC" => Ok(Method::Wncc),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

fn require_gray(map: &OrthoMap) -> Result<()> {
    if map.is_grayscale() {
        Ok(())
    } else {
        Err(Error::NotGrayscale)
    }
}

/// Mean of all template pixels; the mask is not consulted.
pub fn template_mean(template: &OrthoMap) -> Result<f64> {
    require_gray(template)?;
    if template.pixels().is_empty() {
        return Err(Error::EmptyTemplate);
    }
    let sum: u64 = template.pixels().iter().map(|&p| p as u64).sum();
    Ok(sum as f64 / template.pixels().len() as f64)
}

/// Mean of the `m`x`n` window of `map` whose upper-left pixel is `(u, v)`.
pub fn window_mean(map: &OrthoMap, u: usize, v: usize, m: usize, n: usize) -> Result<f64> {
    require_gray(map)?;
    check_window(map, u, v, m, n)?;
    Ok(window_sum(map, u, v, m, n) as f64 / (m * n) as f64)
}

fn check_window(map: &OrthoMap, u: usize, v: usize, m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || u + m > map.width() || v + n > map.height() {
        return Err(Error::WindowOutOfBounds {
            u: u as i64,
            v: v as i64,
            w: m,
            h: n,
            map_w: map.width(),
            map_h: map.height(),
        });
    }
    Ok(())
}

#[inline]
fn window_rows<'a>(
    map: &'a OrthoMap,
    u: usize,
    v: usize,
    m: usize,
    n: usize,
) -> impl Iterator<Item = &'a [u8]> + 'a {
    (v..v + n).map(move |row| &map.row(row)[u..u + m])
}

#[inline]
fn window_sum(map: &OrthoMap, u: usize, v: usize, m: usize, n: usize) -> u64 {
    window_rows(map, u, v, m, n)
        .map(|r| r.iter().map(|&p| p as u32).sum::<u32>() as u64)
        .sum()
}

/// Template-side terms cached once per search.
#[derive(Clone, Debug)]
pub struct PreparedTemplate {
    method: Method,
    m: usize,
    n: usize,
    raw: Vec<u8>,
    /// `P - mean(P)`
    centered: Vec<f64>,
    /// `|P - mean(P)|`
    abs_centered: Vec<f64>,
    weights: Vec<f64>,
    sq_norm: f64,
}

impl PreparedTemplate {
    pub fn new(template: &OrthoMap, method: Method, kernel: Option<&WeightKernel>) -> Result<Self> {
        require_gray(template)?;
        let (m, n) = (template.width(), template.height());
        let raw = template.pixels().to_vec();
        let mut prepared = Self {
            method,
            m,
            n,
            raw,
            centered: Vec::new(),
            abs_centered: Vec::new(),
            weights: Vec::new(),
            sq_norm: 0.0,
        };
        if method.higher_is_better() {
            let mean = template_mean(template)?;
            prepared.centered = prepared.raw.iter().map(|&p| p as f64 - mean).collect();
            prepared.sq_norm = prepared.centered.iter().map(|d| d * d).sum();
            if prepared.centered.iter().all(|&d| d == 0.0) {
                return Err(Error::DegeneratePatch);
            }
        }
        if method == Method::Wncc {
            let kernel = kernel.ok_or(Error::MissingKernel)?;
            if kernel.m() != m || kernel.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "kernel {}x{} vs template {m}x{n}",
                    kernel.m(),
                    kernel.n()
                )));
            }
            prepared.abs_centered = prepared.centered.iter().map(|d| d.abs()).collect();
            prepared.weights = kernel.weights().to_vec();
        }
        Ok(prepared)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn width(&self) -> usize {
        self.m
    }

    pub fn height(&self) -> usize {
        self.n
    }

    /// Score of the window at `(u, v)`; `None` for a zero-variance window.
    ///
    /// The caller guarantees the window lies inside `map`.
    #[inline]
    pub fn score_at(&self, map: &OrthoMap, u: usize, v: usize) -> Option<f64> {
        match self.method {
            Method::Ssd => Some(self.ssd(map, u, v)),
            Method::Sad => Some(self.sad(map, u, v)),
            Method::Ncc => self.ncc(map, u, v),
            Method::Wncc => self.wncc(map, u, v),
        }
    }

    /// Bounds-checked variant of [`score_at`](Self::score_at).
    pub fn score_checked(&self, map: &OrthoMap, u: usize, v: usize) -> Result<f64> {
        require_gray(map)?;
        check_window(map, u, v, self.m, self.n)?;
        self.score_at(map, u, v).ok_or(Error::DegeneratePatch)
    }

    // Row sums cannot overflow at any sane template width. Wrapping adds keep
    // the inner loops vectorized when overflow checks are on.
    fn ssd(&self, map: &OrthoMap, u: usize, v: usize) -> f64 {
        let mut total = 0u64;
        for (row, tpl) in window_rows(map, u, v, self.m, self.n).zip(self.raw.chunks_exact(self.m)) {
            total += row
                .iter()
                .zip(tpl)
                .map(|(&r, &p)| {
                    let d = r.abs_diff(p) as u64;
                    d * d
                })
                .fold(0u64, u64::wrapping_add);
        }
        total as f64
    }

    fn sad(&self, map: &OrthoMap, u: usize, v: usize) -> f64 {
        let mut total = 0u64;
        for (row, tpl) in window_rows(map, u, v, self.m, self.n).zip(self.raw.chunks_exact(self.m)) {
            total += row
                .iter()
                .zip(tpl)
                .map(|(&r, &p)| r.abs_diff(p) as u32)
                .fold(0u32, u32::wrapping_add) as u64;
        }
        total as f64
    }

    fn ncc(&self, map: &OrthoMap, u: usize, v: usize) -> Option<f64> {
        let mean = window_sum(map, u, v, self.m, self.n) as f64 / (self.m * self.n) as f64;
        let mut cross = [0.0; LANES];
        let mut var = [0.0; LANES];
        for (row, tpl) in window_rows(map, u, v, self.m, self.n).zip(self.centered.chunks_exact(self.m)) {
            let mut r4 = row.chunks_exact(LANES);
            let mut p4 = tpl.chunks_exact(LANES);
            for (r, p) in (&mut r4).zip(&mut p4) {
                for k in 0..LANES {
                    let d = r[k] as f64 - mean;
                    cross[k] += d * p[k];
                    var[k] += d * d;
                }
            }
            for (&r, &p) in r4.remainder().iter().zip(p4.remainder()) {
                let d = r as f64 - mean;
                cross[0] += d * p;
                var[0] += d * d;
            }
        }
        let var = lane_sum(&var);
        if var == 0.0 {
            return None;
        }
        Some(lane_sum(&cross) / (var * self.sq_norm).sqrt())
    }

    fn wncc(&self, map: &OrthoMap, u: usize, v: usize) -> Option<f64> {
        let mean = window_sum(map, u, v, self.m, self.n) as f64 / (self.m * self.n) as f64;
        let mut cross = [0.0; LANES];
        let mut var = [0.0; LANES];
        let rows = window_rows(map, u, v, self.m, self.n)
            .zip(self.abs_centered.chunks_exact(self.m))
            .zip(self.weights.chunks_exact(self.m));
        for ((row, tpl), wts) in rows {
            let mut r4 = row.chunks_exact(LANES);
            let mut p4 = tpl.chunks_exact(LANES);
            let mut w4 = wts.chunks_exact(LANES);
            for ((r, p), w) in (&mut r4).zip(&mut p4).zip(&mut w4) {
                for k in 0..LANES {
                    let d = r[k] as f64 - mean;
                    cross[k] += w[k] * d.abs() * p[k];
                    var[k] += d * d;
                }
            }
            let tail = r4.remainder().iter().zip(p4.remainder()).zip(w4.remainder());
            for ((&r, &p), &w) in tail {
                let d = r as f64 - mean;
                cross[0] += w * d.abs() * p;
                var[0] += d * d;
            }
        }
        let var = lane_sum(&var);
        if var == 0.0 {
            return None;
        }
        Some(lane_sum(&cross) / (var * self.sq_norm).sqrt())
    }
}

/// Independent partial sums per lane; fixed order keeps results reproducible.
const LANES: usize = 4;

#[inline]
fn lane_sum(acc: &[f64; LANES]) -> f64 {
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

fn require_same_dims(window: &OrthoMap, template: &OrthoMap) -> Result<()> {
    if window.width() != template.width() || window.height() != template.height() {
        return Err(Error::DimensionMismatch(format!(
            "window {}x{} vs template {}x{}",
            window.width(),
            window.height(),
            template.width(),
            template.height()
        )));
    }
    Ok(())
}

fn score_pair(
    window: &OrthoMap,
    template: &OrthoMap,
    method: Method,
    kernel: Option<&WeightKernel>,
) -> Result<f64> {
    require_gray(window)?;
    require_same_dims(window, template)?;
    PreparedTemplate::new(template, method, kernel)?.score_checked(window, 0, 0)
}

/// Sum of squared differences; lower is better.
pub fn score_ssd(window: &OrthoMap, template: &OrthoMap) -> Result<f64> {
    score_pair(window, template, Method::Ssd, None)
}

/// Sum of absolute differences; lower is better.
pub fn score_sad(window: &OrthoMap, template: &OrthoMap) -> Result<f64> {
    score_pair(window, template, Method::Sad, None)
}

/// Zero-mean normalized cross correlation, in `[-1, 1]`.
pub fn score_ncc(window: &OrthoMap, template: &OrthoMap) -> Result<f64> {
    score_pair(window, template, Method::Ncc, None)
}

/// Weighted normalized cross correlation:
///
/// ```text
///            sum w(s,t) |R(s,t) - mean R| |P(s,t) - mean P|
/// WNCC = -------------------------------------------------------
///        sqrt( sum (R(s,t) - mean R)^2 * sum (P(s,t) - mean P)^2 )
/// ```
///
/// The absolute values make it nonnegative; with a kernel peaking at 1 it
/// is bounded by 1.
pub fn score_wncc(window: &OrthoMap, template: &OrthoMap, kernel: &WeightKernel) -> Result<f64> {
    score_pair(window, template, Method::Wncc, Some(kernel))
}
