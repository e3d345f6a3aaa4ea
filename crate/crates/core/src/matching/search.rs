use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::{Method, PreparedTemplate, WeightKernel};
use crate::error::{Error, Result};
use crate::gridmap::{write_pgm, write_ppm, OrthoMap};

/// Scores for every window placement, row-major over the window origin `(u, v)`.
///
/// Placements the scorer rejected (zero-variance windows) hold the method's
/// non-finite worst score; every other entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreField {
    placements_w: usize,
    placements_h: usize,
    method: Method,
    scores: Vec<f64>,
}

impl ScoreField {
    pub fn placements_w(&self) -> usize {
        self.placements_w
    }

    pub fn placements_h(&self) -> usize {
        self.placements_h
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Score at `(u, v)`, or `None` if that placement was rejected.
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let s = self.scores[v * self.placements_w + u];
        s.is_finite().then_some(s)
    }

    /// Optimal placement; ties go to the smallest `v`, then the smallest `u`.
    pub fn best(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &s) in self.scores.iter().enumerate() {
            if !s.is_finite() {
                continue;
            }
            match best {
                Some((_, b)) if !self.method.is_better(s, b) => {}
                _ => best = Some((i, s)),
            }
        }
        best.map(|(i, s)| (i % self.placements_w, i / self.placements_w, s))
    }

    fn valid_range(&self) -> Option<(f64, f64)> {
        self.scores
            .iter()
            .filter(|s| s.is_finite())
            .fold(None, |acc, &s| match acc {
                None => Some((s, s)),
                Some((lo, hi)) => Some((lo.min(s), hi.max(s))),
            })
    }

    /// Min-max normalized 8-bit rendering with the best score at 255, so
    /// SSD/SAD fields are inverted. Rejected placements are 0.
    pub fn heatmap(&self) -> Vec<u8> {
        let flip = !self.method.higher_is_better();
        let Some((lo, hi)) = self.valid_range() else {
            return vec![0; self.scores.len()];
        };
        let span = hi - lo;
        self.scores
            .iter()
            .map(|&s| {
                if !s.is_finite() {
                    0
                } else if span == 0.0 {
                    255
                } else {
                    let t = (s - lo) / span;
                    ((if flip { 1.0 - t } else { t }) * 255.0).round() as u8
                }
            })
            .collect()
    }

    pub fn write_heatmap_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        write_pgm(path, self.placements_w, self.placements_h, &self.heatmap())
    }

    /// Color heatmap through [`heat_color`].
    pub fn write_heatmap_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        let rgb: Vec<u8> = self.heatmap().into_iter().flat_map(heat_color).collect();
        write_ppm(path, self.placements_w, self.placements_h, &rgb)
    }

    /// Raw dump: `"SFLD"`, width, height, method code (little-endian u32),
    /// then one little-endian f32 per placement, NaN where rejected.
    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.scores.len());
        out.extend_from_slice(b"SFLD");
        out.extend_from_slice(&(self.placements_w as u32).to_le_bytes());
        out.extend_from_slice(&(self.placements_h as u32).to_le_bytes());
        out.extend_from_slice(&self.method.code().to_le_bytes());
        for &s in &self.scores {
            let v = if s.is_finite() { s as f32 } else { f32::NAN };
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_raw_bytes(bytes: &[u8]) -> Result<ScoreField> {
        let bad = |r: &str| Error::InvalidArgument(format!("score field dump: {r}"));
        if bytes.len() < 16 || &bytes[0..4] != b"SFLD" {
            return Err(bad("missing SFLD header"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let (w, h) = (word(4) as usize, word(8) as usize);
        let method = Method::ALL
            .into_iter()
            .find(|m| m.code() == word(12))
            .ok_or_else(|| bad("unknown method code"))?;
        if bytes.len() != 16 + 4 * w * h {
            return Err(bad("payload length does not match header"));
        }
        let scores = bytes[16..]
            .chunks_exact(4)
            .map(|c| {
                let v = f32::from_le_bytes(c.try_into().unwrap());
                if v.is_nan() {
                    method.worst()
                } else {
                    v as f64
                }
            })
            .collect();
        Ok(ScoreField {
            placements_w: w,
            placements_h: h,
            method,
            scores,
        })
    }

    pub fn write_raw(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(&self.to_raw_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// Fixed 256-entry "hot" palette: black, red, yellow, white.
pub fn heat_color(level: u8) -> [u8; 3] {
    let x = level as u32 * 3;
    let ramp = |lo: u32| (x.saturating_sub(lo).min(255)) as u8;
    [ramp(0), ramp(255), ramp(510)]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchResult {
    pub best_u: usize,
    pub best_v: usize,
    pub best_score: f64,
    pub field: ScoreField,
}

fn prepare(
    map: &OrthoMap,
    template: &OrthoMap,
    method: Method,
    kernel: Option<&WeightKernel>,
) -> Result<PreparedTemplate> {
    if !map.is_grayscale() || !template.is_grayscale() {
        return Err(Error::NotGrayscale);
    }
    if template.width() > map.width() || template.height() > map.height() {
        return Err(Error::TemplateTooLarge {
            tw: template.width(),
            th: template.height(),
            mw: map.width(),
            mh: map.height(),
        });
    }
    PreparedTemplate::new(template, method, kernel)
}

fn fill_row(map: &OrthoMap, prepared: &PreparedTemplate, v: usize, out: &mut [f64]) {
    let worst = prepared.method().worst();
    for (u, slot) in out.iter_mut().enumerate() {
        *slot = prepared.score_at(map, u, v).unwrap_or(worst);
    }
}

fn finish(field: ScoreField) -> Result<MatchResult> {
    let (best_u, best_v, best_score) = field.best().ok_or(Error::NoValidPlacement)?;
    Ok(MatchResult {
        best_u,
        best_v,
        best_score,
        field,
    })
}

/// Exhaustive search over every placement `u in 0..=W-M`, `v in 0..=H-N`.
pub fn match_template(
    map: &OrthoMap,
    template: &OrthoMap,
    method: Method,
    kernel: Option<&WeightKernel>,
) -> Result<MatchResult> {
    let prepared = prepare(map, template, method, kernel)?;
    let pw = map.width() - template.width() + 1;
    let ph = map.height() - template.height() + 1;
    let mut scores = vec![0.0; pw * ph];
    for (v, row) in scores.chunks_mut(pw).enumerate() {
        fill_row(map, &prepared, v, row);
    }
    finish(ScoreField {
        placements_w: pw,
        placements_h: ph,
        method,
        scores,
    })
}

/// [`match_template`] with placement rows spread over `workers` threads.
///
/// Each row is computed by the same code as the sequential search, so the
/// result is bit-identical for any worker count.
pub fn match_template_parallel(
    map: &OrthoMap,
    template: &OrthoMap,
    method: Method,
    kernel: Option<&WeightKernel>,
    workers: usize,
) -> Result<MatchResult> {
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    if workers == 1 {
        return match_template(map, template, method, kernel);
    }
    let prepared = prepare(map, template, method, kernel)?;
    let pw = map.width() - template.width() + 1;
    let ph = map.height() - template.height() + 1;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut scores = vec![0.0; pw * ph];
    pool.install(|| {
        scores
            .par_chunks_mut(pw)
            .enumerate()
            .for_each(|(v, row)| fill_row(map, &prepared, v, row));
    });
    finish(ScoreField {
        placements_w: pw,
        placements_h: ph,
        method,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{make_kernel, KernelKind};
    use crate::rng::Rng;

    fn random_map(w: usize, h: usize, seed: u64) -> OrthoMap {
        let mut rng = Rng::new(seed);
        OrthoMap::gray(w, h, (0..w * h).map(|_| rng.below(256) as u8).collect()).unwrap()
    }

    #[test]
    fn planted_ncc() {
        let map = random_map(40, 30, 1);
        let tpl = map.crop_window(12, 7, 10, 8).unwrap();
        let r = match_template(&map, &tpl, Method::Ncc, None).unwrap();
        assert_eq!((r.best_u, r.best_v), (12, 7));
        assert!((r.best_score - 1.0).abs() < 1e-12);
        assert_eq!(r.field.placements_w(), 31);
        assert_eq!(r.field.placements_h(), 23);
    }

    #[test]
    fn constant_map_tie_break() {
        let map = OrthoMap::filled(5, 4, 77).unwrap();
        let tpl = OrthoMap::filled(1, 1, 77).unwrap();
        let r = match_template(&map, &tpl, Method::Sad, None).unwrap();
        assert!(r.field.scores().iter().all(|&s| s == 0.0));
        assert_eq!((r.best_u, r.best_v), (0, 0));
    }

    #[test]
    fn degenerate_windows_are_excluded() {
        // left half constant, right half textured
        let mut map = random_map(20, 10, 2);
        for v in 0..10 {
            for u in 0..10 {
                map.pixels_mut()[v * 20 + u] = 0;
            }
        }
        let tpl = random_map(4, 4, 3);
        let r = match_template(&map, &tpl, Method::Ncc, None).unwrap();
        assert_eq!(r.field.get(0, 0), None);
        assert_eq!(r.field.scores()[0], f64::NEG_INFINITY);
        assert!(r.field.get(10, 0).is_some());
        assert!(r.best_u >= 7);
    }

    #[test]
    fn all_degenerate_fails() {
        let map = OrthoMap::filled(8, 8, 3).unwrap();
        let tpl = random_map(3, 3, 4);
        assert!(matches!(
            match_template(&map, &tpl, Method::Ncc, None),
            Err(Error::NoValidPlacement)
        ));
    }

    #[test]
    fn template_too_large_and_missing_kernel() {
        let map = random_map(8, 8, 5);
        let big = random_map(9, 2, 6);
        assert!(matches!(
            match_template(&map, &big, Method::Ssd, None),
            Err(Error::TemplateTooLarge { .. })
        ));
        let tpl = random_map(3, 3, 7);
        assert!(matches!(
            match_template(&map, &tpl, Method::Wncc, None),
            Err(Error::MissingKernel)
        ));
        assert!(match_template_parallel(&map, &tpl, Method::Ssd, None, 0).is_err());
    }

    #[test]
    fn parallel_is_bit_identical() {
        let map = random_map(48, 40, 8);
        let tpl = random_map(9, 7, 9);
        let k = make_kernel(KernelKind::Corrected, 9, 7).unwrap();
        for method in Method::ALL {
            let seq = match_template(&map, &tpl, method, Some(&k)).unwrap();
            for workers in [1, 2, 3, 8] {
                let par = match_template_parallel(&map, &tpl, method, Some(&k), workers).unwrap();
                assert_eq!(par, seq, "{method} with {workers} workers");
            }
        }
    }

    #[test]
    fn raw_dump_layout() {
        let map = random_map(10, 6, 10);
        let tpl = random_map(4, 3, 11);
        let r = match_template(&map, &tpl, Method::Ncc, None).unwrap();
        let bytes = r.field.to_raw_bytes();
        assert_eq!(&bytes[0..4], b"SFLD");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 7);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(bytes.len(), 16 + 4 * 28);
        let back = ScoreField::from_raw_bytes(&bytes).unwrap();
        assert_eq!(back.placements_w(), 7);
        for (a, b) in back.scores().iter().zip(r.field.scores()) {
            assert_eq!(*a, *b as f32 as f64);
        }
        assert!(ScoreField::from_raw_bytes(&bytes[..20]).is_err());
    }

    #[test]
    fn heatmap_normalization() {
        let field = ScoreField {
            placements_w: 3,
            placements_h: 1,
            method: Method::Ncc,
            scores: vec![-0.5, f64::NEG_INFINITY, 0.5],
        };
        assert_eq!(field.heatmap(), vec![0, 0, 255]);
        let ssd = ScoreField {
            method: Method::Ssd,
            scores: vec![10.0, f64::INFINITY, 30.0],
            ..field
        };
        assert_eq!(ssd.heatmap(), vec![255, 0, 0]);
        assert_eq!(heat_color(0), [0, 0, 0]);
        assert_eq!(heat_color(255), [255, 255, 255]);
        assert_eq!(heat_color(85), [255, 0, 0]);
    }
}
