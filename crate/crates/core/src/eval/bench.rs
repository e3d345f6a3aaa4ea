use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridmap::OrthoMap;
use crate::matching::{make_kernel, match_template_parallel, KernelKind, Method};
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub method: Method,
    pub map_w: usize,
    pub map_h: usize,
    pub template_w: usize,
    pub template_h: usize,
    pub workers: usize,
    pub repetitions: usize,
    /// Median over repetitions, seconds.
    pub wall_time: f64,
    pub placements_per_second: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    /// (map side, template side) pairs; maps and templates are square.
    pub sizes: Vec<(usize, usize)>,
    pub methods: Vec<Method>,
    pub workers: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![(256, 32)],
            methods: Method::ALL.to_vec(),
            workers: vec![1],
            repetitions: 5,
            seed: 0,
        }
    }
}

/// Uniform random map and a template cropped from it.
pub fn bench_inputs(map_side: usize, template_side: usize, seed: u64) -> Result<(OrthoMap, OrthoMap)> {
    if template_side == 0 || template_side > map_side {
        return Err(Error::InvalidArgument(format!(
            "bench size {map_side}x{template_side}: template must be 1..=map side"
        )));
    }
    let mut rng = Rng::new(seed);
    let pixels = (0..map_side * map_side).map(|_| rng.below(256) as u8).collect();
    let map = OrthoMap::gray(map_side, map_side, pixels)?;
    let off = (map_side - template_side) / 2;
    let template = map.crop_window(off, off, template_side, template_side)?;
    Ok((map, template))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Times every (size, workers, method) combination. Methods are interleaved
/// within each repetition so slow drift in machine load hits them evenly.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchReport>> {
    if config.repetitions < 3 {
        return Err(Error::InvalidArgument("bench needs at least 3 repetitions".into()));
    }
    let mut reports = Vec::new();
    for &(map_side, template_side) in &config.sizes {
        let (map, template) = bench_inputs(map_side, template_side, config.seed)?;
        let kernel = make_kernel(KernelKind::Corrected, template_side, template_side)?;
        let placements = ((map_side - template_side + 1) * (map_side - template_side + 1)) as f64;
        for &workers in &config.workers {
            let mut times = vec![Vec::with_capacity(config.repetitions); config.methods.len()];
            for _ in 0..config.repetitions {
                for (k, &method) in config.methods.iter().enumerate() {
                    let kernel = (method == Method::Wncc).then_some(&kernel);
                    let t0 = Instant::now();
                    let r = match_template_parallel(&map, &template, method, kernel, workers)?;
                    let dt = t0.elapsed().as_secs_f64();
                    std::hint::black_box(r);
                    times[k].push(dt.max(1e-9));
                }
            }
            for (k, &method) in config.methods.iter().enumerate() {
                let wall_time = median(std::mem::take(&mut times[k]));
                reports.push(BenchReport {
                    method,
                    map_w: map_side,
                    map_h: map_side,
                    template_w: template_side,
                    template_h: template_side,
                    workers,
                    repetitions: config.repetitions,
                    wall_time,
                    placements_per_second: placements / wall_time,
                });
            }
        }
    }
    Ok(reports)
}

pub fn write_bench_csv(reports: &[BenchReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let to_err = |e: csv::Error| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for r in reports {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn reports_cover_grid() {
        let config = BenchConfig {
            sizes: vec![(24, 4), (20, 8)],
            methods: vec![Method::Sad, Method::Wncc],
            workers: vec![1, 2],
            repetitions: 3,
            seed: 1,
        };
        let reports = run_bench(&config).unwrap();
        assert_eq!(reports.len(), 8);
        for r in &reports {
            assert!(r.wall_time > 0.0);
            let placements = ((r.map_w - r.template_w + 1) * (r.map_h - r.template_h + 1)) as f64;
            assert!((r.placements_per_second * r.wall_time - placements).abs() < 1e-6 * placements);
        }
    }

    #[test]
    fn too_few_repetitions() {
        let config = BenchConfig {
            repetitions: 2,
            ..BenchConfig::default()
        };
        assert!(run_bench(&config).is_err());
    }

    #[test]
    fn template_cropped_from_map() {
        let (map, t) = bench_inputs(16, 4, 9).unwrap();
        assert_eq!(t, map.crop_window(6, 6, 4, 4).unwrap());
        assert!(bench_inputs(4, 8, 0).is_err());
    }
}
