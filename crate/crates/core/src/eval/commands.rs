//! File-in, file-out implementations of the `ortholoc` subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bench::{run_bench, write_bench_csv, BenchConfig, BenchReport};
use super::experiments::{
    localization_config, localization_trial_on, make_sequence, matching_trial, MatchingSetup,
    SequenceSetup, EXPERIMENT_SEEDS,
};
use super::{compute_rmse, RmseReport};
use crate::error::{Error, Result};
use crate::gridmap::{load_map, write_map, DEFAULT_RESOLUTION};
use crate::localization::{
    read_manifest, run_localization, write_manifest, Frame, LocalizationConfig, LocalizationRun,
    ManifestEntry, Trajectory,
};
use crate::matching::{make_kernel, match_template_parallel, KernelKind, MatchResult, Method};

/// `<prefix><suffix>`, keeping the prefix's directory.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}

/// Pretty JSON with a trailing newline. Field order follows the struct, so
/// output is stable across runs.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::MalformedJson {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub best_u: usize,
    pub best_v: usize,
    pub best_score: f64,
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct MatchOutput {
    pub result: MatchResult,
    pub summary: MatchSummary,
    pub heatmap: PathBuf,
    pub raw: PathBuf,
    pub json: PathBuf,
}

/// Exhaustive match of a template file against a map file.
///
/// Writes `<out>.heatmap.pgm` (plus `<out>.heatmap.ppm` when `color`),
/// `<out>.scores.bin` and `<out>.json`. WNCC uses `kernel`, or the corrected
/// kernel when none is given; the other methods ignore it.
pub fn cmd_match(
    global_path: &Path,
    template_path: &Path,
    method: Method,
    kernel: Option<KernelKind>,
    workers: usize,
    out: &Path,
    color: bool,
) -> Result<MatchOutput> {
    let global = load_map(global_path, DEFAULT_RESOLUTION)?.to_grayscale();
    let template = load_map(template_path, DEFAULT_RESOLUTION)?.to_grayscale();
    let kernel = match method {
        Method::Wncc => Some(make_kernel(
            kernel.unwrap_or_default(),
            template.width(),
            template.height(),
        )?),
        _ => None,
    };
    let t0 = Instant::now();
    let result = match_template_parallel(&global, &template, method, kernel.as_ref(), workers)?;
    let wall_time = t0.elapsed().as_secs_f64();

    ensure_parent(out)?;
    let heatmap = with_suffix(out, ".heatmap.pgm");
    result.field.write_heatmap_pgm(&heatmap)?;
    if color {
        result.field.write_heatmap_ppm(with_suffix(out, ".heatmap.ppm"))?;
    }
    let raw = with_suffix(out, ".scores.bin");
    result.field.write_raw(&raw)?;
    let summary = MatchSummary {
        best_u: result.best_u,
        best_v: result.best_v,
        best_score: result.best_score,
        wall_time,
    };
    let json = with_suffix(out, ".json");
    write_json(&summary, &json)?;
    Ok(MatchOutput {
        result,
        summary,
        heatmap,
        raw,
        json,
    })
}

#[derive(Clone, Debug)]
pub struct LocalizeOutput {
    pub run: LocalizationRun,
    pub rmse: Option<RmseReport>,
    pub trajectory: PathBuf,
    pub spread: PathBuf,
}

/// Loads the frames listed in a manifest. Relative local-map paths resolve
/// against the manifest's directory.
pub fn load_frames(manifest_path: &Path) -> Result<Vec<Frame>> {
    let base = manifest_path.parent().unwrap_or(Path::new(""));
    read_manifest(manifest_path)?
        .into_iter()
        .map(|e| {
            let path = if e.local_map_path.is_absolute() {
                e.local_map_path.clone()
            } else {
                base.join(&e.local_map_path)
            };
            Ok(Frame {
                index: e.frame,
                local: load_map(&path, DEFAULT_RESOLUTION)?,
                odometry: e.odometry(),
            })
        })
        .collect()
}

pub fn write_spread_csv(frames: &[Frame], spreads: &[f64], path: &Path) -> Result<()> {
    let to_err = |e: csv::Error| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(["frame", "spread"]).map_err(to_err)?;
    for (f, s) in frames.iter().zip(spreads) {
        w.write_record([f.index.to_string(), s.to_string()]).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Particle-filter replay of a recorded sequence.
///
/// Writes `<out>.trajectory.csv`, `<out>.spread.csv` and, when `truth` names
/// an existing trajectory file, `<out>.rmse.json`. `seed` and `workers`
/// override the config file.
pub fn cmd_localize(
    global_path: &Path,
    manifest_path: &Path,
    config_path: &Path,
    truth: Option<&Path>,
    seed: Option<u64>,
    workers: usize,
    out: &Path,
) -> Result<LocalizeOutput> {
    let global = load_map(global_path, DEFAULT_RESOLUTION)?;
    let frames = load_frames(manifest_path)?;
    let mut config = LocalizationConfig::load(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.workers = workers;
    let run = run_localization(&global, &frames, &config)?;

    ensure_parent(out)?;
    let trajectory = with_suffix(out, ".trajectory.csv");
    run.trajectory.write_csv(&trajectory)?;
    let spread = with_suffix(out, ".spread.csv");
    write_spread_csv(&frames, &run.spreads, &spread)?;
    let rmse = match truth.filter(|p| p.exists()) {
        Some(path) => {
            let report = compute_rmse(&run.trajectory, &Trajectory::read_csv(path)?, &config.method.to_string())?;
            write_json(&report, with_suffix(out, ".rmse.json"))?;
            Some(report)
        }
        None => None,
    };
    Ok(LocalizeOutput {
        run,
        rmse,
        trajectory,
        spread,
    })
}

/// Everything needed to regenerate a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub setup: SequenceSetup,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOutput {
    pub global: PathBuf,
    pub manifest: PathBuf,
    pub truth: PathBuf,
    pub localize_config: PathBuf,
    pub synth_config: PathBuf,
}

/// Writes a synthetic dataset under `dir`: `global.pgm`,
/// `frames/local_NNNN.pgm` with `.mask.pgm` sidecars, `manifest.csv`,
/// `truth.csv`, `synth.json` (generator settings) and `localize.json` (a
/// filter config seeded at the true start pose).
pub fn cmd_synth(config: &SynthConfig, dir: &Path) -> Result<SynthOutput> {
    let seq = make_sequence(config.seed, &config.setup)?;
    let frames_dir = dir.join("frames");
    std::fs::create_dir_all(&frames_dir).map_err(|e| Error::io(&frames_dir, e))?;

    let global = dir.join("global.pgm");
    write_map(&seq.global.clone().without_mask(), &global)?;
    let mut entries = Vec::with_capacity(seq.frames.len());
    for f in &seq.frames {
        let rel = PathBuf::from("frames").join(format!("local_{:04}.pgm", f.index));
        write_map(&f.local, dir.join(&rel))?;
        entries.push(ManifestEntry {
            frame: f.index,
            local_map_path: rel,
            dx: f.odometry.dx,
            dy: f.odometry.dy,
            dtheta: f.odometry.dtheta,
        });
    }
    let manifest = dir.join("manifest.csv");
    write_manifest(&entries, &manifest)?;
    let truth = dir.join("truth.csv");
    seq.truth.write_csv(&truth)?;
    let synth_config = dir.join("synth.json");
    write_json(config, &synth_config)?;
    let localize_config = dir.join("localize.json");
    let lc = localization_config(config.seed, &config.setup, &seq.truth, Method::Wncc);
    let mut text = lc.to_json();
    text.push('\n');
    std::fs::write(&localize_config, text).map_err(|e| Error::io(&localize_config, e))?;
    Ok(SynthOutput {
        global,
        manifest,
        truth,
        localize_config,
        synth_config,
    })
}

pub fn cmd_bench(config: &BenchConfig, out: &Path) -> Result<Vec<BenchReport>> {
    let reports = run_bench(config)?;
    ensure_parent(out)?;
    write_bench_csv(&reports, out)?;
    Ok(reports)
}

/// Named experiment suites run by `ortholoc eval`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    /// Whole-map matching of degraded templates, all four scorers.
    Pathology,
    /// NCC vs WNCC particle filter on degraded sequences.
    Localization,
    /// Swarm spread on noise-free sequences.
    Convergence,
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pathology" => Ok(Self::Pathology),
            "localization" => Ok(Self::Localization),
            "convergence" => Ok(Self::Convergence),
            _ => Err(Error::InvalidArgument(format!(
                "unknown experiment {s:?} (expected pathology, localization or convergence)"
            ))),
        }
    }
}

#[derive(Debug, Serialize)]
struct PathologyRow {
    seed: u64,
    method: Method,
    truth_u: usize,
    truth_v: usize,
    best_u: usize,
    best_v: usize,
    best_score: f64,
    error_px: f64,
}

#[derive(Debug, Serialize)]
struct LocalizationRow {
    seed: u64,
    method: Method,
    rmse: f64,
    final_error: f64,
}

#[derive(Debug, Serialize)]
struct ConvergenceRow {
    seed: u64,
    frame: usize,
    spread: f64,
    error: f64,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn csv_row<T: Serialize>(w: &mut csv::Writer<std::fs::File>, row: &T, path: &Path) -> Result<()> {
    w.serialize(row).map_err(|e| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Runs one experiment over the first `seeds` experiment seeds and writes a
/// per-seed CSV into `dir`. Returns the CSV path.
pub fn cmd_eval(experiment: Experiment, seeds: usize, workers: usize, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let seeds = &EXPERIMENT_SEEDS[..seeds.min(EXPERIMENT_SEEDS.len())];
    match experiment {
        Experiment::Pathology => {
            let path = dir.join("pathology.csv");
            let mut w = csv_writer(&path)?;
            let setup = MatchingSetup::default();
            for &seed in seeds {
                let trial = matching_trial(seed, &setup, &Method::ALL)?;
                for o in &trial.outcomes {
                    csv_row(
                        &mut w,
                        &PathologyRow {
                            seed,
                            method: o.method,
                            truth_u: trial.truth_u,
                            truth_v: trial.truth_v,
                            best_u: o.best_u,
                            best_v: o.best_v,
                            best_score: o.best_score,
                            error_px: o.error_px,
                        },
                        &path,
                    )?;
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            Ok(path)
        }
        Experiment::Localization => {
            let path = dir.join("localization.csv");
            let mut w = csv_writer(&path)?;
            let setup = SequenceSetup::default();
            for &seed in seeds {
                let seq = make_sequence(seed, &setup)?;
                for method in [Method::Ncc, Method::Wncc] {
                    let (t, _) = localization_trial_on(&seq, seed, &setup, method)?;
                    let row = LocalizationRow {
                        seed,
                        method,
                        rmse: t.rmse,
                        final_error: t.final_error,
                    };
                    csv_row(&mut w, &row, &path)?;
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            Ok(path)
        }
        Experiment::Convergence => {
            let path = dir.join("convergence.csv");
            let mut w = csv_writer(&path)?;
            let setup = SequenceSetup::noise_free();
            for &seed in seeds {
                let seq = make_sequence(seed, &setup)?;
                let config = LocalizationConfig {
                    workers,
                    ..localization_config(seed, &setup, &seq.truth, Method::Wncc)
                };
                let run = run_localization(&seq.global, &seq.frames, &config)?;
                for ((e, t), spread) in run.trajectory.entries().iter().zip(seq.truth.entries()).zip(&run.spreads) {
                    let row = ConvergenceRow {
                        seed,
                        frame: e.frame,
                        spread: *spread,
                        error: e.pose.distance(&t.pose),
                    };
                    csv_row(&mut w, &row, &path)?;
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            Ok(path)
        }
    }
}
