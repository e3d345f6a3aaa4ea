use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ortholoc::eval::{
    cmd_bench, cmd_eval, cmd_localize, cmd_match, cmd_synth, experiments::SequenceSetup, BenchConfig,
    Experiment, SynthConfig,
};
use ortholoc::matching::{KernelKind, Method};
use ortholoc::synthdata::SceneSpec;

/// Aerial/ground orthomosaic matching and particle-filter localization.
#[derive(Parser)]
#[command(name = "ortholoc", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for matching and particle scoring.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Output prefix (match, localize), directory (synth, eval) or file (bench).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a template at every placement in a map.
    Match {
        #[arg(long)]
        global: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long, default_value_t = Method::Wncc)]
        method: Method,
        /// Weight kernel for WNCC: paper-literal, corrected or uniform.
        #[arg(long)]
        kernel: Option<KernelKind>,
        /// Also write a color heatmap.
        #[arg(long)]
        color: bool,
    },
    /// Replay a frame manifest through the particle filter.
    Localize {
        #[arg(long)]
        global: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Ground-truth trajectory CSV; RMSE is reported when it exists.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Generate a synthetic global map, frame sequence and ground truth.
    Synth {
        #[arg(long, default_value_t = 50)]
        frames: usize,
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 64)]
        local_size: usize,
        /// Meters between frames.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Exact crops and exact odometry.
        #[arg(long)]
        noise_free: bool,
    },
    /// Time the scorers.
    Bench {
        /// Comma-separated MAPxTEMPLATE sides, e.g. 256x32,512x64.
        #[arg(long, default_value = "256x32", value_delimiter = ',')]
        sizes: Vec<String>,
        #[arg(long, default_value = "SSD,SAD,NCC,WNCC", value_delimiter = ',')]
        methods: Vec<Method>,
        /// Worker counts to time; defaults to --workers.
        #[arg(long, value_delimiter = ',')]
        workers_list: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
    /// Run a seeded experiment suite: pathology, localization or convergence.
    Eval {
        experiment: Experiment,
        /// How many of the 20 experiment seeds to use.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("bad size {s:?}, expected MAPxTEMPLATE"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad size {s:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let out = |default: &str| cli.out.clone().unwrap_or_else(|| PathBuf::from(default));
    match cli.command {
        Command::Match {
            global,
            template,
            method,
            kernel,
            color,
        } => {
            let o = cmd_match(&global, &template, method, kernel, cli.workers, &out("match"), color)?;
            println!(
                "best ({}, {}) score {} in {:.3}s -> {}",
                o.summary.best_u,
                o.summary.best_v,
                o.summary.best_score,
                o.summary.wall_time,
                o.json.display()
            );
        }
        Command::Localize {
            global,
            manifest,
            config,
            truth,
        } => {
            if let Some(t) = truth.as_ref().filter(|t| !t.exists()) {
                eprintln!("ground truth {} not found; skipping RMSE", t.display());
            }
            let o = cmd_localize(&global, &manifest, &config, truth.as_deref(), cli.seed, cli.workers, &out("localize"))?;
            println!("{} frames -> {}", o.run.trajectory.len(), o.trajectory.display());
            if let Some(r) = o.rmse {
                println!("{} RMSE {:.4} m", r.method, r.rmse);
            }
        }
        Command::Synth {
            frames,
            size,
            local_size,
            step,
            noise_free,
        } => {
            let base = if noise_free {
                SequenceSetup::noise_free()
            } else {
                SequenceSetup::default()
            };
            let config = SynthConfig {
                seed: cli.seed.unwrap_or(0),
                setup: SequenceSetup {
                    scene: SceneSpec {
                        width: size,
                        height: size,
                        ..base.scene
                    },
                    frames,
                    step,
                    local_size,
                    ..base
                },
            };
            let o = cmd_synth(&config, &out("synth"))?;
            println!("wrote {} and {}", o.global.display(), o.manifest.display());
        }
        Command::Bench {
            sizes,
            methods,
            workers_list,
            repetitions,
        } => {
            let config = BenchConfig {
                sizes: sizes.iter().map(|s| parse_size(s)).collect::<Result<_, _>>()?,
                methods,
                workers: if workers_list.is_empty() {
                    vec![cli.workers]
                } else {
                    workers_list
                },
                repetitions,
                seed: cli.seed.unwrap_or(0),
            };
            for r in cmd_bench(&config, &out("bench.csv"))? {
                println!(
                    "{:<4} {}x{} / {}x{} workers {}: {:.4}s ({:.0} placements/s)",
                    r.method, r.map_w, r.map_h, r.template_w, r.template_h, r.workers, r.wall_time, r.placements_per_second
                );
            }
        }
        Command::Eval { experiment, seeds } => {
            let path = cmd_eval(experiment, seeds, cli.workers, &out("eval"))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
