//! Trajectory metrics, benchmarks, experiments and the command implementations
//! behind the `ortholoc` binary.

mod bench;
mod commands;
pub mod experiments;
mod metrics;

pub use bench::{bench_inputs, run_bench, write_bench_csv, BenchConfig, BenchReport};
pub use commands::{
    cmd_bench, cmd_eval, cmd_localize, cmd_match, cmd_synth, load_frames, with_suffix, write_json,
    write_spread_csv, Experiment, LocalizeOutput, MatchOutput, MatchSummary, SynthConfig, SynthOutput,
};
pub use metrics::{compute_rmse, RmseReport};
