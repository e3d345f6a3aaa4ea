//! Write a synthetic dataset to disk and replay it through the same file
//! interfaces the CLI uses.

use ortholoc::eval::experiments::SequenceSetup;
use ortholoc::eval::{cmd_localize, cmd_synth, SynthConfig};

fn main() -> ortholoc::Result<()> {
    let dir = std::env::temp_dir().join("ortholoc_synth");
    let config = SynthConfig {
        seed: 3,
        setup: SequenceSetup {
            frames: 20,
            particles: 500,
            ..SequenceSetup::noise_free()
        },
    };
    let files = cmd_synth(&config, &dir)?;
    println!("dataset in {}", dir.display());

    let out = cmd_localize(
        &files.global,
        &files.manifest,
        &files.localize_config,
        Some(&files.truth),
        None,
        1,
        &dir.join("replay"),
    )?;
    println!("trajectory -> {}", out.trajectory.display());
    if let Some(r) = out.rmse {
        println!("{} RMSE {:.3} m over {} frames", r.method, r.rmse, r.per_frame_errors.len());
    }
    Ok(())
}
