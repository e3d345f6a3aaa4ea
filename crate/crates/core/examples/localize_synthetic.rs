//! Particle-filter localization on a synthetic drive, NCC against WNCC, with
//! dead reckoning for reference.

use ortholoc::eval::compute_rmse;
use ortholoc::eval::experiments::{localization_trial_on, make_sequence, SequenceSetup};
use ortholoc::localization::{OdometryDelta, Trajectory};
use ortholoc::matching::Method;
use ortholoc::synthdata::dead_reckon;

fn main() -> ortholoc::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(11);
    let setup = SequenceSetup {
        particles: 500,
        ..SequenceSetup::default()
    };
    let seq = make_sequence(seed, &setup)?;

    let odometry: Vec<OdometryDelta> = seq.frames[1..].iter().map(|f| f.odometry).collect();
    let dr = Trajectory::from_poses(dead_reckon(seq.truth.entries()[0].pose, &odometry));
    println!("dead reckoning RMSE {:.3} m", compute_rmse(&dr, &seq.truth, "odometry")?.rmse);

    for method in [Method::Ncc, Method::Wncc] {
        let (trial, _) = localization_trial_on(&seq, seed, &setup, method)?;
        println!(
            "{method:<4} RMSE {:.3} m, final error {:.3} m, spread {:.3} -> {:.3} m",
            trial.rmse,
            trial.final_error,
            trial.spreads[0],
            trial.spreads.last().copied().unwrap_or_default()
        );
    }
    Ok(())
}
