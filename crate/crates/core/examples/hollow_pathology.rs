//! Whole-map matching of degraded ground templates: how far each scorer's
//! optimum lands from the true placement.

use ortholoc::eval::experiments::{matching_trial, MatchingSetup, EXPERIMENT_SEEDS};
use ortholoc::matching::Method;

fn main() -> ortholoc::Result<()> {
    let seeds: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let setup = MatchingSetup::default();
    println!("degradation {:?}", setup.degradation);
    println!("{:>5} {:>9} {:>9} {:>9} {:>9}", "seed", "SSD", "SAD", "NCC", "WNCC");
    for &seed in EXPERIMENT_SEEDS.iter().take(seeds) {
        let t = matching_trial(seed, &setup, &Method::ALL)?;
        let e = |m| t.error(m).unwrap_or(f64::NAN);
        println!(
            "{seed:>5} {:>9.1} {:>9.1} {:>9.1} {:>9.1}",
            e(Method::Ssd),
            e(Method::Sad),
            e(Method::Ncc),
            e(Method::Wncc)
        );
    }
    Ok(())
}
