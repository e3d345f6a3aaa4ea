//! Time a WNCC whole-map search at increasing worker counts and check the
//! score fields stay bit-identical.

use std::time::Instant;

use ortholoc::eval::bench_inputs;
use ortholoc::matching::{make_kernel, match_template_parallel, KernelKind, Method};

fn main() -> ortholoc::Result<()> {
    let (map, template) = bench_inputs(512, 64, 0)?;
    let kernel = make_kernel(KernelKind::Corrected, 64, 64)?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("{cores} core(s) available");

    let mut baseline = None;
    for workers in [1, 2, 4, 8] {
        let t0 = Instant::now();
        let r = match_template_parallel(&map, &template, Method::Wncc, Some(&kernel), workers)?;
        let dt = t0.elapsed().as_secs_f64();
        let (t1, field) = baseline.get_or_insert((dt, r.field.clone()));
        let same = field.scores().iter().zip(r.field.scores()).all(|(a, b)| a.to_bits() == b.to_bits());
        println!("workers {workers}: {dt:.3}s, speedup {:.2}x, identical {same}", *t1 / dt);
    }
    Ok(())
}
