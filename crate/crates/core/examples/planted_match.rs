//! Crop a window out of a synthetic aerial map and find it again with each
//! scorer. Heatmaps land in the system temp directory.

use ortholoc::matching::{make_kernel, match_template, KernelKind, Method};
use ortholoc::synthdata::{gen_global, SceneSpec};

fn main() -> ortholoc::Result<()> {
    let global = gen_global(&SceneSpec {
        width: 256,
        height: 256,
        ..SceneSpec::with_seed(5)
    })?;
    let (u, v) = (141, 62);
    let template = global.crop_window(u, v, 32, 32)?;
    let kernel = make_kernel(KernelKind::Corrected, 32, 32)?;
    let dir = std::env::temp_dir();

    println!("planted at ({u}, {v})");
    for method in Method::ALL {
        let r = match_template(&global, &template, method, Some(&kernel))?;
        let path = dir.join(format!("planted_{}.pgm", method.to_string().to_lowercase()));
        r.field.write_heatmap_pgm(&path)?;
        println!(
            "{method:<4} best ({:3}, {:3}) score {:>12.4}  heatmap {}",
            r.best_u,
            r.best_v,
            r.best_score,
            path.display()
        );
    }
    // weights only enter the numerator, so a center-weighted kernel caps the
    // self-match below 1 and other windows can outscore it
    let uniform = make_kernel(KernelKind::Uniform, 32, 32)?;
    let r = match_template(&global, &template, Method::Wncc, Some(&uniform))?;
    println!("WNCC with uniform kernel: best ({}, {}) score {:.4}", r.best_u, r.best_v, r.best_score);
    Ok(())
}
