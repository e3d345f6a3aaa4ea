//! Print the three weight kernels on a small template. The printed formula
//! grows toward the corners; the corrected one peaks at the center.

use ortholoc::matching::{make_kernel, KernelKind};

fn main() -> ortholoc::Result<()> {
    let (m, n) = (8, 8);
    for kind in [KernelKind::PaperLiteral, KernelKind::Corrected, KernelKind::Uniform] {
        let k = make_kernel(kind, m, n)?;
        println!("{kind} (max {:.3})", k.max_weight());
        for t in 0..n {
            let row: Vec<String> = (0..m).map(|s| format!("{:6.3}", k.at(s, t))).collect();
            println!("  {}", row.join(" "));
        }
    }
    Ok(())
}
