use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[derive(Default)]
pub enum KernelKind {
    /// `|2 - |M/2 - s| * |N/2 - t||` evaluated as printed, 1-based `s`, `t`.
    ///
    /// This grows away from the center; it exists for fidelity checks, not
    /// for localization.
    PaperLiteral,
    /// Separable triangular window: 1 on the center pixel(s), falling
    /// linearly to 0 on the outermost row and column.
    #[default]
    Corrected,
    Uniform,
}


impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::PaperLiteral => "paper-literal",
            KernelKind::Corrected => "corrected",
            KernelKind::Uniform => "uniform",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "paper-literal" | "literal" | "paper" => Ok(KernelKind::PaperLiteral),
            "corrected" => Ok(KernelKind::Corrected),
            "uniform" => Ok(KernelKind::Uniform),
            other => Err(Error::InvalidArgument(format!("unknown kernel kind {other:?}"))),
        }
    }
}

/// Per-pixel template weights, row-major with `m` columns and `n` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightKernel {
    m: usize,
    n: usize,
    kind: KernelKind,
    weights: Vec<f64>,
}

impl WeightKernel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at 0-based column `s` and row `t`.
    pub fn at(&self, s: usize, t: usize) -> f64 {
        self.weights[t * self.m + s]
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// Builds a kernel for an `m`-column by `n`-row template.
pub fn make_kernel(kind: KernelKind, m: usize, n: usize) -> Result<WeightKernel> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "kernel dimensions must be positive, got {m}x{n}"
        )));
    }
    let weights = match kind {
        KernelKind::Uniform => vec![1.0; m * n],
        KernelKind::PaperLiteral => {
            let (hm, hn) = (m as f64 / 2.0, n as f64 / 2.0);
            let mut w = Vec::with_capacity(m * n);
            for t in 1..=n {
                for s in 1..=m {
                    w.push((2.0 - (hm - s as f64).abs() * (hn - t as f64).abs()).abs());
                }
            }
            w
        }
        KernelKind::Corrected => {
            let cols = triangle(m);
            let rows = triangle(n);
            let mut w = Vec::with_capacity(m * n);
            for &wr in &rows {
                for &wc in &cols {
                    w.push(wr * wc);
                }
            }
            w
        }
    };
    Ok(WeightKernel { m, n, kind, weights })
}

/// 1D profile: 1 at the center pixel(s), 0 at both ends.
fn triangle(len: usize) -> Vec<f64> {
    let center = (len as f64 - 1.0) / 2.0;
    // even lengths have two center pixels half a pixel off the true center
    let inner = if len.is_multiple_of(2) { 0.5 } else { 0.0 };
    let span = center - inner;
    (0..len)
        .map(|i| {
            if span <= 0.0 {
                1.0
            } else {
                let r = (i as f64 - center).abs();
                (1.0 - (r - inner) / span).clamp(0.0, 1.0)
            }
        })
        .collect()
}
