use super::{Channels, OrthoMap};
use crate::error::{Error, Result};

/// Surface sample of one elevation cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub height: f64,
    pub color: [u8; 3],
}

/// 2.5D grid: one surface height and color per cell, or nothing where the
/// sensor never observed the ground.
#[derive(Clone, Debug, PartialEq)]
pub struct ElevationGrid {
    cols: usize,
    rows: usize,
    cell_size: f64,
    cells: Vec<Option<Cell>>,
}

impl ElevationGrid {
    pub fn empty(cols: usize, rows: usize, cell_size: f64) -> Result<Self> {
        if cols == 0 || rows == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be positive, got {cols}x{rows}"
            )));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        let n = cols
            .checked_mul(rows)
            .ok_or_else(|| Error::InvalidGrid("dimension overflow".into()))?;
        Ok(Self {
            cols,
            rows,
            cell_size,
            cells: vec![None; n],
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn get(&self, col: usize, row: usize) -> Option<&Cell> {
        self.cells.get(row * self.cols + col)?.as_ref()
    }

    pub fn set(&mut self, col: usize, row: usize, cell: Option<Cell>) -> Result<()> {
        if col >= self.cols || row >= self.rows {
            return Err(Error::InvalidGrid(format!(
                "cell ({col}, {row}) outside {}x{} grid",
                self.cols, self.rows
            )));
        }
        if let Some(c) = &cell {
            if !c.height.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "cell ({col}, {row}) has non-finite height"
                )));
            }
        }
        self.cells[row * self.cols + col] = cell;
        Ok(())
    }

    /// Occupied cells in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, &Cell)> + '_ {
        self.cells.iter().enumerate().filter_map(move |(i, c)| {
            c.as_ref().map(|cell| (i % self.cols, i / self.cols, cell))
        })
    }
}

/// Orthographic top-down render with nearest-cell sampling.
///
/// Each output pixel takes the color of the cell under its center. Pixels over
/// empty cells are black and invalid in the mask.
pub fn render_orthomosaic(grid: &ElevationGrid, resolution: f64) -> Result<OrthoMap> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if grid.cells.iter().all(Option::is_none) {
        return Err(Error::NoSurface);
    }
    // tolerate ratios like 0.4 / 0.1 landing a hair above an integer
    let extent = |n: usize| ((n as f64 * grid.cell_size / resolution) - 1e-9).ceil().max(1.0) as usize;
    let width = extent(grid.cols);
    let height = extent(grid.rows);

    let cell_index = |p: usize, n: usize| {
        let pos = (p as f64 + 0.5) * resolution;
        ((pos / grid.cell_size).floor() as usize).min(n - 1)
    };
    let col_of: Vec<usize> = (0..width).map(|u| cell_index(u, grid.cols)).collect();

    let mut pixels = vec![0u8; width * height * 3];
    let mut mask = vec![false; width * height];
    for v in 0..height {
        let row = cell_index(v, grid.rows);
        for (u, &col) in col_of.iter().enumerate() {
            if let Some(cell) = &grid.cells[row * grid.cols + col] {
                let i = v * width + u;
                pixels[i * 3..i * 3 + 3].copy_from_slice(&cell.color);
                mask[i] = true;
            }
        }
    }
    OrthoMap::new(width, height, Channels::Rgb, pixels)?
        .with_resolution(resolution)?
        .with_mask(mask)
}
