//! Rasterize a small elevation grid into an orthomosaic with a validity mask.

use ortholoc::gridmap::{render_orthomosaic, write_map, Cell, ElevationGrid};

fn main() -> ortholoc::Result<()> {
    // 0.2 m cells rendered at 0.1 m/px; every fifth column left empty
    let mut grid = ElevationGrid::empty(40, 30, 0.2)?;
    for row in 0..30 {
        for col in 0..40 {
            if col % 5 == 4 {
                continue;
            }
            let shade = (60 + 4 * col + 2 * row) as u8;
            let cell = Cell {
                height: 0.01 * col as f64,
                color: [shade, shade / 2, 255 - shade],
            };
            grid.set(col, row, Some(cell))?;
        }
    }
    let map = render_orthomosaic(&grid, 0.1)?;
    let path = std::env::temp_dir().join("elevation.ppm");
    write_map(&map, &path)?;
    println!(
        "{}x{} px, {:.1}% valid -> {}",
        map.width(),
        map.height(),
        100.0 * map.valid_fraction(),
        path.display()
    );
    Ok(())
}
