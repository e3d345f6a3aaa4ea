//! Pixmap and CSV persistence.
//!
//! Grayscale maps are binary P5 PGM, color maps binary P6 PPM. A validity mask
//! travels as a sidecar P5 PGM named `<stem>.mask.pgm` (255 valid, 0 invalid).
//! Elevation grids are CSV `col,row,height,r,g,b` with empty cells omitted.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, ExtendedColorType, ImageDecoder, ImageEncoder};
use serde::{Deserialize, Serialize};

use super::{Cell, Channels, ElevationGrid, OrthoMap};
use crate::error::{Error, Result};

/// Sidecar mask location for a map file: `dir/<stem>.mask.pgm`.
pub fn mask_path_for(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.mask.pgm"))
}

fn malformed(path: &Path, reason: impl ToString) -> Error {
    Error::MalformedPixmap {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn read_pixmap(path: &Path) -> Result<(usize, usize, Channels, Vec<u8>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let decoder = PnmDecoder::new(BufReader::new(file)).map_err(|e| malformed(path, e))?;
    let (w, h) = decoder.dimensions();
    let channels = match decoder.color_type() {
        ColorType::L8 => Channels::Gray,
        ColorType::Rgb8 => Channels::Rgb,
        other => return Err(malformed(path, format!("unsupported sample layout {other:?}"))),
    };
    let len = (w as usize)
        .checked_mul(h as usize)
        .and_then(|n| n.checked_mul(channels.count()))
        .filter(|&n| n as u64 == decoder.total_bytes())
        .ok_or_else(|| malformed(path, "dimension overflow"))?;
    if len as u64 > file_len {
        return Err(malformed(
            path,
            format!("header declares {len} samples but the file holds {file_len} bytes"),
        ));
    }
    let mut buf = vec![0u8; len];
    decoder
        .read_image(&mut buf)
        .map_err(|e| malformed(path, e))?;
    Ok((w as usize, h as usize, channels, buf))
}

/// Loads a P5/P6 map, plus its sidecar mask when one exists.
pub fn load_map(path: impl AsRef<Path>, resolution: f64) -> Result<OrthoMap> {
    let path = path.as_ref();
    let (w, h, channels, pixels) = read_pixmap(path)?;
    let mut map = OrthoMap::new(w, h, channels, pixels)?.with_resolution(resolution)?;
    let mask_path = mask_path_for(path);
    if mask_path != path && mask_path.exists() {
        let (mw, mh, mc, mp) = read_pixmap(&mask_path)?;
        if mc != Channels::Gray || mw != w || mh != h {
            return Err(malformed(
                &mask_path,
                format!("mask must be a {w}x{h} graymap"),
            ));
        }
        map = map.with_mask(mp.into_iter().map(|p| p >= 128).collect())?;
    }
    Ok(map)
}

fn write_pnm(path: &Path, w: usize, h: usize, channels: Channels, data: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let (subtype, color) = match channels {
        Channels::Gray => (PnmSubtype::Graymap(SampleEncoding::Binary), ExtendedColorType::L8),
        Channels::Rgb => (PnmSubtype::Pixmap(SampleEncoding::Binary), ExtendedColorType::Rgb8),
    };
    PnmEncoder::new(&mut out)
        .with_subtype(subtype)
        .write_image(data, w as u32, h as u32, color)
        .map_err(|e| malformed(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Raw 8-bit graymap.
pub fn write_pgm(path: impl AsRef<Path>, w: usize, h: usize, data: &[u8]) -> Result<()> {
    write_pnm(path.as_ref(), w, h, Channels::Gray, data)
}

/// Raw 24-bit pixmap.
pub fn write_ppm(path: impl AsRef<Path>, w: usize, h: usize, data: &[u8]) -> Result<()> {
    write_pnm(path.as_ref(), w, h, Channels::Rgb, data)
}

/// Writes the map and, if it carries one, the sidecar mask.
pub fn write_map(map: &OrthoMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_pnm(path, map.width(), map.height(), map.channels(), map.pixels())?;
    if let Some(mask) = map.mask() {
        let bytes: Vec<u8> = mask.iter().map(|&b| if b { 255 } else { 0 }).collect();
        write_pgm(mask_path_for(path), map.width(), map.height(), &bytes)?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct CellRecord {
    col: usize,
    row: usize,
    height: f64,
    r: u8,
    g: u8,
    b: u8,
}

/// Reads an elevation CSV. Grid extent is the largest listed index plus one
/// unless `dims` pins it.
pub fn load_elevation_csv(
    path: impl AsRef<Path>,
    cell_size: f64,
    dims: Option<(usize, usize)>,
) -> Result<ElevationGrid> {
    let path = path.as_ref();
    let bad = |reason: String| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let records = reader
        .deserialize::<CellRecord>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| bad(e.to_string()))?;
    let (cols, rows) = match dims {
        Some(d) => d,
        None => records.iter().fold((0, 0), |(c, r), rec| {
            (c.max(rec.col + 1), r.max(rec.row + 1))
        }),
    };
    if cols == 0 || rows == 0 {
        return Err(Error::NoSurface);
    }
    let mut grid = ElevationGrid::empty(cols, rows, cell_size)?;
    for rec in records {
        grid.set(
            rec.col,
            rec.row,
            Some(Cell {
                height: rec.height,
                color: [rec.r, rec.g, rec.b],
            }),
        )?;
    }
    Ok(grid)
}

pub fn write_elevation_csv(grid: &ElevationGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let to_err = |e: csv::Error| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut writer = csv::Writer::from_path(path).map_err(to_err)?;
    for (col, row, cell) in grid.occupied() {
        writer
            .serialize(CellRecord {
                col,
                row,
                height: cell.height,
                r: cell.color[0],
                g: cell.color[1],
                b: cell.color[2],
            })
            .map_err(to_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
