//! Diagnostic rasters: 8-bit grayscale time images and RGB label mosaics.
//!
//! Rows follow the first grid axis and columns the second; a 1-d field is a
//! single row and a 3-d field is imaged at one index of the last axis.

use crate::format::FieldFile;

/// A 2-d view into a field file.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub width: u32,
    pub height: u32,
    offset: usize,
    stride: usize,
}

impl Plane {
    /// `slice` selects the last-axis index for 3-d fields (middle by default).
    pub fn of(file: &FieldFile, slice: Option<u32>) -> Plane {
        let r = &file.resolution;
        match r.len() {
            1 => Plane { width: r[0], height: 1, offset: 0, stride: 1 },
            2 => Plane { width: r[1], height: r[0], offset: 0, stride: 1 },
            _ => {
                let k = slice.unwrap_or(r[2] / 2).min(r[2] - 1) as usize;
                Plane { width: r[1], height: r[0], offset: k, stride: r[2] as usize }
            }
        }
    }

    /// Flat field index of pixel `(row, col)`.
    pub fn index(&self, row: u32, col: u32) -> usize {
        self.offset + (row as usize * self.width as usize + col as usize) * self.stride
    }

    fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| self.index(r, c)))
    }
}

/// Gray levels: absent cells are 0, present values map linearly onto 1..=255
/// between the plane's minimum and maximum.
pub fn gray_levels(file: &FieldFile, plane: &Plane) -> Vec<u8> {
    let present: Vec<f64> = plane.indices().filter_map(|i| file.value(i)).collect();
    let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    plane
        .indices()
        .map(|i| match file.value(i) {
            None => 0,
            Some(_) if hi <= lo => 255,
            Some(v) => 1 + ((v - lo) / (hi - lo) * 254.0).round() as u8,
        })
        .collect()
}

/// Binary PGM (P5).
pub fn pgm_bytes(file: &FieldFile, plane: &Plane) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", plane.width, plane.height).into_bytes();
    out.extend(gray_levels(file, plane));
    out
}

/// Deterministic 24-bit colour for a germ index.
pub fn palette(label: u32) -> [u8; 3] {
    let c = (label as u64).wrapping_mul(2_654_435_761) % (1 << 24);
    [(c >> 16) as u8, (c >> 8) as u8, c as u8]
}

/// RGB PNG of the mosaic labels; absent cells are black.
pub fn label_png_bytes(file: &FieldFile, plane: &Plane) -> Result<Vec<u8>, png::EncodingError> {
    let rgb: Vec<u8> = plane
        .indices()
        .flat_map(|i| file.label(i).map_or([0, 0, 0], palette))
        .collect();
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, plane.width, plane.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&rgb)?;
    }
    Ok(out)
}
