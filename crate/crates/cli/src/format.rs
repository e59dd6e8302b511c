//! JMF1 binary field files.
//!
//! Layout, all little-endian: magic `JMF1`; u32 d; f64 x 2d window bounds
//! (lo then hi); u32 x d resolution; u64 seed; u8 certified; row-major f64
//! times (NaN = absent); row-major u32 labels (`0xFFFFFFFF` = absent).

use std::io::{Read, Write};

use jmfield_core::field::ABSENT_LABEL;
use jmfield_core::FieldGrid;

pub const MAGIC: &[u8; 4] = b"JMF1";

#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub dim: u32,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<u32>,
    pub seed: u64,
    pub certified: bool,
    pub values: Vec<f64>,
    pub labels: Vec<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("not a JMF1 file")]
    Magic,
    #[error("unsupported dimension {0}")]
    Dimension(u32),
    #[error("truncated or oversized payload")]
    Length,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Exact file size for a grid of `cells` points in dimension `dim`.
pub fn encoded_len(dim: usize, cells: usize) -> usize {
    4 + 4 + 16 * dim + 4 * dim + 8 + 1 + 12 * cells
}

impl FieldFile {
    pub fn from_grid(field: &FieldGrid) -> Self {
        let d = field.grid.dim;
        FieldFile {
            dim: d as u32,
            lo: field.grid.lo.coords(d).to_vec(),
            hi: field.grid.hi.coords(d).to_vec(),
            resolution: field.grid.resolution[..d].to_vec(),
            seed: field.seed,
            certified: field.certified,
            values: field.values.clone(),
            labels: field.labels.clone(),
        }
    }

    pub fn cells(&self) -> usize {
        self.resolution.iter().map(|&r| r as usize).product()
    }

    pub fn value(&self, i: usize) -> Option<f64> {
        let v = self.values[i];
        (!v.is_nan()).then_some(v)
    }

    pub fn label(&self, i: usize) -> Option<u32> {
        let l = self.labels[i];
        (l != ABSENT_LABEL).then_some(l)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(encoded_len(self.dim as usize, self.values.len()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.dim.to_le_bytes());
        for v in self.lo.iter().chain(&self.hi) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for r in &self.resolution {
            out.extend_from_slice(&r.to_le_bytes());
        }
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.push(self.certified as u8);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for l in &self.labels {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&self.to_bytes())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self, FormatError> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self, FormatError> {
        let mut cur = Cursor { buf, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(FormatError::Magic);
        }
        let dim = cur.u32()?;
        if !(1..=3).contains(&dim) {
            return Err(FormatError::Dimension(dim));
        }
        let d = dim as usize;
        let lo = (0..d).map(|_| cur.f64()).collect::<Result<Vec<_>, _>>()?;
        let hi = (0..d).map(|_| cur.f64()).collect::<Result<Vec<_>, _>>()?;
        let resolution = (0..d).map(|_| cur.u32()).collect::<Result<Vec<_>, _>>()?;
        let seed = cur.u64()?;
        let certified = cur.take(1)?[0] != 0;
        let n = resolution
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r as usize))
            .ok_or(FormatError::Length)?;
        if buf.len() != encoded_len(d, n) {
            return Err(FormatError::Length);
        }
        let values = (0..n).map(|_| cur.f64()).collect::<Result<Vec<_>, _>>()?;
        let labels = (0..n).map(|_| cur.u32()).collect::<Result<Vec<_>, _>>()?;
        Ok(FieldFile { dim, lo, hi, resolution, seed, certified, values, labels })
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let s = self.buf.get(self.pos..self.pos + n).ok_or(FormatError::Length)?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
