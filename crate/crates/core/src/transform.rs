//! The 8x8 DCT viewed as a rotation of 64-dimensional space, zigzag ordering,
//! and the membership predicates for DCT configurations.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantization::tokens_with_columns;

fn parse_error(line: usize, column: usize, message: &str) -> Error {
    Error::Parse { line, column, message: message.to_string() }
}

/// Raster index (`8 * u + v`) of each zigzag position `k`.
#[rustfmt::skip]
pub const ZIGZAG: [usize; 64] = [
     0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
];

/// Zigzag position of each raster index.
pub fn raster_to_zigzag() -> [usize; 64] {
    let mut inv = [0; 64];
    for (k, &idx) in ZIGZAG.iter().enumerate() {
        inv[idx] = k;
    }
    inv
}

/// Reorders a raster-ordered 8x8 grid into zigzag order.
pub fn to_zigzag<T: Copy>(raster: &[T; 64]) -> [T; 64] {
    std::array::from_fn(|k| raster[ZIGZAG[k]])
}

pub fn from_zigzag<T: Copy + Default>(zz: &[T; 64]) -> [T; 64] {
    let mut out = [T::default(); 64];
    for (k, &idx) in ZIGZAG.iter().enumerate() {
        out[idx] = zz[k];
    }
    out
}

/// `K[x][u] = C(u)/2 * cos((2x + 1) u pi / 16)`.
pub fn dct_matrix() -> &'static [[f64; 8]; 8] {
    static K: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    K.get_or_init(|| {
        let mut k = [[0.0; 8]; 8];
        for (x, row) in k.iter_mut().enumerate() {
            for (u, cell) in row.iter_mut().enumerate() {
                let c = if u == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
                *cell = 0.5 * c * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        k
    })
}

/// Level-shifted pixel values in `[-128, 127]`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PixelBlock([[i16; 8]; 8]);

impl PixelBlock {
    pub fn new(values: [[i16; 8]; 8]) -> Result<Self> {
        for (x, row) in values.iter().enumerate() {
            for (y, &v) in row.iter().enumerate() {
                if !(-128..=127).contains(&v) {
                    return Err(Error::Parameter(format!("pixel ({x},{y}) = {v} outside [-128, 127]")));
                }
            }
        }
        Ok(PixelBlock(values))
    }

    /// Level-shifts unsigned 8-bit samples.
    pub fn from_samples(samples: [[u8; 8]; 8]) -> Self {
        PixelBlock(samples.map(|row| row.map(|v| i16::from(v) - 128)))
    }

    pub fn constant(level: i16) -> Result<Self> {
        Self::new([[level; 8]; 8])
    }

    /// Parses 8 lines of 8 whitespace-separated samples in `0..=255`, in
    /// raster order. Blank lines and lines starting with `#` are skipped.
    pub fn parse_samples(text: &str) -> Result<Self> {
        let mut rows: Vec<[u8; 8]> = Vec::with_capacity(8);
        let mut last_line = 1;
        for (ln, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let line_no = ln + 1;
            last_line = line_no;
            if rows.len() == 8 {
                return Err(parse_error(line_no, 1, "more than 8 rows"));
            }
            let mut row = [0u8; 8];
            let mut count = 0;
            for (col, tok) in tokens_with_columns(line) {
                if count == 8 {
                    return Err(parse_error(line_no, col, "more than 8 samples in row"));
                }
                row[count] = match tok.parse::<i64>() {
                    Ok(v) if (0..=255).contains(&v) => v as u8,
                    Ok(v) => return Err(parse_error(line_no, col, &format!("sample {v} outside 0..=255"))),
                    Err(_) => return Err(parse_error(line_no, col, &format!("`{tok}` is not an integer"))),
                };
                count += 1;
            }
            if count < 8 {
                return Err(parse_error(line_no, line.len() + 1, &format!("expected 8 samples, found {count}")));
            }
            rows.push(row);
        }
        if rows.len() < 8 {
            return Err(parse_error(last_line, 1, &format!("expected 8 rows, found {}", rows.len())));
        }
        Ok(Self::from_samples(std::array::from_fn(|i| rows[i])))
    }

    pub fn values(&self) -> &[[i16; 8]; 8] {
        &self.0
    }

    pub fn get(&self, x: usize, y: usize) -> i16 {
        self.0[x][y]
    }

    /// Sets one pixel, clamping to the valid range.
    pub fn set_clamped(&mut self, x: usize, y: usize, v: i32) {
        self.0[x][y] = v.clamp(-128, 127) as i16;
    }

    pub fn samples(&self) -> [[u8; 8]; 8] {
        self.0.map(|row| row.map(|v| (v + 128) as u8))
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().flatten().map(|&v| f64::from(v) * f64::from(v)).sum()
    }
}

/// DCT coefficients `F_uv`, row-major by `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DctConfig(pub [[f64; 8]; 8]);

impl DctConfig {
    pub fn zeros() -> Self {
        DctConfig([[0.0; 8]; 8])
    }

    pub fn from_zigzag(zz: &[f64; 64]) -> Self {
        let raster = from_zigzag(zz);
        DctConfig(std::array::from_fn(|u| std::array::from_fn(|v| raster[8 * u + v])))
    }

    /// Coefficient at zigzag position `k` (0 is DC).
    pub fn zigzag(&self, k: usize) -> f64 {
        let idx = ZIGZAG[k];
        self.0[idx / 8][idx % 8]
    }

    pub fn to_zigzag(&self) -> [f64; 64] {
        std::array::from_fn(|k| self.zigzag(k))
    }

    pub fn dc(&self) -> f64 {
        self.0[0][0]
    }

    pub fn ac_energy(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>() - self.0[0][0] * self.0[0][0]
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum()
    }
}

/// `F = K^T f K`.
pub fn forward_dct(block: &PixelBlock) -> DctConfig {
    let k = dct_matrix();
    let f = block.values();
    // tmp[u][y] = sum_x K[x][u] f[x][y]
    let mut tmp = [[0.0; 8]; 8];
    for u in 0..8 {
        for y in 0..8 {
            tmp[u][y] = (0..8).map(|x| k[x][u] * f64::from(f[x][y])).sum();
        }
    }
    let mut out = [[0.0; 8]; 8];
    for u in 0..8 {
        for v in 0..8 {
            out[u][v] = (0..8).map(|y| tmp[u][y] * k[y][v]).sum();
        }
    }
    DctConfig(out)
}

/// `f = K F K^T`.
pub fn inverse_dct(config: &DctConfig) -> [[f64; 8]; 8] {
    let k = dct_matrix();
    let f = &config.0;
    let mut tmp = [[0.0; 8]; 8];
    for x in 0..8 {
        for v in 0..8 {
            tmp[x][v] = (0..8).map(|u| k[x][u] * f[u][v]).sum();
        }
    }
    let mut out = [[0.0; 8]; 8];
    for x in 0..8 {
        for y in 0..8 {
            out[x][y] = (0..8).map(|v| tmp[x][v] * k[y][v]).sum();
        }
    }
    out
}

/// Strict AC energy bound `sum_{(u,v) != (0,0)} F_uv^2 < 2^20`.
pub fn ac_ball_condition(config: &DctConfig) -> bool {
    config.ac_energy() < f64::from(1u32 << 20)
}

const CUBE_TOL: f64 = 1e-9;

/// Every inverse-transformed entry lies in `[-128, 128]`, both ends inclusive.
pub fn cube_condition(config: &DctConfig) -> bool {
    inverse_dct(config).iter().flatten().all(|&v| (-128.0 - CUBE_TOL..=128.0 + CUBE_TOL).contains(&v))
}

/// Every inverse-transformed entry is within `tol` of an integer.
pub fn integer_condition(config: &DctConfig, tol: f64) -> bool {
    inverse_dct(config).iter().flatten().all(|&v| (v - v.round()).abs() <= tol)
}
