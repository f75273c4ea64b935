//! Orthonormal 8x8 DCT-II and zigzag coefficient selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

pub const BLOCK: usize = 8;

/// Zigzag traversal of an 8x8 grid as (row, col) pairs, starting at the
/// top-left DC coefficient.
pub const ZIGZAG_ORDER: [(usize, usize); 64] = build_zigzag();

const fn build_zigzag() -> [(usize, usize); 64] {
    let mut order = [(0usize, 0usize); 64];
    let mut i = 0;
    let mut d = 0;
    while d < 15 {
        // even diagonals run bottom-left -> top-right, odd ones the reverse
        if d % 2 == 0 {
            let mut r = if d < 8 { d } else { 7 };
            loop {
                let c = d - r;
                if c < 8 {
                    order[i] = (r, c);
                    i += 1;
                }
                if r == 0 {
                    break;
                }
                r -= 1;
            }
        } else {
            let mut c = if d < 8 { d } else { 7 };
            loop {
                let r = d - c;
                if r < 8 {
                    order[i] = (r, c);
                    i += 1;
                }
                if c == 0 {
                    break;
                }
                c -= 1;
            }
        }
        d += 1;
    }
    order
}

/// Cosine basis table: `cos(pi * (2x + 1) * p / 16)`.
fn cos_table() -> &'static [[f64; BLOCK]; BLOCK] {
    static TABLE: std::sync::OnceLock<[[f64; BLOCK]; BLOCK]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0.0; BLOCK]; BLOCK];
        for p in 0..BLOCK {
            for x in 0..BLOCK {
                t[p][x] = (std::f64::consts::PI * (2.0 * x as f64 + 1.0) * p as f64 / 16.0).cos();
            }
        }
        t
    })
}

#[inline]
fn alpha(p: usize) -> f64 {
    if p == 0 {
        (1.0 / BLOCK as f64).sqrt()
    } else {
        (2.0 / BLOCK as f64).sqrt()
    }
}

/// Orthonormal 2D DCT-II of one 8x8 block, computed separably
/// (rows first, then columns). Index order is `B[p][q]` with `p` the
/// row frequency and `q` the column frequency.
pub fn dct2_block(block: &[[f64; BLOCK]; BLOCK]) -> [[f64; BLOCK]; BLOCK] {
    let cos = cos_table();
    // transform along rows: for each row x, G[x][q] = a_q sum_y f[x][y] cos(...)
    let mut rows = [[0.0; BLOCK]; BLOCK];
    for x in 0..BLOCK {
        for q in 0..BLOCK {
            let mut acc = 0.0;
            for y in 0..BLOCK {
                acc += block[x][y] * cos[q][y];
            }
            rows[x][q] = alpha(q) * acc;
        }
    }
    // transform along columns: B[p][q] = a_p sum_x G[x][q] cos(...)
    let mut out = [[0.0; BLOCK]; BLOCK];
    for q in 0..BLOCK {
        for p in 0..BLOCK {
            let mut acc = 0.0;
            for x in 0..BLOCK {
                acc += rows[x][q] * cos[p][x];
            }
            out[p][q] = alpha(p) * acc;
        }
    }
    out
}

/// Take the first `k` coefficients of the zigzag scan.
pub fn zigzag_select(coeffs: &[[f64; BLOCK]; BLOCK], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > 64 {
        return Err(Error::invalid(format!("zigzag count {k} outside 1..=64")));
    }
    Ok(ZIGZAG_ORDER[..k].iter().map(|&(r, c)| coeffs[r][c]).collect())
}

/// Parameters of the blockwise plate feature extractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DctConfig {
    /// Coefficients taken per block in zigzag order.
    pub coeffs_per_block: usize,
    /// Normalized plate width (columns), multiple of 8.
    pub plate_w: usize,
    /// Normalized plate height (rows), multiple of 8.
    pub plate_h: usize,
}

impl Default for DctConfig {
    fn default() -> Self {
        DctConfig {
            coeffs_per_block: 9,
            plate_w: 256,
            plate_h: 128,
        }
    }
}

impl DctConfig {
    pub fn validate(&self) -> Result<()> {
        if self.coeffs_per_block == 0 || self.coeffs_per_block > 64 {
            return Err(Error::invalid(format!(
                "coeffs_per_block {} outside 1..=64",
                self.coeffs_per_block
            )));
        }
        if self.plate_w == 0 || self.plate_w % BLOCK != 0 || self.plate_h == 0 || self.plate_h % BLOCK != 0
        {
            return Err(Error::invalid(format!(
                "plate dims {}x{} must be positive multiples of 8",
                self.plate_w, self.plate_h
            )));
        }
        Ok(())
    }

    pub fn feature_len(&self) -> usize {
        (self.plate_w / BLOCK) * (self.plate_h / BLOCK) * self.coeffs_per_block
    }

    pub fn extractor_id(&self) -> String {
        format!(
            "dct-{}x{}-k{}",
            self.plate_w, self.plate_h, self.coeffs_per_block
        )
    }
}

/// Blockwise DCT feature vector of a plate image already at
/// `cfg.plate_w x cfg.plate_h`. Blocks are scanned row-major; each
/// contributes its first `coeffs_per_block` zigzag coefficients.
pub fn dct_features(plate: &GrayImage, cfg: &DctConfig) -> Result<super::FeatureVector> {
    cfg.validate()?;
    if plate.width() != cfg.plate_w || plate.height() != cfg.plate_h {
        return Err(Error::invalid(format!(
            "plate is {}x{}, extractor expects {}x{}",
            plate.width(),
            plate.height(),
            cfg.plate_w,
            cfg.plate_h
        )));
    }
    let mut values = Vec::with_capacity(cfg.feature_len());
    let mut block = [[0.0; BLOCK]; BLOCK];
    for by in (0..cfg.plate_h).step_by(BLOCK) {
        for bx in (0..cfg.plate_w).step_by(BLOCK) {
            for (r, row) in block.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    *cell = plate.get(bx + c, by + r) as f64;
                }
            }
            let coeffs = dct2_block(&block);
            values.extend(zigzag_select(&coeffs, cfg.coeffs_per_block)?);
        }
    }
    super::FeatureVector::new(values, cfg.extractor_id())
}
