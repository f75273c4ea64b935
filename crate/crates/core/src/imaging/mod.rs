//! Pixel-level primitives shared by every stage: grayscale conversion,
//! Prewitt edge maps, binary dilation, Otsu thresholding, connected
//! component labeling, rotation, resizing and cropping.
//!
//! All operations are pure functions of their inputs; images are plain
//! immutable buffers that are cheap to clone and safe to share across
//! threads.

mod ccl;
pub mod io;

pub use ccl::{connected_components, Component, ComponentLabeling, Connectivity};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

/// Binary mask, row-major, `true` = foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

/// Interleaved 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

/// Axis-aligned bounding box in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BBox {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        BBox { x, y, w, h }
    }

    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// Intersection-over-union of two boxes.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix0 = self.x.max(other.x);
        let iy0 = self.y.max(other.y);
        let ix1 = self.right().min(other.right());
        let iy1 = self.bottom().min(other.bottom());
        if ix1 <= ix0 || iy1 <= iy0 {
            return 0.0;
        }
        let inter = ((ix1 - ix0) * (iy1 - iy0)) as f64;
        let union = (self.area() + other.area()) as f64 - inter;
        inter / union
    }

    /// Grow the box by `step` pixels on every side, clamped to `w x h`.
    pub fn grown(&self, step: usize, bound_w: usize, bound_h: usize) -> BBox {
        let x0 = self.x.saturating_sub(step);
        let y0 = self.y.saturating_sub(step);
        let x1 = (self.x + self.w + step).min(bound_w);
        let y1 = (self.y + self.h + step).min(bound_h);
        BBox::new(x0, y0, x1 - x0, y1 - y0)
    }

    /// Shift by (dx, dy), saturating at zero.
    pub fn shifted(&self, dx: i64, dy: i64) -> BBox {
        BBox::new(
            (self.x as i64 + dx).max(0) as usize,
            (self.y as i64 + dy).max(0) as usize,
            self.w,
            self.h,
        )
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        GrayImage {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    /// Replicate-border access for convolution.
    #[inline]
    fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let xc = x.clamp(0, self.width as i64 - 1) as usize;
        let yc = y.clamp(0, self.height as i64 - 1) as usize;
        self.get(xc, yc)
    }

    /// Bilinear sample at fractional coordinates; `None` outside the image.
    #[inline]
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Option<f64> {
        if x < 0.0 || y < 0.0 || x > (self.width - 1) as f64 || y > (self.height - 1) as f64 {
            return None;
        }
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let p00 = self.get(x0, y0) as f64;
        let p10 = self.get(x1, y0) as f64;
        let p01 = self.get(x0, y1) as f64;
        let p11 = self.get(x1, y1) as f64;
        let top = p00 + (p10 - p00) * fx;
        let bot = p01 + (p11 - p01) * fx;
        Some(top + (bot - top) * fy)
    }
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        BinaryImage {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "mask buffer length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Foreground count restricted to `bx` (box must lie within the image).
    pub fn count_in_box(&self, bx: &BBox) -> usize {
        let mut n = 0;
        for y in bx.y..bx.bottom().min(self.height) {
            let row = &self.data[y * self.width..(y + 1) * self.width];
            for cell in &row[bx.x..bx.right().min(self.width)] {
                if *cell {
                    n += 1;
                }
            }
        }
        n
    }

    /// View the mask as a 0/255 grayscale image.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }
}

impl RgbImage {
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::invalid(format!(
                "rgb buffer length {} does not match {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> (u8, u8, u8) {
        let i = (y * self.width + x) * 3;
        (self.data[i], self.data[i + 1], self.data[i + 2])
    }
}

/// ITU-R 601 luma conversion, rounded to the nearest integer.
pub fn to_grayscale(rgb: &RgbImage) -> Result<GrayImage> {
    if rgb.width == 0 || rgb.height == 0 {
        return Err(Error::EmptyInput);
    }
    let mut data = Vec::with_capacity(rgb.width * rgb.height);
    for px in rgb.data.chunks_exact(3) {
        let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
        data.push(y.round().clamp(0.0, 255.0) as u8);
    }
    Ok(GrayImage {
        width: rgb.width,
        height: rgb.height,
        data,
    })
}

/// Raw Prewitt gradient responses (correlation, replicate border).
///
/// `gx` responds to vertical lines (derivative along x), `gy` to
/// horizontal lines (derivative along y).
pub fn prewitt_gradients(img: &GrayImage) -> Result<(Vec<i32>, Vec<i32>)> {
    if img.width < 3 || img.height < 3 {
        return Err(Error::ImageTooSmall {
            width: img.width,
            height: img.height,
            min_width: 3,
            min_height: 3,
        });
    }
    let (w, h) = (img.width, img.height);
    let mut gx = vec![0i32; w * h];
    let mut gy = vec![0i32; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut sx = 0i32;
            let mut sy = 0i32;
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let v = img.get_clamped(x + dx, y + dy) as i32;
                    // x kernel: [1 0 -1] columns; y kernel: [1 0 -1] rows
                    sx += v * (-dx as i32);
                    sy += v * (-dy as i32);
                }
            }
            gx[(y as usize) * w + x as usize] = sx;
            gy[(y as usize) * w + x as usize] = sy;
        }
    }
    Ok((gx, gy))
}

/// Prewitt edge maps thresholded at `threshold` x the per-map maximum
/// gradient magnitude. Returns (horizontal lines, vertical lines):
/// the horizontal map responds to horizontal edges (y-derivative) and
/// the vertical map to vertical edges (x-derivative).
pub fn prewitt_edges(img: &GrayImage, threshold: f64) -> Result<(BinaryImage, BinaryImage)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "prewitt threshold must be in (0,1], got {threshold}"
        )));
    }
    let (gx, gy) = prewitt_gradients(img)?;
    let horizontal = threshold_gradient(&gy, img.width, img.height, threshold);
    let vertical = threshold_gradient(&gx, img.width, img.height, threshold);
    Ok((horizontal, vertical))
}

fn threshold_gradient(g: &[i32], w: usize, h: usize, threshold: f64) -> BinaryImage {
    let max_mag = g.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let mut out = BinaryImage::new(w, h);
    if max_mag == 0 {
        return out;
    }
    let cut = threshold * max_mag as f64;
    for (dst, &v) in out.data.iter_mut().zip(g) {
        *dst = v.unsigned_abs() as f64 >= cut;
    }
    out
}

/// Binary dilation with a centered `se_w x se_h` rectangular element.
pub fn dilate(img: &BinaryImage, se_w: usize, se_h: usize) -> Result<BinaryImage> {
    if se_w == 0 || se_h == 0 || se_w % 2 == 0 || se_h % 2 == 0 {
        return Err(Error::invalid(format!(
            "structuring element must have odd positive dimensions, got {se_w}x{se_h}"
        )));
    }
    let (w, h) = (img.width, img.height);
    let rx = (se_w / 2) as i64;
    let ry = (se_h / 2) as i64;

    // Separable: horizontal pass then vertical pass.
    let mut tmp = BinaryImage::new(w, h);
    for y in 0..h {
        let row = &img.data[y * w..(y + 1) * w];
        for x in 0..w as i64 {
            let lo = (x - rx).max(0) as usize;
            let hi = ((x + rx) as usize).min(w - 1);
            tmp.data[y * w + x as usize] = row[lo..=hi].iter().any(|&b| b);
        }
    }
    let mut out = BinaryImage::new(w, h);
    for y in 0..h as i64 {
        let lo = (y - ry).max(0) as usize;
        let hi = ((y + ry) as usize).min(h - 1);
        for x in 0..w {
            let mut any = false;
            for yy in lo..=hi {
                if tmp.data[yy * w + x] {
                    any = true;
                    break;
                }
            }
            out.data[(y as usize) * w + x] = any;
        }
    }
    Ok(out)
}

/// Otsu's threshold: the level maximizing between-class variance of the
/// 256-bin histogram, ties broken toward the smallest level. Pixels with
/// value <= level form the lower class.
pub fn otsu_threshold(img: &GrayImage) -> Result<u8> {
    if img.data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut hist = [0u64; 256];
    for &p in &img.data {
        hist[p as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::DegenerateHistogram);
    }

    let total = img.data.len() as f64;
    let sum_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();

    let mut best_level = 0u8;
    let mut best_var = f64::NEG_INFINITY;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for t in 0..256usize {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 {
            continue;
        }
        if w1 == 0.0 {
            break;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_total - sum0) / w1;
        let var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_level = t as u8;
        }
    }
    Ok(best_level)
}

/// Which side of the threshold is treated as foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    /// Foreground = pixels <= level (ink on bright plates).
    DarkForeground,
    /// Foreground = pixels > level.
    BrightForeground,
}

pub fn binarize(img: &GrayImage, level: u8, polarity: Polarity) -> BinaryImage {
    let data = img
        .data
        .iter()
        .map(|&p| match polarity {
            Polarity::DarkForeground => p <= level,
            Polarity::BrightForeground => p > level,
        })
        .collect();
    BinaryImage {
        width: img.width,
        height: img.height,
        data,
    }
}

/// Rotate the image content by `angle` degrees about the image center,
/// inverse-mapped with bilinear interpolation. Samples falling outside
/// the source take `fill`. Positive angles turn the content toward
/// increasing y at the right edge (screen clockwise with y down).
pub fn rotate_about_center(img: &GrayImage, angle: f64, fill: u8) -> Result<GrayImage> {
    if angle.abs() > 45.0 {
        return Err(Error::invalid(format!(
            "rotation angle {angle} outside supported range [-45,45]"
        )));
    }
    if angle == 0.0 {
        return Ok(img.clone());
    }
    let (w, h) = (img.width, img.height);
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let rad = angle.to_radians();
    let (sin, cos) = (rad.sin(), rad.cos());
    let mut out = GrayImage::new(w, h, fill);
    for y in 0..h {
        let dy = y as f64 - cy;
        for x in 0..w {
            let dx = x as f64 - cx;
            // inverse map: rotate destination offset by -angle
            let sx = cx + dx * cos + dy * sin;
            let sy = cy - dx * sin + dy * cos;
            if let Some(v) = img.sample_bilinear(sx, sy) {
                out.set(x, y, v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Ok(out)
}

/// Bilinear resize with corner-aligned sampling.
pub fn resize_bilinear(img: &GrayImage, out_w: usize, out_h: usize) -> Result<GrayImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::invalid("resize target must be at least 1x1"));
    }
    if img.is_empty() {
        return Err(Error::EmptyInput);
    }
    if out_w == img.width && out_h == img.height {
        return Ok(img.clone());
    }
    let sx = |x: usize| -> f64 {
        if out_w == 1 {
            (img.width - 1) as f64 / 2.0
        } else {
            x as f64 * (img.width - 1) as f64 / (out_w - 1) as f64
        }
    };
    let sy = |y: usize| -> f64 {
        if out_h == 1 {
            (img.height - 1) as f64 / 2.0
        } else {
            y as f64 * (img.height - 1) as f64 / (out_h - 1) as f64
        }
    };
    let mut out = GrayImage::new(out_w, out_h, 0);
    for y in 0..out_h {
        let fy = sy(y);
        for x in 0..out_w {
            let v = img.sample_bilinear(sx(x), fy).expect("in range");
            out.set(x, y, v.round().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(out)
}

/// Exact sub-grid copy.
pub fn crop(img: &GrayImage, bx: &BBox) -> Result<GrayImage> {
    if bx.w == 0 || bx.h == 0 || bx.right() > img.width || bx.bottom() > img.height {
        return Err(Error::BoxOutOfRange {
            x: bx.x,
            y: bx.y,
            w: bx.w,
            h: bx.h,
            img_w: img.width,
            img_h: img.height,
        });
    }
    let mut data = Vec::with_capacity(bx.w * bx.h);
    for y in bx.y..bx.bottom() {
        let start = y * img.width + bx.x;
        data.extend_from_slice(&img.data[start..start + bx.w]);
    }
    Ok(GrayImage {
        width: bx.w,
        height: bx.h,
        data,
    })
}

/// Crop for binary masks.
pub fn crop_mask(img: &BinaryImage, bx: &BBox) -> Result<BinaryImage> {
    if bx.w == 0 || bx.h == 0 || bx.right() > img.width || bx.bottom() > img.height {
        return Err(Error::BoxOutOfRange {
            x: bx.x,
            y: bx.y,
            w: bx.w,
            h: bx.h,
            img_w: img.width,
            img_h: img.height,
        });
    }
    let mut data = Vec::with_capacity(bx.w * bx.h);
    for y in bx.y..bx.bottom() {
        let start = y * img.width + bx.x;
        data.extend_from_slice(&img.data[start..start + bx.w]);
    }
    Ok(BinaryImage {
        width: bx.w,
        height: bx.h,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, px: &[u8]) -> GrayImage {
        GrayImage::from_vec(w, h, px.to_vec()).unwrap()
    }

    fn rng_image(seed: u64, w: usize, h: usize) -> GrayImage {
        // xorshift, good enough for pixel soup
        let mut s = seed.wrapping_add(0x9E3779B97F4A7C15);
        let mut data = Vec::with_capacity(w * h);
        for _ in 0..w * h {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            data.push((s >> 24) as u8);
        }
        gray(w, h, &data)
    }

    #[test]
    fn grayscale_formula() {
        let rgb = RgbImage::from_vec(3, 1, vec![255, 255, 255, 0, 0, 0, 100, 150, 200]).unwrap();
        let g = to_grayscale(&rgb).unwrap();
        assert_eq!(g.data(), &[255, 0, 141]);
    }

    #[test]
    fn grayscale_empty_is_error() {
        let rgb = RgbImage::from_vec(0, 0, vec![]).unwrap();
        assert!(matches!(to_grayscale(&rgb), Err(Error::EmptyInput)));
    }

    #[test]
    fn prewitt_constant_is_empty() {
        let img = GrayImage::new(9, 9, 77);
        let (h, v) = prewitt_edges(&img, 0.25).unwrap();
        assert_eq!(h.count_foreground(), 0);
        assert_eq!(v.count_foreground(), 0);
    }

    #[test]
    fn prewitt_vertical_step_marks_vertical_map() {
        let mut img = GrayImage::new(10, 10, 0);
        for y in 0..10 {
            for x in 5..10 {
                img.set(x, y, 255);
            }
        }
        let (h, v) = prewitt_edges(&img, 0.5).unwrap();
        // boundary columns marked in the vertical map
        for y in 1..9 {
            assert!(v.get(4, y) || v.get(5, y), "row {y} misses the step");
        }
        // horizontal map empty away from borders
        for y in 2..8 {
            for x in 2..8 {
                assert!(!h.get(x, y));
            }
        }
    }

    /// Brute-force convolution oracle: independent direct evaluation of
    /// both 3x3 kernels with replicate border and per-map max threshold.
    fn prewitt_oracle(img: &GrayImage, threshold: f64) -> (Vec<bool>, Vec<bool>) {
        let w = img.width() as i64;
        let h = img.height() as i64;
        let kx = [[1i32, 0, -1], [1, 0, -1], [1, 0, -1]];
        let ky = [[1i32, 1, 1], [0, 0, 0], [-1, -1, -1]];
        let at = |x: i64, y: i64| -> i32 {
            img.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize) as i32
        };
        let mut mx = Vec::new();
        let mut my = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let mut gx = 0;
                let mut gy = 0;
                for (j, row) in ky.iter().enumerate() {
                    for (i, &kyv) in row.iter().enumerate() {
                        let v = at(x + i as i64 - 1, y + j as i64 - 1);
                        gx += v * kx[j][i];
                        gy += v * kyv;
                    }
                }
                mx.push(gx.unsigned_abs());
                my.push(gy.unsigned_abs());
            }
        }
        let thr = |mags: &[u32]| -> Vec<bool> {
            let max = *mags.iter().max().unwrap();
            if max == 0 {
                return vec![false; mags.len()];
            }
            mags.iter()
                .map(|&m| m as f64 >= threshold * max as f64)
                .collect()
        };
        (thr(&my), thr(&mx))
    }

    #[test]
    fn prewitt_matches_direct_convolution() {
        for seed in 0..20 {
            let img = rng_image(seed, 7, 7);
            let (h, v) = prewitt_edges(&img, 0.25).unwrap();
            let (oh, ov) = prewitt_oracle(&img, 0.25);
            assert_eq!(h.data(), &oh[..], "seed {seed} horizontal");
            assert_eq!(v.data(), &ov[..], "seed {seed} vertical");
        }
    }

    #[test]
    fn prewitt_too_small_is_error() {
        let img = GrayImage::new(2, 5, 0);
        assert!(prewitt_edges(&img, 0.25).is_err());
    }

    #[test]
    fn prewitt_invariant_under_offset() {
        // clamp-free: squeeze values into [0,205] then shift by +50
        let base = rng_image(3, 12, 9);
        let img = GrayImage::from_vec(12, 9, base.data().iter().map(|&p| p / 2 + 20).collect())
            .unwrap();
        let shifted =
            GrayImage::from_vec(12, 9, img.data().iter().map(|&p| p + 50).collect()).unwrap();
        let (h1, v1) = prewitt_edges(&img, 0.3).unwrap();
        let (h2, v2) = prewitt_edges(&shifted, 0.3).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(v1, v2);
    }

    #[test]
    fn dilate_identity_and_block() {
        let mut img = BinaryImage::new(7, 7);
        img.set(3, 3, true);
        let same = dilate(&img, 1, 1).unwrap();
        assert_eq!(same, img);
        let grown = dilate(&img, 3, 3).unwrap();
        assert_eq!(grown.count_foreground(), 9);
        for y in 2..5 {
            for x in 2..5 {
                assert!(grown.get(x, y));
            }
        }
    }

    #[test]
    fn dilate_rejects_even_element() {
        let img = BinaryImage::new(4, 4);
        assert!(dilate(&img, 2, 1).is_err());
        assert!(dilate(&img, 1, 4).is_err());
    }

    #[test]
    fn dilate_merges_across_gap() {
        // two glyphs separated by a 2-pixel gap, 1x5 horizontal element
        let mut img = BinaryImage::new(12, 3);
        for y in 0..3 {
            img.set(2, y, true);
            img.set(5, y, true); // gap of columns 3,4
        }
        let before = connected_components(&img, Connectivity::Eight);
        assert_eq!(before.components.len(), 2);
        let merged = dilate(&img, 5, 1).unwrap();
        let after = connected_components(&merged, Connectivity::Eight);
        assert_eq!(after.components.len(), 1);
    }

    #[test]
    fn otsu_bimodal_tie_breaks_low() {
        let mut px = vec![0u8; 32];
        px.extend(vec![255u8; 32]);
        let img = gray(8, 8, &px);
        assert_eq!(otsu_threshold(&img).unwrap(), 0);
    }

    #[test]
    fn otsu_constant_is_error() {
        let img = GrayImage::new(5, 5, 9);
        assert!(matches!(
            otsu_threshold(&img),
            Err(Error::DegenerateHistogram)
        ));
    }

    /// Exhaustive oracle: for each level, partition the raw pixel list and
    /// compute between-class variance from per-class sums.
    fn otsu_oracle(img: &GrayImage) -> u8 {
        let mut best = (f64::NEG_INFINITY, 0u8);
        for t in 0..=255u8 {
            let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
            for &p in img.data() {
                if p <= t {
                    n0 += 1;
                    s0 += p as u64;
                } else {
                    n1 += 1;
                    s1 += p as u64;
                }
            }
            if n0 == 0 || n1 == 0 {
                continue;
            }
            let m0 = s0 as f64 / n0 as f64;
            let m1 = s1 as f64 / n1 as f64;
            let var = n0 as f64 * n1 as f64 * (m0 - m1) * (m0 - m1);
            if var > best.0 {
                best = (var, t);
            }
        }
        best.1
    }

    #[test]
    fn otsu_matches_exhaustive_search() {
        // two gaussian-ish clusters at 60 and 200
        let mut data = Vec::new();
        let mut s = 12345u64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        for i in 0..400 {
            let center: i64 = if i % 2 == 0 { 60 } else { 200 };
            let jitter = (next() % 41) as i64 - 20;
            data.push((center + jitter).clamp(0, 255) as u8);
        }
        let img = gray(20, 20, &data);
        assert_eq!(otsu_threshold(&img).unwrap(), otsu_oracle(&img));

        for seed in 0..30 {
            let img = rng_image(seed, 16, 16);
            match otsu_threshold(&img) {
                Ok(level) => assert_eq!(level, otsu_oracle(&img), "seed {seed}"),
                Err(_) => {}
            }
        }
    }

    #[test]
    fn binarize_extremes() {
        let img = gray(3, 1, &[0, 128, 255]);
        let all = binarize(&img, 255, Polarity::DarkForeground);
        assert!(all.data().iter().all(|&b| b));
        let bright = binarize(&img, 0, Polarity::BrightForeground);
        assert_eq!(bright.data(), &[false, true, true]);
    }

    #[test]
    fn rotate_zero_is_identity() {
        let img = rng_image(5, 20, 14);
        let out = rotate_about_center(&img, 0.0, 255).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn rotate_center_pixel_fixed_point() {
        let mut img = GrayImage::new(21, 21, 0);
        img.set(10, 10, 200);
        for angle in [-30.0, -7.5, 4.0, 12.0, 45.0] {
            let out = rotate_about_center(&img, angle, 0).unwrap();
            assert_eq!(out.get(10, 10), 200, "angle {angle}");
        }
    }

    #[test]
    fn rotate_bounds_checked() {
        let img = GrayImage::new(4, 4, 0);
        assert!(rotate_about_center(&img, 46.0, 0).is_err());
    }

    #[test]
    fn resize_identity_and_average() {
        let img = rng_image(9, 13, 7);
        assert_eq!(resize_bilinear(&img, 13, 7).unwrap(), img);

        let checker = gray(2, 2, &[0, 255, 255, 0]);
        let one = resize_bilinear(&checker, 1, 1).unwrap();
        assert_eq!(one.get(0, 0), 128);

        let flat = GrayImage::new(5, 4, 66);
        let out = resize_bilinear(&flat, 11, 3).unwrap();
        assert!(out.data().iter().all(|&p| p == 66));
    }

    #[test]
    fn crop_composition() {
        let img = rng_image(21, 16, 12);
        let full = crop(&img, &BBox::new(0, 0, 16, 12)).unwrap();
        assert_eq!(full, img);

        let single = crop(&img, &BBox::new(5, 7, 1, 1)).unwrap();
        assert_eq!(single.get(0, 0), img.get(5, 7));

        let outer = crop(&img, &BBox::new(2, 3, 10, 8)).unwrap();
        let inner = crop(&outer, &BBox::new(4, 2, 3, 3)).unwrap();
        let composed = crop(&img, &BBox::new(6, 5, 3, 3)).unwrap();
        assert_eq!(inner, composed);

        assert!(crop(&img, &BBox::new(10, 10, 10, 10)).is_err());
    }

    #[test]
    fn iou_basics() {
        let a = BBox::new(0, 0, 10, 10);
        assert!((a.iou(&a) - 1.0).abs() < 1e-12);
        let b = BBox::new(5, 0, 10, 10);
        assert!((a.iou(&b) - 50.0 / 150.0).abs() < 1e-12);
        let c = BBox::new(20, 20, 3, 3);
        assert_eq!(a.iou(&c), 0.0);
    }
}
