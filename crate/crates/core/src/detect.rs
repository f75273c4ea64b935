//! Edge-based plate localization and rotation alignment.
//!
//! Candidates come from pairing vertical edge segments bridged by a
//! horizontal segment whose implied box matches the expected aspect
//! band. The alignment sweep then rotates the candidate region stepwise
//! and measures the tilt of the strongest internal horizontal line; the
//! angle minimizing the endpoint height difference aligns the plate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{
    connected_components, crop, dilate, prewitt_edges, resize_bilinear, BBox, BinaryImage,
    Component, ComponentLabeling, Connectivity, GrayImage,
};

/// Canonical resolution of an extracted plate.
pub const PLATE_W: usize = 256;
pub const PLATE_H: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    /// Expected plate width / height.
    pub aspect_ratio: f64,
    /// Relative half-width of the accepted aspect band.
    pub aspect_tol: f64,
    pub min_plate_w: usize,
    /// Sweep covers [-sweep_max, +sweep_max] degrees.
    pub sweep_max: f64,
    pub sweep_step: f64,
    /// Fraction of the per-map maximum gradient magnitude.
    pub prewitt_threshold: f64,
    /// Line components shorter than this fraction of `min_plate_w`
    /// (scaled by the aspect ratio for vertical lines) are discarded.
    pub min_line_frac: f64,
    /// Each paired vertical segment must span at least this fraction of
    /// the implied box height. Plate borders do; character strokes and
    /// other inner structure do not.
    pub min_vertical_frac: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            aspect_ratio: 2.0,
            aspect_tol: 0.25,
            min_plate_w: 120,
            sweep_max: 10.0,
            sweep_step: 0.5,
            prewitt_threshold: 0.25,
            min_line_frac: 0.4,
            min_vertical_frac: 0.6,
        }
    }
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.aspect_ratio <= 1.0 {
            return Err(Error::invalid("aspect_ratio must exceed 1"));
        }
        if !(self.aspect_tol > 0.0 && self.aspect_tol < 1.0) {
            return Err(Error::invalid("aspect_tol must be in (0,1)"));
        }
        if self.min_plate_w < 20 {
            return Err(Error::invalid("min_plate_w too small"));
        }
        if self.sweep_max <= 0.0 || self.sweep_step <= 0.0 {
            return Err(Error::invalid("sweep parameters must be positive"));
        }
        if !(self.prewitt_threshold > 0.0 && self.prewitt_threshold <= 1.0) {
            return Err(Error::invalid("prewitt_threshold must be in (0,1]"));
        }
        if !(self.min_line_frac > 0.0 && self.min_line_frac < 1.0) {
            return Err(Error::invalid("min_line_frac must be in (0,1)"));
        }
        if !(self.min_vertical_frac > 0.0 && self.min_vertical_frac < 1.0) {
            return Err(Error::invalid("min_vertical_frac must be in (0,1)"));
        }
        Ok(())
    }

    /// The sweep angles, +max down to -max inclusive.
    pub fn sweep_angles(&self) -> Vec<f64> {
        let steps = (2.0 * self.sweep_max / self.sweep_step).round() as usize;
        (0..=steps)
            .map(|i| self.sweep_max - i as f64 * self.sweep_step)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateCandidate {
    pub bbox: BBox,
    /// Alignment angle in degrees; 0 until the sweep runs.
    pub angle: f64,
    /// Fraction of the box perimeter covered by edge pixels.
    pub score: f64,
}

/// Locate plate-shaped boxes. Returns candidates sorted by descending
/// score; overlapping candidates are suppressed in favor of the better
/// scored one.
pub fn find_plate_candidates(img: &GrayImage, cfg: &DetectConfig) -> Result<Vec<PlateCandidate>> {
    cfg.validate()?;
    if img.width() < cfg.min_plate_w {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min_width: cfg.min_plate_w,
            min_height: 3,
        });
    }
    let (h_map, v_map) = prewitt_edges(img, cfg.prewitt_threshold)?;
    let hd = dilate(&h_map, 5, 1)?;
    let vd = dilate(&v_map, 1, 5)?;

    let min_h_len = (cfg.min_line_frac * cfg.min_plate_w as f64) as usize;
    let min_v_len = (cfg.min_line_frac * cfg.min_plate_w as f64 / cfg.aspect_ratio) as usize;

    let h_comps: Vec<Component> = connected_components(&hd, Connectivity::Four)
        .components
        .into_iter()
        .filter(|c| c.bbox.w >= min_h_len)
        .collect();
    let v_comps: Vec<Component> = connected_components(&vd, Connectivity::Four)
        .components
        .into_iter()
        .filter(|c| c.bbox.h >= min_v_len)
        .collect();

    let band_lo = cfg.aspect_ratio * (1.0 - cfg.aspect_tol);
    let band_hi = cfg.aspect_ratio * (1.0 + cfg.aspect_tol);

    let mut candidates: Vec<PlateCandidate> = Vec::new();
    for (i, a) in v_comps.iter().enumerate() {
        for b in v_comps.iter().skip(i + 1) {
            let (left, right) = if a.bbox.x <= b.bbox.x { (a, b) } else { (b, a) };
            let x0 = left.bbox.x;
            let x1 = right.bbox.right();
            if x1 <= x0 {
                continue;
            }
            let w = x1 - x0;
            if w < cfg.min_plate_w {
                continue;
            }
            // the verticals must overlap substantially in y
            let oy0 = left.bbox.y.max(right.bbox.y);
            let oy1 = left.bbox.bottom().min(right.bbox.bottom());
            if oy1 <= oy0 {
                continue;
            }
            let overlap = oy1 - oy0;
            if overlap * 2 < left.bbox.h.min(right.bbox.h) {
                continue;
            }
            let y0 = left.bbox.y.min(right.bbox.y);
            let y1 = left.bbox.bottom().max(right.bbox.bottom());
            let h = y1 - y0;
            let aspect = w as f64 / h as f64;
            if aspect < band_lo || aspect > band_hi {
                continue;
            }
            // both verticals must look like full plate sides
            let min_side = (cfg.min_vertical_frac * h as f64) as usize;
            if left.bbox.h < min_side || right.bbox.h < min_side {
                continue;
            }
            // a horizontal line must link the two verticals
            let slack = w / 8;
            let linked = h_comps.iter().any(|hc| {
                let cy = hc.bbox.y + hc.bbox.h / 2;
                cy >= y0
                    && cy < y1
                    && hc.bbox.w * 10 >= w * 7
                    && hc.bbox.x <= x0 + slack
                    && hc.bbox.right() + slack >= x1
            });
            if !linked {
                continue;
            }
            let bbox = BBox::new(x0, y0, w, h);
            let score = perimeter_score(&bbox, &hd, &vd);
            candidates.push(PlateCandidate {
                bbox,
                angle: 0.0,
                score,
            });
        }
    }

    // plate sub-structure (bar, tall stems) pairs into boxes that lie
    // inside the border-pair box; keep the container
    let contained = |inner: &BBox, outer: &BBox| -> bool {
        let ix0 = inner.x.max(outer.x);
        let iy0 = inner.y.max(outer.y);
        let ix1 = inner.right().min(outer.right());
        let iy1 = inner.bottom().min(outer.bottom());
        if ix1 <= ix0 || iy1 <= iy0 {
            return false;
        }
        let inter = (ix1 - ix0) * (iy1 - iy0);
        inter * 100 >= inner.area() * 85
    };
    let candidates: Vec<PlateCandidate> = candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|o| o.bbox.area() > c.bbox.area() && contained(&c.bbox, &o.bbox))
        })
        .cloned()
        .collect();

    // order by score, then position for determinism
    let mut candidates = candidates;
    candidates.sort_by(|p, q| {
        q.score
            .partial_cmp(&p.score)
            .unwrap()
            .then(p.bbox.x.cmp(&q.bbox.x))
            .then(p.bbox.y.cmp(&q.bbox.y))
    });
    // suppress overlapping candidates
    let mut kept: Vec<PlateCandidate> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| k.bbox.iou(&c.bbox) < 0.5) {
            kept.push(c);
        }
    }
    Ok(kept)
}

/// Fraction of the box perimeter pixels within 3 px of an edge pixel of
/// the matching orientation map.
fn perimeter_score(bbox: &BBox, hd: &BinaryImage, vd: &BinaryImage) -> f64 {
    const BAND: i64 = 3;
    let (w, h) = (hd.width() as i64, hd.height() as i64);
    let mut covered = 0usize;
    let mut total = 0usize;

    for x in bbox.x..bbox.right() {
        for edge_y in [bbox.y as i64, bbox.bottom() as i64 - 1] {
            total += 1;
            let lo = (edge_y - BAND).max(0);
            let hi = (edge_y + BAND).min(h - 1);
            if (lo..=hi).any(|y| hd.get(x, y as usize)) {
                covered += 1;
            }
        }
    }
    for y in bbox.y..bbox.bottom() {
        for edge_x in [bbox.x as i64, bbox.right() as i64 - 1] {
            total += 1;
            let lo = (edge_x - BAND).max(0);
            let hi = (edge_x + BAND).min(w - 1);
            if (lo..=hi).any(|x| vd.get(x as usize, y)) {
                covered += 1;
            }
        }
    }
    covered as f64 / total as f64
}

/// Rotate the content around `center` by `angle` degrees and return the
/// `out_w x out_h` window centered there (bilinear, `fill` outside).
fn rotate_window(
    img: &GrayImage,
    center: (f64, f64),
    angle: f64,
    out_w: usize,
    out_h: usize,
    fill: u8,
) -> GrayImage {
    let rad = angle.to_radians();
    let (sin, cos) = (rad.sin(), rad.cos());
    let ocx = (out_w as f64 - 1.0) / 2.0;
    let ocy = (out_h as f64 - 1.0) / 2.0;
    let mut out = GrayImage::new(out_w, out_h, fill);
    for y in 0..out_h {
        let dy = y as f64 - ocy;
        for x in 0..out_w {
            let dx = x as f64 - ocx;
            let sx = center.0 + dx * cos + dy * sin;
            let sy = center.1 - dx * sin + dy * cos;
            if let Some(v) = img.sample_bilinear(sx, sy) {
                out.set(x, y, v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    out
}

/// Tilt of the strongest internal horizontal line of `window`:
/// mean row of the component's left-end pixels minus its right-end
/// pixels. `None` when no usable line survives the filters.
fn internal_line_tilt(window: &GrayImage, prewitt_threshold: f64) -> Option<f64> {
    let (h_map, _) = prewitt_edges(window, prewitt_threshold).ok()?;
    let labeling: ComponentLabeling = connected_components(&h_map, Connectivity::Eight);
    let h = window.height();
    let min_w = (window.width() * 2) / 5;
    let best = labeling
        .components
        .iter()
        .filter(|c| {
            let cy = c.bbox.y + c.bbox.h / 2;
            // top, bottom and tiny lines are discarded
            cy * 100 >= h * 12 && cy * 100 <= h * 88 && c.bbox.w >= min_w
        })
        .max_by(|a, b| a.bbox.w.cmp(&b.bbox.w).then(b.label.cmp(&a.label)))?;

    let ends = (best.bbox.w / 10).max(1);
    let mean_row = |x_lo: usize, x_hi: usize| -> f64 {
        let mut sum = 0usize;
        let mut n = 0usize;
        for y in best.bbox.y..best.bbox.bottom() {
            for x in x_lo..x_hi {
                if labeling.label_at(x, y) == best.label {
                    sum += y;
                    n += 1;
                }
            }
        }
        sum as f64 / n.max(1) as f64
    };
    let left = mean_row(best.bbox.x, best.bbox.x + ends);
    let right = mean_row(best.bbox.right() - ends, best.bbox.right());
    Some((left - right).abs())
}

/// Sweep all angles in the configured range and return the one whose
/// internal horizontal line comes out flattest. Ties break toward the
/// smaller |angle|, then toward the positive angle.
pub fn alignment_angle(img: &GrayImage, cand: &PlateCandidate, cfg: &DetectConfig) -> Result<f64> {
    cfg.validate()?;
    let b = &cand.bbox;
    if b.right() > img.width() || b.bottom() > img.height() {
        return Err(Error::BoxOutOfRange {
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
            img_w: img.width(),
            img_h: img.height(),
        });
    }
    let center = b.center();
    let win_w = b.w;
    let win_h = b.h + b.h / 8;

    let mut best: Option<(f64, f64)> = None; // (tilt, angle)
    for angle in cfg.sweep_angles() {
        let window = rotate_window(img, center, angle, win_w, win_h, 255);
        if let Some(tilt) = internal_line_tilt(&window, cfg.prewitt_threshold) {
            let better = match &best {
                None => true,
                Some((bt, ba)) => {
                    tilt < *bt
                        || (tilt == *bt
                            && (angle.abs() < ba.abs() || (angle.abs() == ba.abs() && angle > *ba)))
                }
            };
            if better {
                best = Some((tilt, angle));
            }
        }
    }
    best.map(|(_, a)| a).ok_or(Error::AlignmentLineNotFound)
}

/// Rotate by the alignment angle about the candidate center, take the
/// candidate box and resize it to the canonical plate resolution.
pub fn extract_plate(img: &GrayImage, cand: &PlateCandidate, angle: f64) -> Result<GrayImage> {
    let b = &cand.bbox;
    if b.right() > img.width() || b.bottom() > img.height() {
        return Err(Error::BoxOutOfRange {
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
            img_w: img.width(),
            img_h: img.height(),
        });
    }
    let window = if angle == 0.0 {
        crop(img, b)?
    } else {
        rotate_window(img, b.center(), angle, b.w, b.h, 255)
    };
    resize_bilinear(&window, PLATE_W, PLATE_H)
}
