//! Character extraction from a plate image: binarize at the Otsu level,
//! repair ripples by dilation, label components, filter by size ratios,
//! expand the surviving capture areas and tight-crop ordered glyphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{
    binarize, connected_components, crop_mask, dilate, otsu_threshold, resize_bilinear, BBox,
    BinaryImage, Connectivity, GrayImage, Polarity,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentConfig {
    /// Component height bounds as fractions of the plate height.
    pub min_h_frac: f64,
    pub max_h_frac: f64,
    /// Glyph height / width bounds.
    pub min_aspect: f64,
    pub max_aspect: f64,
    /// Capture-area growth per expansion ring, in pixels.
    pub expand_step: usize,
    /// Hard cap on total expansion per side, in pixels.
    pub max_expand: usize,
    /// Plates wider than this are downsampled before segmentation.
    pub working_width: usize,
    /// Components entirely inside this bottom fraction of the plate are
    /// subtitle text, dropped regardless of ratios.
    pub bottom_band_frac: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            min_h_frac: 0.25,
            max_h_frac: 0.85,
            min_aspect: 0.8,
            max_aspect: 6.0,
            expand_step: 1,
            max_expand: 6,
            working_width: 256,
            bottom_band_frac: 0.2,
        }
    }
}

impl SegmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_h_frac > 0.0 && self.min_h_frac < self.max_h_frac && self.max_h_frac <= 1.0) {
            return Err(Error::invalid("height fraction bounds must satisfy 0 < min < max <= 1"));
        }
        if !(self.min_aspect > 0.0 && self.min_aspect < self.max_aspect) {
            return Err(Error::invalid("aspect bounds must satisfy 0 < min < max"));
        }
        if self.expand_step == 0 {
            return Err(Error::invalid("expand_step must be >= 1"));
        }
        if self.max_expand < self.expand_step {
            return Err(Error::invalid("max_expand must be >= expand_step"));
        }
        if self.working_width < 32 {
            return Err(Error::invalid("working_width too small"));
        }
        if !(self.bottom_band_frac >= 0.0 && self.bottom_band_frac < 1.0) {
            return Err(Error::invalid("bottom_band_frac must be in [0,1)"));
        }
        Ok(())
    }
}

/// A tightly cropped glyph with its source geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterCrop {
    /// Tight binary mask: first/last row and column each hold ink.
    pub mask: BinaryImage,
    /// Placement in plate coordinates.
    pub source_box: BBox,
    /// Index from the leftmost crop.
    pub order: usize,
}

/// Minimal bounding box of the foreground inside `bx`, cropped out of
/// the mask. Errors when the box holds no foreground.
pub fn tight_crop(mask: &BinaryImage, bx: &BBox) -> Result<CharacterCrop> {
    if bx.right() > mask.width() || bx.bottom() > mask.height() || bx.w == 0 || bx.h == 0 {
        return Err(Error::BoxOutOfRange {
            x: bx.x,
            y: bx.y,
            w: bx.w,
            h: bx.h,
            img_w: mask.width(),
            img_h: mask.height(),
        });
    }
    let mut min_x = usize::MAX;
    let mut min_y = usize::MAX;
    let mut max_x = 0usize;
    let mut max_y = 0usize;
    let mut any = false;
    for y in bx.y..bx.bottom() {
        for x in bx.x..bx.right() {
            if mask.get(x, y) {
                any = true;
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    if !any {
        return Err(Error::invalid("box contains no foreground"));
    }
    let tight = BBox::new(min_x, min_y, max_x - min_x + 1, max_y - min_y + 1);
    Ok(CharacterCrop {
        mask: crop_mask(mask, &tight)?,
        source_box: tight,
        order: 0,
    })
}

/// Expand `bx` ring by ring until one full ring adds no foreground or
/// the growth cap is reached.
fn expand_capture(mask: &BinaryImage, bx: &BBox, step: usize, cap: usize) -> BBox {
    let mut current = *bx;
    let mut count = mask.count_in_box(&current);
    let mut grown_total = 0usize;
    while grown_total + step <= cap {
        let grown = current.grown(step, mask.width(), mask.height());
        if grown == current {
            break;
        }
        let grown_count = mask.count_in_box(&grown);
        if grown_count == count {
            break;
        }
        count = grown_count;
        current = grown;
        grown_total += step;
    }
    current
}

/// Full character detection over a plate image. Returns tight crops
/// sorted left to right; blank plates give an empty list.
pub fn segment_characters(plate: &GrayImage, cfg: &SegmentConfig) -> Result<Vec<CharacterCrop>> {
    cfg.validate()?;
    if plate.is_empty() {
        return Err(Error::EmptyInput);
    }

    // optional downsampling for oversized inputs
    let scale_back: f64;
    let work: GrayImage;
    if plate.width() > cfg.working_width {
        let out_h =
            ((plate.height() * cfg.working_width) as f64 / plate.width() as f64).round() as usize;
        work = resize_bilinear(plate, cfg.working_width, out_h.max(1))?;
        scale_back = plate.width() as f64 / cfg.working_width as f64;
    } else {
        work = plate.clone();
        scale_back = 1.0;
    }

    let level = match otsu_threshold(&work) {
        Ok(level) => level,
        // a constant plate has nothing to segment
        Err(Error::DegenerateHistogram) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let ink = binarize(&work, level, Polarity::DarkForeground);
    let repaired = dilate(&ink, 3, 3)?;
    let labeling = connected_components(&repaired, Connectivity::Eight);

    let h = work.height();
    let min_h = (cfg.min_h_frac * h as f64) as usize;
    let max_h = (cfg.max_h_frac * h as f64) as usize;
    let bottom_band = h - (cfg.bottom_band_frac * h as f64) as usize;

    let mut crops: Vec<CharacterCrop> = Vec::new();
    for comp in &labeling.components {
        let b = &comp.bbox;
        if b.y >= bottom_band {
            continue; // subtitle text zone
        }
        if b.h < min_h || b.h > max_h {
            continue;
        }
        let aspect = b.h as f64 / b.w as f64;
        if aspect < cfg.min_aspect || aspect > cfg.max_aspect {
            continue;
        }
        let captured = expand_capture(&ink, b, cfg.expand_step, cfg.max_expand);
        match tight_crop(&ink, &captured) {
            Ok(c) => crops.push(c),
            Err(Error::InvalidArgument(_)) => continue, // dilation-only component
            Err(e) => return Err(e),
        }
    }

    // drop crops nested inside another crop's box, preferring the larger
    let mut keep = vec![true; crops.len()];
    for i in 0..crops.len() {
        for j in 0..crops.len() {
            if i == j || !keep[i] || !keep[j] {
                continue;
            }
            let (bi, bj) = (&crops[i].source_box, &crops[j].source_box);
            if bj.contains_box(bi) && (bj.area() > bi.area() || j < i) {
                keep[i] = false;
            }
        }
    }
    let mut crops: Vec<CharacterCrop> = crops
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();

    crops.sort_by(|a, b| {
        a.source_box
            .x
            .cmp(&b.source_box.x)
            .then(a.source_box.y.cmp(&b.source_box.y))
    });
    for (i, c) in crops.iter_mut().enumerate() {
        c.order = i;
        if scale_back != 1.0 {
            let sb = &c.source_box;
            c.source_box = BBox::new(
                (sb.x as f64 * scale_back).round() as usize,
                (sb.y as f64 * scale_back).round() as usize,
                (sb.w as f64 * scale_back).round().max(1.0) as usize,
                (sb.h as f64 * scale_back).round().max(1.0) as usize,
            );
        }
    }
    Ok(crops)
}
