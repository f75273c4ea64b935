//! End-to-end orchestration: plate reading via per-character PCA+KNN
//! (workflow 1) and whole-plate identification via DCT+SVM against an
//! enrolled gallery (workflow 3).

pub mod alphabet;

use serde::{Deserialize, Serialize};

use crate::classify::{
    knn_classify, svm_decision_values, svm_train, KnnModel, Metric, SvmModel, SvmTrainConfig,
};
use crate::detect::{
    alignment_angle, extract_plate, find_plate_candidates, DetectConfig, PlateCandidate, PLATE_H,
    PLATE_W,
};
use crate::error::{Error, Result};
use crate::features::{dct_features, pca_fit, DctConfig, PcaModel};
use crate::imaging::{binarize, otsu_threshold, resize_bilinear, BBox, GrayImage, Polarity};
use crate::segment::{segment_characters, tight_crop, CharacterCrop, SegmentConfig};
use crate::synthgen::SceneRecord;

use alphabet::{symbol, SymbolId, SymbolKind};

/// One recognized character.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharRead {
    pub symbol: SymbolId,
    /// Best-neighbor distance; lower is more confident.
    pub confidence: f64,
    pub source_box: BBox,
    /// A digit read in the letter zone or vice versa.
    pub zone_mismatch: bool,
}

/// The assembled reading: digit group, letter group, rejection count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateString {
    pub digits: Vec<CharRead>,
    pub letters: Vec<CharRead>,
    pub rejected: usize,
}

impl PlateString {
    pub fn digit_ids(&self) -> Vec<SymbolId> {
        self.digits.iter().map(|c| c.symbol).collect()
    }

    pub fn letter_ids(&self) -> Vec<SymbolId> {
        self.letters.iter().map(|c| c.symbol).collect()
    }

    pub fn display(&self) -> String {
        crate::synthgen::display_text(&self.digit_ids(), &self.letter_ids())
    }
}

/// Whole-plate identification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateIdentity {
    pub id: u32,
    /// Top decision value minus the runner-up.
    pub margin: f64,
    /// Margin fell below the enrolled threshold.
    pub unknown: bool,
}

/// Trained character recognizer: PCA basis plus KNN matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CharModels {
    pub pca: PcaModel,
    pub knn: KnnModel,
}

/// Enrolled plate gallery: DCT extractor config plus one-vs-rest SVM.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryModel {
    pub dct: DctConfig,
    pub svm: SvmModel,
    /// Margins below this flag the verdict as unknown.
    pub unknown_margin: f64,
}

/// Flatten a character crop to the normalized `dims` grid in [0,1].
pub fn normalize_crop(crop: &CharacterCrop, dims: (usize, usize)) -> Result<Vec<f64>> {
    let gray = crop.mask.to_gray();
    let resized = resize_bilinear(&gray, dims.0, dims.1)?;
    Ok(resized.data().iter().map(|&p| p as f64 / 255.0).collect())
}

/// Split labeled crops into digit and letter groups at the widest
/// horizontal gap between adjacent boxes (ties to the leftmost gap).
/// The left group is the digit zone, the right the letter zone; a
/// wrong-kind read keeps its zone and is flagged.
pub fn assemble_plate_string(chars: &[(SymbolId, f64, BBox)], rejected: usize) -> Result<PlateString> {
    if chars.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut plate = PlateString {
        digits: Vec::new(),
        letters: Vec::new(),
        rejected,
    };
    if chars.len() == 1 {
        let (id, conf, bx) = chars[0];
        let read = CharRead {
            symbol: id,
            confidence: conf,
            source_box: bx,
            zone_mismatch: false,
        };
        match symbol(id)?.kind {
            SymbolKind::Digit => plate.digits.push(read),
            SymbolKind::Letter => plate.letters.push(read),
        }
        return Ok(plate);
    }

    let mut split = 0usize;
    let mut widest = i64::MIN;
    for i in 0..chars.len() - 1 {
        let gap = chars[i + 1].2.x as i64 - chars[i].2.right() as i64;
        if gap > widest {
            widest = gap;
            split = i + 1;
        }
    }
    for (i, &(id, conf, bx)) in chars.iter().enumerate() {
        let kind = symbol(id)?.kind;
        if i < split {
            plate.digits.push(CharRead {
                symbol: id,
                confidence: conf,
                source_box: bx,
                zone_mismatch: kind != SymbolKind::Digit,
            });
        } else {
            plate.letters.push(CharRead {
                symbol: id,
                confidence: conf,
                source_box: bx,
                zone_mismatch: kind != SymbolKind::Letter,
            });
        }
    }
    Ok(plate)
}

/// Read the characters off the best plate candidate in a scene.
pub fn recognize_plate_chars(
    scene: &GrayImage,
    det_cfg: &DetectConfig,
    seg_cfg: &SegmentConfig,
    models: &CharModels,
) -> Result<PlateString> {
    let candidates = find_plate_candidates(scene, det_cfg)?;
    let top = candidates.first().ok_or(Error::NoPlateFound)?;
    let angle = alignment_angle(scene, top, det_cfg)?;
    let plate = extract_plate(scene, top, angle)?;
    let crops = segment_characters(&plate, seg_cfg)?;

    let dims = models.pca.input_dims;
    let mut kept: Vec<(SymbolId, f64, BBox)> = Vec::new();
    let mut rejected = 0usize;
    for crop in &crops {
        let sample = normalize_crop(crop, dims)?;
        let fv = models.pca.project(&sample)?;
        let (label, dist) = knn_classify(&models.knn, &fv.values)?;
        match models.knn.reject_threshold {
            Some(t) if dist > t => rejected += 1,
            _ => kept.push((label, dist, crop.source_box)),
        }
    }
    if kept.is_empty() {
        return Err(Error::UnreadablePlate);
    }
    assemble_plate_string(&kept, rejected)
}

/// Enroll a plate gallery: DCT features per view, one-vs-rest SVM over
/// identities. Requires at least two identities with two views each.
pub fn enroll_gallery(
    views: &[(GrayImage, u32)],
    dct_cfg: &DctConfig,
    svm_cfg: &SvmTrainConfig,
) -> Result<GalleryModel> {
    dct_cfg.validate()?;
    let mut counts = std::collections::BTreeMap::new();
    for (_, id) in views {
        *counts.entry(*id).or_insert(0usize) += 1;
    }
    if counts.len() < 2 {
        return Err(Error::DegenerateTrainingSet);
    }
    if counts.values().any(|&c| c < 2) {
        return Err(Error::invalid("every identity needs at least 2 views"));
    }

    let mut feats = Vec::with_capacity(views.len());
    let mut labels = Vec::with_capacity(views.len());
    for (img, id) in views {
        let plate = resize_bilinear(img, dct_cfg.plate_w, dct_cfg.plate_h)?;
        feats.push(dct_features(&plate, dct_cfg)?.values);
        labels.push(*id);
    }
    let svm = svm_train(&feats, &labels, svm_cfg)?;

    // threshold at half the weakest training margin
    let mut min_margin = f64::INFINITY;
    for f in &feats {
        let vals = svm_decision_values(&svm, f)?;
        let (top, second) = top_two(&vals);
        min_margin = min_margin.min(top - second);
    }
    Ok(GalleryModel {
        dct: dct_cfg.clone(),
        svm,
        unknown_margin: (min_margin * 0.5).max(0.0),
    })
}

fn top_two(values: &[f64]) -> (f64, f64) {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &v in values {
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
    }
    (top, second)
}

/// Identify the best plate candidate against the enrolled gallery.
pub fn recognize_whole_plate(
    scene: &GrayImage,
    det_cfg: &DetectConfig,
    gallery: &GalleryModel,
) -> Result<PlateIdentity> {
    let candidates = find_plate_candidates(scene, det_cfg)?;
    let top = candidates.first().ok_or(Error::NoPlateFound)?;
    let angle = alignment_angle(scene, top, det_cfg)?;
    let plate = extract_plate(scene, top, angle)?;
    identify_plate_image(&plate, gallery)
}

/// Identify an already-extracted plate image.
pub fn identify_plate_image(plate: &GrayImage, gallery: &GalleryModel) -> Result<PlateIdentity> {
    let input = resize_bilinear(plate, gallery.dct.plate_w, gallery.dct.plate_h)?;
    let fv = dct_features(&input, &gallery.dct)?;
    let values = svm_decision_values(&gallery.svm, &fv.values)?;
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let (top, second) = top_two(&values);
    let margin = top - second;
    Ok(PlateIdentity {
        id: gallery.svm.classes[best],
        margin,
        unknown: margin < gallery.unknown_margin,
    })
}

/// Ground-truth-aligned plate extraction for a manifest record, using
/// the same geometry as the detection path. Returns the canonical plate
/// and the glyph boxes mapped into canonical coordinates.
pub fn gt_canonical_plate(
    scene: &GrayImage,
    rec: &SceneRecord,
) -> Result<(GrayImage, Vec<(SymbolId, BBox)>)> {
    let bbox = rec.scene_bbox();
    let cand = PlateCandidate {
        bbox,
        angle: 0.0,
        score: 1.0,
    };
    let plate = extract_plate(scene, &cand, -rec.skew)?;

    // map plate-space boxes through the rotation-cancelling extraction
    let pw = rec.scale as f64;
    let ph = (rec.scale / 2) as f64;
    let (pcx, pcy) = ((pw - 1.0) / 2.0, (ph - 1.0) / 2.0);
    let (wcx, wcy) = ((bbox.w as f64 - 1.0) / 2.0, (bbox.h as f64 - 1.0) / 2.0);
    let sx = PLATE_W as f64 / bbox.w as f64;
    let sy = PLATE_H as f64 / bbox.h as f64;
    let boxes = rec
        .glyphs
        .iter()
        .map(|g| {
            let x = (g[1] as f64 - pcx + wcx) * sx;
            let y = (g[2] as f64 - pcy + wcy) * sy;
            let w = g[3] as f64 * sx;
            let h = g[4] as f64 * sy;
            (
                g[0] as SymbolId,
                BBox::new(
                    x.round().max(0.0) as usize,
                    y.round().max(0.0) as usize,
                    (w.round() as usize).max(1),
                    (h.round() as usize).max(1),
                ),
            )
        })
        .collect();
    Ok((plate, boxes))
}

/// Harvest normalized training characters from ground truth: extract the
/// aligned plate, binarize it, tight-crop each glyph box.
pub fn harvest_gt_chars(
    scene: &GrayImage,
    rec: &SceneRecord,
    dims: (usize, usize),
) -> Result<Vec<(SymbolId, Vec<f64>)>> {
    let (plate, boxes) = gt_canonical_plate(scene, rec)?;
    let level = otsu_threshold(&plate)?;
    let ink = binarize(&plate, level, Polarity::DarkForeground);
    let mut out = Vec::with_capacity(boxes.len());
    for (sym, bx) in boxes {
        let grown = bx.grown(1, ink.width(), ink.height());
        let crop = tight_crop(&ink, &grown)?;
        out.push((sym, normalize_crop(&crop, dims)?));
    }
    Ok(out)
}

/// Training parameters for the character recognizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharTrainConfig {
    pub pca_components: usize,
    pub char_size: usize,
    pub knn_k: usize,
    pub metric: Metric,
}

impl Default for CharTrainConfig {
    fn default() -> Self {
        CharTrainConfig {
            pca_components: 40,
            char_size: 24,
            knn_k: 1,
            metric: Metric::Euclidean,
        }
    }
}

/// Fit PCA on harvested characters, project them into the KNN matrix
/// and fix the rejection threshold from training self-distances.
pub fn train_char_models(
    samples: &[(SymbolId, Vec<f64>)],
    cfg: &CharTrainConfig,
) -> Result<CharModels> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dims = (cfg.char_size, cfg.char_size);
    let raw: Vec<Vec<f64>> = samples.iter().map(|(_, s)| s.clone()).collect();
    let labels: Vec<u32> = samples.iter().map(|(id, _)| *id).collect();
    let pca = pca_fit(&raw, cfg.pca_components, dims)?;

    let columns: Vec<Vec<f64>> = raw
        .iter()
        .map(|s| pca.project(s).map(|fv| fv.values))
        .collect::<Result<_>>()?;

    let variances = if cfg.metric == Metric::Standardized {
        let n = columns.len() as f64;
        let dim = columns[0].len();
        let mut mean = vec![0.0; dim];
        for c in &columns {
            for (m, v) in mean.iter_mut().zip(c) {
                *m += v / n;
            }
        }
        let mut var = vec![0.0; dim];
        for c in &columns {
            for ((v, x), m) in var.iter_mut().zip(c).zip(&mean) {
                *v += (x - m) * (x - m) / n;
            }
        }
        Some(var.iter().map(|&v| if v > 1e-12 { v } else { 1.0 }).collect())
    } else {
        None
    };

    let mut knn = KnnModel::new(columns, labels, cfg.metric, variances, cfg.knn_k)?;
    knn.fit_reject_threshold()?;
    Ok(CharModels { pca, knn })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(x: usize, w: usize) -> BBox {
        BBox::new(x, 10, w, 40)
    }

    #[test]
    fn assemble_splits_at_dominant_gap() {
        // digits 0,1 then a wide gap then letters 9,10,11
        let chars = vec![
            (0u32, 1.0, bx(10, 20)),
            (1, 1.0, bx(40, 20)),
            (9, 1.0, bx(120, 20)),
            (10, 1.0, bx(150, 20)),
            (11, 1.0, bx(180, 20)),
        ];
        let plate = assemble_plate_string(&chars, 0).unwrap();
        assert_eq!(plate.digit_ids(), vec![0, 1]);
        assert_eq!(plate.letter_ids(), vec![9, 10, 11]);
        assert!(plate.digits.iter().all(|c| !c.zone_mismatch));
        assert!(plate.letters.iter().all(|c| !c.zone_mismatch));
    }

    #[test]
    fn assemble_uniform_gaps_split_leftmost() {
        let chars = vec![
            (0u32, 1.0, bx(0, 10)),
            (1, 1.0, bx(20, 10)),
            (2, 1.0, bx(40, 10)),
        ];
        let plate = assemble_plate_string(&chars, 0).unwrap();
        assert_eq!(plate.digit_ids(), vec![0]);
        // the rest land in the letter zone and get flagged
        assert_eq!(plate.letter_ids(), vec![1, 2]);
        assert!(plate.letters.iter().all(|c| c.zone_mismatch));
    }

    #[test]
    fn assemble_single_crop_goes_by_kind() {
        let plate = assemble_plate_string(&[(14, 0.5, bx(5, 20))], 2).unwrap();
        assert!(plate.digits.is_empty());
        assert_eq!(plate.letter_ids(), vec![14]);
        assert_eq!(plate.rejected, 2);
    }

    #[test]
    fn assemble_empty_is_error() {
        assert!(assemble_plate_string(&[], 0).is_err());
    }

    #[test]
    fn zone_mismatch_is_flagged() {
        // a letter classified on the digit side of the gap
        let chars = vec![
            (9u32, 1.0, bx(10, 20)),
            (0, 1.0, bx(40, 20)),
            (10, 1.0, bx(150, 20)),
            (11, 1.0, bx(180, 20)),
        ];
        let plate = assemble_plate_string(&chars, 0).unwrap();
        assert!(plate.digits[0].zone_mismatch);
        assert!(!plate.digits[1].zone_mismatch);
    }
}
