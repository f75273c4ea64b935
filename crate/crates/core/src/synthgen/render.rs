//! Plate and scene rasterization with exact ground truth.
//!
//! Glyph geometry is drawn with pure integer arithmetic: stroke hit
//! tests compare squared distances scaled by squared segment lengths,
//! so corpora are bit-identical regardless of host. Skew compositing
//! and noise use fixed-sequence f64 paths that are deterministic for a
//! given seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{BBox, GrayImage};
use crate::pipeline::alphabet::{symbol, SymbolId, SymbolKind};

use super::glyphs::{glyph, Stroke, DESIGN_H};
use super::trig::det_sin_cos;

// plate palette
const INK: u8 = 25;
const FIELD: u8 = 248;
const BAND: u8 = 70;
const BORDER: u8 = 45;
const BAR: u8 = 60;

pub const SCENE_W: usize = 1920;
pub const SCENE_H: usize = 1080;

/// Everything needed to render one scene deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub digits: Vec<SymbolId>,
    pub letters: Vec<SymbolId>,
    /// In-plane plate rotation in degrees, within the sweep range.
    pub skew: f64,
    /// Plate width in pixels; height is width / 2.
    pub scale: usize,
    /// Pre-skew plate placement in the scene.
    pub position: BBox,
    pub noise_sigma: f64,
    /// Background intensity at the left/right edges differs from the
    /// center by +-illum_slope/2.
    pub illum_slope: i64,
    /// Number of background clutter rectangles.
    pub clutter: usize,
    pub subtitle: bool,
    pub identity: u32,
    pub view: u32,
}

impl SceneSpec {
    pub fn plate_height(&self) -> usize {
        self.scale / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits.is_empty() && self.letters.is_empty() {
            return Err(Error::invalid("plate text is empty"));
        }
        if self.digits.len() > 4 || self.letters.len() > 4 {
            return Err(Error::invalid("at most 4 symbols per group"));
        }
        for &id in &self.digits {
            if symbol(id)?.kind != SymbolKind::Digit {
                return Err(Error::invalid(format!("symbol {id} is not a digit")));
            }
        }
        for &id in &self.letters {
            if symbol(id)?.kind != SymbolKind::Letter {
                return Err(Error::invalid(format!("symbol {id} is not a letter")));
            }
        }
        if self.skew.abs() > 10.0 {
            return Err(Error::invalid(format!("skew {} outside [-10,10]", self.skew)));
        }
        if self.scale < 100 {
            return Err(Error::invalid("plate scale below 100 px"));
        }
        if self.position.w != self.scale || self.position.h != self.plate_height() {
            return Err(Error::invalid("position box must match scale"));
        }
        if self.position.right() > SCENE_W || self.position.bottom() > SCENE_H {
            return Err(Error::invalid("plate position outside the frame"));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::invalid("noise sigma must be >= 0"));
        }
        Ok(())
    }
}

/// Exact per-scene ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlyphTruth {
    pub symbol: SymbolId,
    /// Ink bounding box in plate coordinates.
    pub bbox: BBox,
    pub ink_pixels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Pre-skew plate rectangle in scene coordinates.
    pub plate_box: BBox,
    pub skew: f64,
    pub digits: Vec<SymbolId>,
    pub letters: Vec<SymbolId>,
    pub glyphs: Vec<GlyphTruth>,
    pub identity: u32,
    pub view: u32,
}

impl GroundTruth {
    /// Scene positions of the plate's four corners (clockwise from
    /// top-left), with the skew applied about the plate center.
    pub fn scene_corners(&self) -> [[f64; 2]; 4] {
        let b = &self.plate_box;
        let (cx, cy) = b.center();
        let (sin, cos) = det_sin_cos(self.skew);
        let corner = |x: f64, y: f64| -> [f64; 2] {
            let dx = x - cx;
            let dy = y - cy;
            // content point q appears at c + M(-skew) (q - c)
            [cx + dx * cos - dy * sin, cy + dx * sin + dy * cos]
        };
        [
            corner(b.x as f64, b.y as f64),
            corner(b.right() as f64, b.y as f64),
            corner(b.right() as f64, b.bottom() as f64),
            corner(b.x as f64, b.bottom() as f64),
        ]
    }

    /// Axis-aligned bounds of the skewed plate, as an integer box for
    /// detection matching.
    pub fn scene_bbox(&self) -> BBox {
        let c = self.scene_corners();
        let xs: Vec<f64> = c.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = c.iter().map(|p| p[1]).collect();
        let x0 = xs.iter().cloned().fold(f64::INFINITY, f64::min).floor().max(0.0) as usize;
        let y0 = ys.iter().cloned().fold(f64::INFINITY, f64::min).floor().max(0.0) as usize;
        let x1 = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as usize;
        let y1 = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as usize;
        BBox::new(x0, y0, x1.saturating_sub(x0).max(1), y1.saturating_sub(y0).max(1))
    }
}

struct InkTracker {
    min_x: usize,
    min_y: usize,
    max_x: usize,
    max_y: usize,
    count: usize,
}

impl InkTracker {
    fn new() -> Self {
        InkTracker {
            min_x: usize::MAX,
            min_y: usize::MAX,
            max_x: 0,
            max_y: 0,
            count: 0,
        }
    }

    fn mark(&mut self, x: usize, y: usize) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
        self.count += 1;
    }

    fn bbox(&self) -> Option<BBox> {
        if self.count == 0 {
            None
        } else {
            Some(BBox::new(
                self.min_x,
                self.min_y,
                self.max_x - self.min_x + 1,
                self.max_y - self.min_y + 1,
            ))
        }
    }
}

/// Integer point-to-segment hit test: distance(p, seg) <= r, all in i64.
fn seg_hit(px: i64, py: i64, ax: i64, ay: i64, bx: i64, by: i64, r: i64) -> bool {
    let (apx, apy) = (px - ax, py - ay);
    let (abx, aby) = (bx - ax, by - ay);
    let len2 = abx * abx + aby * aby;
    let dot = apx * abx + apy * aby;
    if len2 == 0 || dot <= 0 {
        return apx * apx + apy * apy <= r * r;
    }
    if dot >= len2 {
        let (bpx, bpy) = (px - bx, py - by);
        return bpx * bpx + bpy * bpy <= r * r;
    }
    let ap2 = apx * apx + apy * apy;
    ap2 * len2 - dot * dot <= r * r * len2
}

fn draw_thick_seg(
    img: &mut GrayImage,
    ink: u8,
    track: Option<&mut InkTracker>,
    a: (i64, i64),
    b: (i64, i64),
    r: i64,
) {
    let x0 = (a.0.min(b.0) - r).max(0);
    let x1 = (a.0.max(b.0) + r).min(img.width() as i64 - 1);
    let y0 = (a.1.min(b.1) - r).max(0);
    let y1 = (a.1.max(b.1) + r).min(img.height() as i64 - 1);
    let mut tracker = track;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if seg_hit(x, y, a.0, a.1, b.0, b.1, r) {
                let (ux, uy) = (x as usize, y as usize);
                if img.get(ux, uy) != ink {
                    img.set(ux, uy, ink);
                    if let Some(t) = tracker.as_deref_mut() {
                        t.mark(ux, uy);
                    }
                }
            }
        }
    }
}

fn fill_rect(img: &mut GrayImage, bx: &BBox, v: u8) {
    for y in bx.y..bx.bottom().min(img.height()) {
        for x in bx.x..bx.right().min(img.width()) {
            img.set(x, y, v);
        }
    }
}

/// Rasterize one glyph into a pixel cell. Returns its exact ink box and
/// pixel count.
fn draw_glyph(img: &mut GrayImage, id: SymbolId, cell: &BBox) -> GlyphTruth {
    let def = glyph(id);
    let mut track = InkTracker::new();
    let sx = |ux: i64| -> i64 { cell.x as i64 + (ux * (cell.w as i64 - 1) + def.width / 2) / def.width };
    let sy = |uy: i64| -> i64 { cell.y as i64 + (uy * (cell.h as i64 - 1) + DESIGN_H / 2) / DESIGN_H };
    let sr = |t: i64| -> i64 { ((t * (cell.h as i64 - 1) + DESIGN_H) / (2 * DESIGN_H)).max(1) };
    for s in def.strokes {
        match *s {
            Stroke::Seg(x1, y1, x2, y2, t) => draw_thick_seg(
                img,
                INK,
                Some(&mut track),
                (sx(x1), sy(y1)),
                (sx(x2), sy(y2)),
                sr(t),
            ),
            Stroke::Dot(cx, cy, r) => {
                let p = (sx(cx), sy(cy));
                draw_thick_seg(img, INK, Some(&mut track), p, p, sr(2 * r));
            }
        }
    }
    GlyphTruth {
        symbol: id,
        bbox: track.bbox().expect("glyph produced no ink"),
        ink_pixels: track.count,
    }
}

/// Render the plate image itself (no skew, no noise): border frame, top
/// band, white field, separator bar, glyph groups, optional subtitle.
pub fn render_plate(spec: &SceneSpec) -> Result<(GrayImage, GroundTruth)> {
    spec.validate()?;
    let w = spec.scale;
    let h = spec.plate_height();
    let mut img = GrayImage::new(w, h, FIELD);

    // border frame
    let bt = (h * 3 / 100).max(2);
    fill_rect(&mut img, &BBox::new(0, 0, w, bt), BORDER);
    fill_rect(&mut img, &BBox::new(0, h - bt, w, bt), BORDER);
    fill_rect(&mut img, &BBox::new(0, 0, bt, h), BORDER);
    fill_rect(&mut img, &BBox::new(w - bt, 0, bt, h), BORDER);

    // top band
    fill_rect(&mut img, &BBox::new(bt, bt, w - 2 * bt, h * 20 / 100 - bt), BAND);

    // separator bar
    let bar_w = (w * 2 / 100).max(3);
    let bar_x = w / 2 - bar_w / 2;
    fill_rect(
        &mut img,
        &BBox::new(bar_x, h * 24 / 100, bar_w, h * 88 / 100 - h * 24 / 100),
        BAR,
    );

    // glyph rows
    let row_y = h * 28 / 100;
    let row_h = h * 62 / 100;
    let mut glyphs = Vec::new();
    let mut lay_group = |ids: &[SymbolId], zone_x: usize, zone_w: usize, img: &mut GrayImage, out: &mut Vec<GlyphTruth>| {
        if ids.is_empty() {
            return;
        }
        let pitch = zone_w / ids.len();
        for (i, &id) in ids.iter().enumerate() {
            let def = glyph(id);
            let natural = (def.width * (row_h as i64 - 1) / DESIGN_H) as usize;
            let cw = natural.min(pitch * 78 / 100).max(4);
            let x0 = zone_x + i * pitch + (pitch - cw) / 2;
            let cell = BBox::new(x0, row_y, cw, row_h);
            out.push(draw_glyph(img, id, &cell));
        }
    };
    lay_group(&spec.digits, w * 7 / 100, w * 39 / 100, &mut img, &mut glyphs);
    lay_group(&spec.letters, w * 54 / 100, w * 39 / 100, &mut img, &mut glyphs);

    // bottom Latin subtitle: five small blocks reading as distant text
    if spec.subtitle {
        let sh = (h * 4 / 100).max(2);
        let sy = h * 93 / 100;
        let bw = sh * 3 / 4 + 1;
        let gap = sh / 2 + 1;
        let total = 5 * bw + 4 * gap;
        let sx = w / 2 - total / 2;
        for i in 0..5 {
            fill_rect(&mut img, &BBox::new(sx + i * (bw + gap), sy, bw, sh), BAR);
        }
    }

    let truth = GroundTruth {
        plate_box: spec.position,
        skew: spec.skew,
        digits: spec.digits.clone(),
        letters: spec.letters.clone(),
        glyphs,
        identity: spec.identity,
        view: spec.view,
    };
    Ok((img, truth))
}

fn scene_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&0x7370616e5f6c7072u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Render a full 1920x1080 scene: illumination-graded background,
/// clutter rectangles, the plate composited at its position with skew,
/// then additive Gaussian noise.
pub fn render_scene(spec: &SceneSpec) -> Result<(GrayImage, GroundTruth)> {
    let (plate, truth) = render_plate(spec)?;

    let mut img = GrayImage::new(SCENE_W, SCENE_H, 0);
    let mut rng = scene_rng(spec.seed, 1);
    let base = 100 + (rng.gen::<u64>() % 41) as i64;

    // horizontal illumination gradient
    for x in 0..SCENE_W {
        let v = base + spec.illum_slope * (2 * x as i64 - (SCENE_W as i64 - 1)) / (2 * (SCENE_W as i64 - 1));
        let v = v.clamp(0, 255) as u8;
        for y in 0..SCENE_H {
            img.set(x, y, v);
        }
    }

    // clutter rectangles, kept away from the plate and one another
    let keep_out = truth.scene_bbox().grown(40, SCENE_W, SCENE_H);
    let mut placed: Vec<BBox> = Vec::new();
    let mut attempts = 0;
    while placed.len() < spec.clutter && attempts < spec.clutter * 20 {
        attempts += 1;
        let cw = 30 + (rng.gen::<u64>() % 170) as usize;
        // box aspect w/h forced outside the plate band: squarish
        // (0.8..1.25) or much taller than wide (0.22..0.3)
        let ch = if rng.gen::<bool>() {
            (cw as f64 * (3.3 + (rng.gen::<u64>() % 100) as f64 / 80.0)) as usize
        } else {
            (cw as f64 * (0.8 + (rng.gen::<u64>() % 46) as f64 / 100.0)) as usize
        }
        .clamp(20, 400);
        let x = (rng.gen::<u64>() % (SCENE_W - cw) as u64) as usize;
        let y = (rng.gen::<u64>() % (SCENE_H - ch) as u64) as usize;
        let bx = BBox::new(x, y, cw, ch);
        if bx.iou(&keep_out) > 0.0 || bx.grown(10, SCENE_W, SCENE_H).iou(&keep_out) > 0.0 {
            continue;
        }
        if placed.iter().any(|p| p.grown(10, SCENE_W, SCENE_H).iou(&bx) > 0.0) {
            continue;
        }
        let delta = 20 + (rng.gen::<u64>() % 61) as i64;
        let v = if rng.gen::<bool>() { base + delta } else { base - delta };
        fill_rect(&mut img, &bx, v.clamp(0, 255) as u8);
        placed.push(bx);
    }

    // composite the plate
    let pos = &spec.position;
    if spec.skew == 0.0 {
        for y in 0..pos.h {
            for x in 0..pos.w {
                img.set(pos.x + x, pos.y + y, plate.get(x, y));
            }
        }
    } else {
        let (sin, cos) = det_sin_cos(spec.skew);
        let (ccx, ccy) = pos.center();
        let pcx = (pos.w as f64 - 1.0) / 2.0;
        let pcy = (pos.h as f64 - 1.0) / 2.0;
        let region = truth.scene_bbox().grown(2, SCENE_W, SCENE_H);
        for y in region.y..region.bottom() {
            let dy = y as f64 - ccy;
            for x in region.x..region.right() {
                let dx = x as f64 - ccx;
                // sample source: rotate destination offset by +skew
                let sx = pcx + dx * cos + dy * sin;
                let sy = pcy - dx * sin + dy * cos;
                if let Some(v) = plate.sample_bilinear(sx, sy) {
                    img.set(x, y, v.round().clamp(0.0, 255.0) as u8);
                }
            }
        }
    }

    // additive Gaussian noise, clamped
    if spec.noise_sigma > 0.0 {
        let mut nrng = scene_rng(spec.seed, 2);
        let normal = Normal::new(0.0f64, spec.noise_sigma).expect("sigma >= 0");
        let w = img.width();
        for y in 0..SCENE_H {
            for x in 0..w {
                let n = normal.sample(&mut nrng);
                let v = (img.get(x, y) as f64 + n).round().clamp(0.0, 255.0) as u8;
                img.set(x, y, v);
            }
        }
    }

    Ok((img, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spec() -> SceneSpec {
        SceneSpec {
            seed: 7,
            digits: vec![0, 1, 2],
            letters: vec![9, 10, 11],
            skew: 0.0,
            scale: 384,
            position: BBox::new(700, 450, 384, 192),
            noise_sigma: 0.0,
            illum_slope: 0,
            clutter: 0,
            subtitle: true,
            identity: 0,
            view: 0,
        }
    }

    #[test]
    fn plate_rendering_is_deterministic() {
        let spec = base_spec();
        let (a, ta) = render_plate(&spec).unwrap();
        let (b, tb) = render_plate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }

    #[test]
    fn glyph_count_matches_text() {
        let spec = base_spec();
        let (_, truth) = render_plate(&spec).unwrap();
        assert_eq!(truth.glyphs.len(), 6);
        // ordered: digits then letters, left to right
        for pair in truth.glyphs.windows(2) {
            assert!(pair[0].bbox.x < pair[1].bbox.x);
        }
    }

    #[test]
    fn glyph_boxes_disjoint_and_inside() {
        let spec = base_spec();
        let (img, truth) = render_plate(&spec).unwrap();
        for g in &truth.glyphs {
            assert!(g.bbox.right() <= img.width() && g.bbox.bottom() <= img.height());
        }
        for i in 0..truth.glyphs.len() {
            for j in (i + 1)..truth.glyphs.len() {
                assert_eq!(truth.glyphs[i].bbox.iou(&truth.glyphs[j].bbox), 0.0);
            }
        }
    }

    #[test]
    fn ink_is_noise_independent() {
        let mut spec = base_spec();
        let (_, t1) = render_plate(&spec).unwrap();
        spec.noise_sigma = 4.0;
        spec.seed = 99;
        let (_, t2) = render_plate(&spec).unwrap();
        for (a, b) in t1.glyphs.iter().zip(&t2.glyphs) {
            assert_eq!(a.ink_pixels, b.ink_pixels);
        }
    }

    #[test]
    fn zero_skew_scene_pastes_exactly() {
        let spec = base_spec();
        let (plate, _) = render_plate(&spec).unwrap();
        let (scene, truth) = render_scene(&spec).unwrap();
        for y in 0..spec.position.h {
            for x in 0..spec.position.w {
                assert_eq!(
                    scene.get(spec.position.x + x, spec.position.y + y),
                    plate.get(x, y)
                );
            }
        }
        assert_eq!(truth.scene_bbox(), spec.position);
    }

    #[test]
    fn skewed_corners_are_rotated_exactly() {
        let mut spec = base_spec();
        spec.skew = 6.0;
        let (_, truth) = render_scene(&spec).unwrap();
        let corners = truth.scene_corners();
        let (cx, cy) = spec.position.center();
        let (sin, cos) = det_sin_cos(6.0);
        // top-left corner
        let dx = spec.position.x as f64 - cx;
        let dy = spec.position.y as f64 - cy;
        assert!((corners[0][0] - (cx + dx * cos - dy * sin)).abs() < 1e-12);
        assert!((corners[0][1] - (cy + dx * sin + dy * cos)).abs() < 1e-12);
    }

    #[test]
    fn scene_rendering_is_deterministic() {
        let mut spec = base_spec();
        spec.noise_sigma = 4.0;
        spec.clutter = 6;
        spec.illum_slope = 20;
        spec.skew = -3.5;
        let (a, _) = render_scene(&spec).unwrap();
        let (b, _) = render_scene(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = base_spec();
        spec.digits.clear();
        spec.letters.clear();
        assert!(render_plate(&spec).is_err());

        let mut spec = base_spec();
        spec.skew = 12.0;
        assert!(render_scene(&spec).is_err());

        let mut spec = base_spec();
        spec.position = BBox::new(1800, 1000, 384, 192);
        assert!(render_scene(&spec).is_err());

        let mut spec = base_spec();
        spec.digits = vec![14]; // a letter in the digit group
        assert!(render_plate(&spec).is_err());
    }
}
