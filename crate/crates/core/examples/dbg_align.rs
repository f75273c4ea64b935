use lpr_core::detect::*;
use lpr_core::imaging::*;
use lpr_core::synthgen::*;

fn main() {
    let eval_dir = tempfile::tempdir().unwrap();
    let (_, recs) = generate_corpus(60, 7, &CorpusRanges::default(), eval_dir.path()).unwrap();
    // pick the skew -0.6 failing record
    for rec in recs.iter().filter(|r| (r.skew + 0.6).abs() < 0.1 || (r.skew + 1.9).abs() < 0.1) {
        let scene = io::read_pgm(&eval_dir.path().join(&rec.image)).unwrap();
        let cfg = DetectConfig::default();
        let cands = find_plate_candidates(&scene, &cfg).unwrap();
        println!("skew {:.2} truth {:?}", rec.skew, rec.scene_bbox());
        let Some(top) = cands.first() else { println!("  no candidates!"); continue };
        println!("  top cand {:?} score {:.3} iou {:.3}", top.bbox, top.score, top.bbox.iou(&rec.scene_bbox()));
        // replicate the sweep line detection at a few angles with diagnostics
        let b = &top.bbox;
        for angle in [rec.skew * -1.0, 0.0, 2.0] {
            // inline rotate_window logic via extract-style: use alignment_angle? private.
            // use rotate_about_center on a crop around the box center instead
            let pad = 0usize;
            let _ = pad;
            let win = {
                // emulate: crop box then rotate (approx for diagnosis)
                let cropped = crop(&scene, b).unwrap();
                rotate_about_center(&cropped, angle, 255).unwrap()
            };
            let (hm, _) = prewitt_edges(&win, cfg.prewitt_threshold).unwrap();
            let lab = connected_components(&hm, Connectivity::Eight);
            let h = win.height();
            let min_w = (win.width() * 2) / 5;
            let mut info: Vec<(usize, usize, usize, bool)> = lab
                .components
                .iter()
                .map(|c| {
                    let cy = c.bbox.y + c.bbox.h / 2;
                    let pos_ok = cy * 100 >= h * 12 && cy * 100 <= h * 88;
                    (c.bbox.w, c.bbox.y, c.bbox.h, pos_ok && c.bbox.w >= min_w)
                })
                .collect();
            info.sort_by(|a, b| b.0.cmp(&a.0));
            println!("    angle {angle:+.1}: min_w {min_w}, top comps (w,y,h,pass): {:?}", &info[..info.len().min(6)]);
        }
    }
}
