use lpr_core::detect::*;
use lpr_core::imaging::BBox;
use lpr_core::synthgen::{render_scene, SceneSpec};

fn main() {
    for skew in [-8.0f64, -4.0, 5.5, 10.0] {
        let spec = SceneSpec {
            seed: 5,
            digits: vec![0, 4, 8],
            letters: vec![9, 14, 23],
            skew,
            scale: 400,
            position: BBox::new(760, 440, 400, 200),
            noise_sigma: 2.0,
            illum_slope: 10,
            clutter: 4,
            subtitle: true,
            identity: 0,
            view: 0,
        };
        let (scene, truth) = render_scene(&spec).unwrap();
        let cands = find_plate_candidates(&scene, &DetectConfig::default()).unwrap();
        println!("skew {skew}: truth bbox {:?}", truth.scene_bbox());
        for (i, c) in cands.iter().take(5).enumerate() {
            println!(
                "  cand {i}: {:?} score {:.3} iou {:.3}",
                c.bbox,
                c.score,
                c.bbox.iou(&truth.scene_bbox())
            );
        }
    }
}
