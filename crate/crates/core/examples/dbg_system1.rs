use lpr_core::detect::DetectConfig;
use lpr_core::imaging::io::read_pgm;
use lpr_core::pipeline::*;
use lpr_core::segment::SegmentConfig;
use lpr_core::synthgen::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let train_dir = tempfile::tempdir().unwrap();
    let train_ranges = CorpusRanges {
        char_coverage: Some(10),
        ..CorpusRanges::default()
    };
    let (_, train_recs) = generate_corpus(0, 42, &train_ranges, train_dir.path()).unwrap();
    println!("train scenes: {} ({:?})", train_recs.len(), t0.elapsed());

    let mut samples = Vec::new();
    for rec in &train_recs {
        let scene = read_pgm(&train_dir.path().join(&rec.image)).unwrap();
        samples.extend(harvest_gt_chars(&scene, rec, (24, 24)).unwrap());
    }
    println!("harvested {} chars ({:?})", samples.len(), t0.elapsed());

    let models = train_char_models(&samples, &CharTrainConfig::default()).unwrap();
    println!(
        "trained: {} cols, reject {:.3} ({:?})",
        models.knn.columns.len(),
        models.knn.reject_threshold.unwrap(),
        t0.elapsed()
    );

    // eval corpus
    let eval_dir = tempfile::tempdir().unwrap();
    let (_, eval_recs) = generate_corpus(60, 7, &CorpusRanges::default(), eval_dir.path()).unwrap();
    let det = DetectConfig::default();
    let seg = SegmentConfig::default();
    let mut exact = 0;
    let mut no_plate = 0;
    let mut errs = 0;
    let mut char_ok = 0;
    let mut char_total = 0;
    let t1 = Instant::now();
    for rec in &eval_recs {
        let scene = read_pgm(&eval_dir.path().join(&rec.image)).unwrap();
        match recognize_plate_chars(&scene, &det, &seg, &models) {
            Ok(ps) => {
                let got_d = ps.digit_ids();
                let got_l = ps.letter_ids();
                char_total += rec.digits.len() + rec.letters.len();
                // count per-char greedy position matches within groups
                for (a, b) in got_d.iter().zip(&rec.digits) {
                    if a == b { char_ok += 1; }
                }
                for (a, b) in got_l.iter().zip(&rec.letters) {
                    if a == b { char_ok += 1; }
                }
                if got_d == rec.digits && got_l == rec.letters && ps.rejected == 0 {
                    exact += 1;
                } else {
                    println!(
                        "  miss: want {:?}+{:?} got {:?}+{:?} rej {} skew {:.1} scale {}",
                        rec.digits, rec.letters, got_d, got_l, ps.rejected, rec.skew, rec.scale
                    );
                }
            }
            Err(lpr_core::Error::NoPlateFound) => { no_plate += 1; println!("  NO PLATE skew {:.1}", rec.skew); }
            Err(e) => { errs += 1; println!("  ERR {e} skew {:.1}", rec.skew); }
        }
    }
    println!(
        "exact {}/{} no_plate {} errs {} char {}/{} | recog time {:?} total {:?}",
        exact, eval_recs.len(), no_plate, errs, char_ok, char_total,
        t1.elapsed(), t0.elapsed()
    );
}
