//! Deterministic synthetic plate scene generator with exact ground
//! truth, used to build training and evaluation corpora.

mod corpus;
mod glyphs;
mod render;
mod trig;

pub use corpus::{
    display_text, generate_corpus, read_manifest, CorpusRanges, SceneRecord,
};
pub use render::{render_plate, render_scene, GlyphTruth, GroundTruth, SceneSpec, SCENE_H, SCENE_W};
pub use trig::det_sin_cos;
