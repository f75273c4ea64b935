//! Classical vehicle license plate detection and recognition.
//!
//! The crate implements a statistical (non-neural) pipeline for plates
//! with dark characters on a bright field, split by a vertical bar into
//! a digit group and a letter group:
//!
//! 1. **imaging** – grayscale, Prewitt edges, dilation, Otsu, connected
//!    components, rotation, resize, crop.
//! 2. **detect** – edge-based plate localization plus a rotation sweep
//!    that aligns the plate with the horizontal axis.
//! 3. **segment** – character extraction from a plate image by
//!    binarization, component labeling and ratio filtering.
//! 4. **features** – PCA projections for characters and blockwise
//!    8x8 DCT with zigzag coefficient selection for whole plates.
//! 5. **classify** – minimum-distance KNN, a linear one-vs-rest SVM
//!    trained by deterministic subgradient descent, leave-one-out risk.
//! 6. **pipeline** – end-to-end character-string reading and whole-plate
//!    identification against an enrolled gallery.
//! 7. **synthgen** – deterministic synthetic scene generator with exact
//!    ground truth, used for training and evaluation corpora.
//! 8. **evaluate** – detection matching and the precision/recall/accuracy
//!    semantics used by the reporting tables.
//! 9. **persist**/**config** – text model files and runtime configuration.

pub mod classify;
pub mod config;
pub mod detect;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod imaging;
pub mod persist;
pub mod pipeline;
pub mod segment;
pub mod synthgen;

pub use error::{Error, Result};
