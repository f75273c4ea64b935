//! Embedded stroke tables for the 26 plate symbols.
//!
//! Each glyph lives on an integer design grid `width x 160` (y grows
//! downward) and is a list of thick segments and filled dots. Shapes are
//! schematic: mutually distinguishable and roughly faithful, with dots
//! placed either inside the glyph's ink extent or within merge distance
//! of a stroke so segmentation keeps them attached to their base glyph.
//! Every glyph spans at least 62% of the design height so the ratio
//! filters keep it even at the worst extraction scale.

use crate::pipeline::alphabet::SymbolId;

pub const DESIGN_H: i64 = 160;

#[derive(Debug, Clone, Copy)]
pub enum Stroke {
    /// Thick line segment (round caps): endpoints and full thickness.
    Seg(i64, i64, i64, i64, i64),
    /// Filled disc: center and radius.
    Dot(i64, i64, i64),
}

pub struct GlyphDef {
    pub width: i64,
    pub strokes: &'static [Stroke],
}

use Stroke::{Dot, Seg};

pub fn glyph(id: SymbolId) -> &'static GlyphDef {
    &GLYPHS[id as usize]
}

static GLYPHS: [GlyphDef; 26] = [
    // 0: digit one — single heavy vertical stroke
    GlyphDef { width: 56, strokes: &[Seg(28, 14, 28, 146, 28)] },
    // 1: digit two — top sweep, notch, long tail
    GlyphDef {
        width: 90,
        strokes: &[
            Seg(24, 28, 68, 14, 20),
            Seg(68, 14, 52, 64, 18),
            Seg(52, 64, 26, 146, 22),
        ],
    },
    // 2: digit three — zigzag crown, long tail
    GlyphDef {
        width: 96,
        strokes: &[
            Seg(16, 36, 30, 14, 16),
            Seg(30, 14, 44, 36, 16),
            Seg(44, 36, 58, 14, 16),
            Seg(58, 14, 72, 32, 16),
            Seg(72, 32, 40, 146, 22),
        ],
    },
    // 3: digit four — snake zigzag
    GlyphDef {
        width: 88,
        strokes: &[
            Seg(68, 14, 24, 46, 20),
            Seg(24, 46, 64, 78, 20),
            Seg(64, 78, 24, 112, 20),
            Seg(24, 112, 58, 146, 20),
        ],
    },
    // 4: digit five — diamond ring
    GlyphDef {
        width: 92,
        strokes: &[
            Seg(46, 38, 76, 92, 20),
            Seg(76, 92, 46, 146, 20),
            Seg(46, 146, 16, 92, 20),
            Seg(16, 92, 46, 38, 20),
        ],
    },
    // 5: digit six — top bar with steep descender
    GlyphDef {
        width: 92,
        strokes: &[Seg(16, 18, 76, 22, 20), Seg(76, 22, 42, 146, 22)],
    },
    // 6: digit seven — V
    GlyphDef {
        width: 96,
        strokes: &[Seg(16, 16, 48, 144, 22), Seg(48, 144, 80, 16, 22)],
    },
    // 7: digit eight — inverted V
    GlyphDef {
        width: 96,
        strokes: &[Seg(16, 144, 48, 16, 22), Seg(48, 16, 80, 144, 22)],
    },
    // 8: digit nine — small ring, right tail
    GlyphDef {
        width: 88,
        strokes: &[
            Seg(44, 14, 68, 48, 18),
            Seg(68, 48, 44, 84, 18),
            Seg(44, 84, 20, 48, 18),
            Seg(20, 48, 44, 14, 18),
            Seg(68, 48, 62, 142, 20),
        ],
    },
    // 9: alef — hamza tick joined to a tall stem
    GlyphDef {
        width: 64,
        strokes: &[Seg(16, 16, 44, 8, 14), Seg(32, 24, 32, 148, 24)],
    },
    // 10: beh — wide bowl, dot below
    GlyphDef {
        width: 110,
        strokes: &[
            Seg(14, 46, 18, 104, 18),
            Seg(18, 104, 92, 104, 18),
            Seg(92, 104, 96, 46, 18),
            Dot(55, 128, 11),
        ],
    },
    // 11: gim — bar, diagonal, bowl, dot inside
    GlyphDef {
        width: 96,
        strokes: &[
            Seg(22, 36, 78, 26, 18),
            Seg(78, 26, 36, 66, 18),
            Seg(36, 66, 22, 118, 18),
            Seg(22, 118, 80, 132, 18),
            Dot(56, 98, 10),
        ],
    },
    // 12: dal — angled bracket
    GlyphDef {
        width: 88,
        strokes: &[
            Seg(24, 38, 70, 48, 18),
            Seg(70, 48, 74, 112, 18),
            Seg(74, 112, 16, 122, 18),
        ],
    },
    // 13: reh — curving descender
    GlyphDef {
        width: 80,
        strokes: &[Seg(62, 40, 56, 96, 18), Seg(56, 96, 18, 142, 18)],
    },
    // 14: sin — three teeth and a tail bowl
    GlyphDef {
        width: 120,
        strokes: &[
            Seg(22, 104, 30, 48, 14),
            Seg(30, 48, 40, 104, 14),
            Seg(40, 104, 50, 48, 14),
            Seg(50, 48, 60, 104, 14),
            Seg(60, 104, 70, 48, 14),
            Seg(70, 48, 76, 124, 16),
            Seg(76, 124, 20, 138, 18),
        ],
    },
    // 15: sad — flat loop with tail bowl
    GlyphDef {
        width: 120,
        strokes: &[
            Seg(30, 64, 78, 58, 16),
            Seg(78, 58, 82, 96, 16),
            Seg(82, 96, 34, 102, 16),
            Seg(34, 102, 30, 64, 16),
            Seg(82, 96, 98, 102, 16),
            Seg(98, 102, 92, 138, 16),
            Seg(92, 138, 22, 144, 16),
        ],
    },
    // 16: tah — loop beside a tall stem
    GlyphDef {
        width: 104,
        strokes: &[
            Seg(28, 84, 72, 78, 16),
            Seg(72, 78, 76, 114, 16),
            Seg(76, 114, 32, 120, 16),
            Seg(32, 120, 28, 84, 16),
            Seg(84, 12, 84, 118, 20),
        ],
    },
    // 17: ain — two open curves
    GlyphDef {
        width: 88,
        strokes: &[
            Seg(70, 18, 30, 28, 16),
            Seg(30, 28, 26, 58, 16),
            Seg(26, 58, 64, 66, 16),
            Seg(64, 66, 24, 86, 16),
            Seg(24, 86, 20, 126, 18),
            Seg(20, 126, 72, 140, 18),
        ],
    },
    // 18: feh — loop on a boat bowl, one dot above
    GlyphDef {
        width: 110,
        strokes: &[
            Seg(80, 34, 98, 52, 13),
            Seg(98, 52, 80, 70, 13),
            Seg(80, 70, 62, 52, 13),
            Seg(62, 52, 80, 34, 13),
            Seg(12, 78, 16, 108, 16),
            Seg(16, 108, 92, 108, 16),
            Seg(92, 108, 96, 78, 16),
            Dot(80, 16, 10),
        ],
    },
    // 19: qaf — loop over a deep round bowl, two dots above
    GlyphDef {
        width: 110,
        strokes: &[
            Seg(80, 34, 98, 52, 13),
            Seg(98, 52, 80, 70, 13),
            Seg(80, 70, 62, 52, 13),
            Seg(62, 52, 80, 34, 13),
            Seg(12, 74, 22, 124, 16),
            Seg(22, 124, 92, 124, 16),
            Seg(92, 124, 96, 74, 16),
            Dot(66, 16, 9),
            Dot(94, 16, 9),
        ],
    },
    // 20: lam — tall stem with a left hook
    GlyphDef {
        width: 80,
        strokes: &[
            Seg(58, 12, 58, 118, 20),
            Seg(58, 118, 22, 142, 20),
            Seg(22, 142, 14, 118, 16),
        ],
    },
    // 21: mim — small loop with descender
    GlyphDef {
        width: 76,
        strokes: &[
            Seg(34, 52, 62, 64, 16),
            Seg(62, 64, 40, 86, 16),
            Seg(40, 86, 20, 68, 16),
            Seg(20, 68, 34, 52, 16),
            Seg(40, 86, 42, 142, 18),
        ],
    },
    // 22: nun — deep bowl, dot in the mouth
    GlyphDef {
        width: 96,
        strokes: &[
            Seg(18, 40, 22, 130, 18),
            Seg(22, 130, 74, 130, 18),
            Seg(74, 130, 78, 40, 18),
            Dot(48, 60, 11),
        ],
    },
    // 23: heh — rectangular ring
    GlyphDef {
        width: 84,
        strokes: &[
            Seg(20, 50, 64, 50, 16),
            Seg(64, 50, 64, 140, 16),
            Seg(64, 140, 20, 140, 16),
            Seg(20, 140, 20, 50, 16),
        ],
    },
    // 24: waw — ring with a sweeping left tail
    GlyphDef {
        width: 84,
        strokes: &[
            Seg(46, 40, 68, 64, 16),
            Seg(68, 64, 46, 88, 16),
            Seg(46, 88, 24, 64, 16),
            Seg(24, 64, 46, 40, 16),
            Seg(46, 88, 22, 140, 20),
        ],
    },
    // 25: yeh — flat S sweep
    GlyphDef {
        width: 104,
        strokes: &[
            Seg(74, 48, 30, 56, 16),
            Seg(30, 56, 26, 88, 16),
            Seg(26, 88, 78, 92, 16),
            Seg(78, 92, 82, 124, 16),
            Seg(82, 124, 20, 136, 16),
        ],
    },
];
