//! The 26-symbol plate alphabet: nine Eastern Arabic (Hindi) digits and
//! seventeen plate-legal Arabic letters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolKind {
    Digit,
    Letter,
}

/// Stable identifier of one alphabet symbol (0..26).
pub type SymbolId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symbol {
    pub id: SymbolId,
    /// ASCII-safe name used in manifests and model files.
    pub name: &'static str,
    /// Display glyph (visual form).
    pub glyph: char,
    pub kind: SymbolKind,
}

/// Digits first (ids 0..=8 for one through nine), then the letters
/// (ids 9..=25). Letters are stored in visual left-to-right order;
/// right-to-left presentation is the consumer's concern.
pub const ALPHABET: [Symbol; 26] = [
    Symbol { id: 0, name: "1", glyph: '١', kind: SymbolKind::Digit },
    Symbol { id: 1, name: "2", glyph: '٢', kind: SymbolKind::Digit },
    Symbol { id: 2, name: "3", glyph: '٣', kind: SymbolKind::Digit },
    Symbol { id: 3, name: "4", glyph: '٤', kind: SymbolKind::Digit },
    Symbol { id: 4, name: "5", glyph: '٥', kind: SymbolKind::Digit },
    Symbol { id: 5, name: "6", glyph: '٦', kind: SymbolKind::Digit },
    Symbol { id: 6, name: "7", glyph: '٧', kind: SymbolKind::Digit },
    Symbol { id: 7, name: "8", glyph: '٨', kind: SymbolKind::Digit },
    Symbol { id: 8, name: "9", glyph: '٩', kind: SymbolKind::Digit },
    Symbol { id: 9, name: "alef", glyph: 'أ', kind: SymbolKind::Letter },
    Symbol { id: 10, name: "beh", glyph: 'ب', kind: SymbolKind::Letter },
    Symbol { id: 11, name: "gim", glyph: 'ج', kind: SymbolKind::Letter },
    Symbol { id: 12, name: "dal", glyph: 'د', kind: SymbolKind::Letter },
    Symbol { id: 13, name: "reh", glyph: 'ر', kind: SymbolKind::Letter },
    Symbol { id: 14, name: "sin", glyph: 'س', kind: SymbolKind::Letter },
    Symbol { id: 15, name: "sad", glyph: 'ص', kind: SymbolKind::Letter },
    Symbol { id: 16, name: "tah", glyph: 'ط', kind: SymbolKind::Letter },
    Symbol { id: 17, name: "ain", glyph: 'ع', kind: SymbolKind::Letter },
    Symbol { id: 18, name: "feh", glyph: 'ف', kind: SymbolKind::Letter },
    Symbol { id: 19, name: "qaf", glyph: 'ق', kind: SymbolKind::Letter },
    Symbol { id: 20, name: "lam", glyph: 'ل', kind: SymbolKind::Letter },
    Symbol { id: 21, name: "mim", glyph: 'م', kind: SymbolKind::Letter },
    Symbol { id: 22, name: "nun", glyph: 'ن', kind: SymbolKind::Letter },
    Symbol { id: 23, name: "heh", glyph: 'ه', kind: SymbolKind::Letter },
    Symbol { id: 24, name: "waw", glyph: 'و', kind: SymbolKind::Letter },
    Symbol { id: 25, name: "yeh", glyph: 'ى', kind: SymbolKind::Letter },
];

pub fn symbol(id: SymbolId) -> Result<&'static Symbol> {
    ALPHABET
        .get(id as usize)
        .ok_or_else(|| Error::invalid(format!("unknown symbol id {id}")))
}

pub fn symbol_by_name(name: &str) -> Result<&'static Symbol> {
    ALPHABET
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::invalid(format!("unknown symbol name {name:?}")))
}

pub fn digits() -> impl Iterator<Item = &'static Symbol> {
    ALPHABET.iter().filter(|s| s.kind == SymbolKind::Digit)
}

pub fn letters() -> impl Iterator<Item = &'static Symbol> {
    ALPHABET.iter().filter(|s| s.kind == SymbolKind::Letter)
}
