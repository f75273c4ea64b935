//! Image file I/O. PGM (P5, maxval 255) is the bit-exact interchange
//! format for fixtures and corpora; PNG is supported for external
//! images and debug output.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::{GrayImage, RgbImage};

/// Write a binary PGM (P5) file. The encoding is canonical: fixed header
/// layout, maxval 255, raw payload, so identical images produce identical
/// bytes.
pub fn write_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(img.data().len() + 32);
    write!(buf, "P5\n{} {}\n255\n", img.width(), img.height())
        .expect("in-memory write cannot fail");
    buf.extend_from_slice(img.data());
    write_atomic(path, &buf)
}

/// Read a binary PGM (P5) file, accepting `#` comments and arbitrary
/// whitespace in the header.
pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes).map_err(|msg| Error::invalid(format!("{}: {msg}", path.display())))
}

fn parse_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    let skip_ws = |pos: &mut usize| {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            } else {
                break;
            }
        }
    };
    let token = |pos: &mut usize| -> std::result::Result<usize, String> {
        skip_ws(pos);
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        std::str::from_utf8(&bytes[start..*pos])
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| "malformed header token".to_string())
    };

    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err("not a P5 PGM".to_string());
    }
    let mut pos = 2usize;
    let width = token(&mut pos)?;
    let height = token(&mut pos)?;
    let maxval = token(&mut pos)?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}"));
    }
    // exactly one whitespace byte separates header from payload
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err("missing header terminator".to_string());
    }
    pos += 1;
    let need = width * height;
    if bytes.len() - pos < need {
        return Err(format!(
            "payload too short: {} < {need}",
            bytes.len() - pos
        ));
    }
    GrayImage::from_vec(width, height, bytes[pos..pos + need].to_vec())
        .map_err(|e| e.to_string())
}

/// Read any PNG and return it as interleaved RGB.
pub fn read_png_rgb(path: &Path) -> Result<RgbImage> {
    let dynimg = image::open(path)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    let rgb = dynimg.to_rgb8();
    RgbImage::from_vec(rgb.width() as usize, rgb.height() as usize, rgb.into_raw())
}

/// Write a grayscale PNG (debug artifacts).
pub fn write_png_gray(img: &GrayImage, path: &Path) -> Result<()> {
    let buf = image::GrayImage::from_raw(
        img.width() as u32,
        img.height() as u32,
        img.data().to_vec(),
    )
    .expect("buffer length validated by construction");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

/// Read an image by extension: `.pgm` as grayscale, `.png` converted
/// through ITU-R 601 luma.
pub fn read_gray_auto(path: &Path) -> Result<GrayImage> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => read_pgm(path),
        Some("png") => {
            let rgb = read_png_rgb(path)?;
            super::to_grayscale(&rgb)
        }
        other => Err(Error::invalid(format!(
            "unsupported image extension {:?} for {}",
            other,
            path.display()
        ))),
    }
}

/// Write `bytes` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string())
    ));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
