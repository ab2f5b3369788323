//! Character segmentation of vertically written pages: binarization,
//! run-length text-line detection, skew correction over a few candidate
//! angles, and component-based character boxes.

pub mod binarize;
pub mod boxes;
pub mod config;
pub mod image;
pub mod lines;
pub mod pgm;
pub mod refine;
pub mod skew;

use std::fmt::Write as _;

pub use binarize::binarize;
pub use boxes::{candidate_boxes, CharBox};
pub use config::SegConfig;
pub use image::{PageImage, PixelKind};
pub use lines::{detect_lines, runlength_profile, TextLine};
pub use refine::refine_boxes;
pub use skew::{estimate_skew, rotate};

use crate::error::{Error, Result};

/// Output of [`segment_page`]. Coordinates refer to the deskewed page.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub skew_angle: f64,
    pub lines: Vec<TextLine>,
    /// Boxes in reading order: right-to-left lines, top to bottom.
    pub boxes: Vec<CharBox>,
}

/// The deskewed binary page together with the segmentation.
pub fn segment_page_with_image(img: &PageImage, cfg: &SegConfig) -> Result<(PageImage, Segmentation)> {
    cfg.validate()?;
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::EmptyImage);
    }
    let bin = binarize(img)?;
    let skew_angle = estimate_skew(&bin, cfg);
    let page = rotate(&bin, -skew_angle);
    let profile = runlength_profile(&page, cfg.runlength_min_count);
    let lines = detect_lines(&profile, page.height(), cfg);

    let mut cands = Vec::new();
    for (li, line) in lines.iter().enumerate() {
        let x0 = line.x_start.saturating_sub(cfg.strip_padding);
        let x1 = (line.x_end + cfg.strip_padding).min(page.width() - 1);
        let strip = page.crop_columns(x0, x1);
        let min_side = cfg.min_box_fraction * line.width() as f64;
        cands.extend(
            candidate_boxes(&strip)
                .into_iter()
                .filter(|b| b.w.max(b.h) as f64 >= min_side)
                .map(|b| CharBox {
                    x: b.x + x0,
                    line: li,
                    ..b
                }),
        );
    }
    let boxes = if cands.is_empty() {
        Vec::new()
    } else {
        refine_boxes(&cands, cfg)?
    };
    Ok((
        page,
        Segmentation {
            skew_angle,
            lines,
            boxes,
        },
    ))
}

/// Full pipeline: binarize, estimate and undo skew, detect lines, extract
/// and refine character boxes.
pub fn segment_page(img: &PageImage, cfg: &SegConfig) -> Result<Segmentation> {
    segment_page_with_image(img, cfg).map(|(_, s)| s)
}

/// Square crop centred on `b`, with the box filling `fill` of the side,
/// resampled to `size`×`size`. Pixels outside the page take the background
/// value. Binary pages are converted to gray first.
pub fn glyph_crop(page: &PageImage, b: &CharBox, fill: f64, size: usize) -> PageImage {
    let gray = page.to_gray();
    let side = ((b.w.max(b.h) as f64 / fill).round() as usize).max(1);
    let cx = b.x as isize + b.w as isize / 2;
    let cy = b.y as isize + b.h as isize / 2;
    let (x0, y0) = (cx - side as isize / 2, cy - side as isize / 2);
    let bg = gray.background();
    let mut pixels = vec![bg; side * side];
    for (yy, row) in pixels.chunks_mut(side).enumerate() {
        let y = y0 + yy as isize;
        if y < 0 || y >= gray.height() as isize {
            continue;
        }
        for (xx, px) in row.iter_mut().enumerate() {
            let x = x0 + xx as isize;
            if x >= 0 && x < gray.width() as isize {
                *px = gray.get(x as usize, y as usize);
            }
        }
    }
    PageImage::new(side, side, PixelKind::Gray, pixels)
        .expect("non-empty square")
        .resize(size, size)
}

/// Box TSV: `page_id reading_index x y w h`.
pub fn boxes_tsv(page_id: &str, seg: &Segmentation) -> String {
    let mut out = String::new();
    for (i, b) in seg.boxes.iter().enumerate() {
        let _ = writeln!(out, "{page_id}\t{i}\t{}\t{}\t{}\t{}", b.x, b.y, b.w, b.h);
    }
    out
}

/// Line report TSV: `page_id x_start x_end`.
pub fn lines_tsv(page_id: &str, seg: &Segmentation) -> String {
    let mut out = String::new();
    for l in &seg.lines {
        let _ = writeln!(out, "{page_id}\t{}\t{}", l.x_start, l.x_end);
    }
    out
}

/// Parses box TSV rows into `(page_id, reading_index, box)`.
pub fn parse_boxes_tsv(text: &str) -> Result<Vec<(String, usize, CharBox)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(Error::format("box TSV", i + 1, "expected 6 fields"));
        }
        let n = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::format("box TSV", i + 1, format!("bad number `{s}`")))
        };
        let b = CharBox::new(n(f[2])?, n(f[3])?, n(f[4])?, n(f[5])?);
        if b.w == 0 || b.h == 0 {
            return Err(Error::format("box TSV", i + 1, "empty box"));
        }
        out.push((f[0].to_string(), n(f[1])?, b));
    }
    Ok(out)
}
