//! Synthetic ruled pages of vertical text with ground-truth lines and boxes.

use rand::Rng;

use super::glyph::{connected_radicals, Canvas, GlyphClass, LAYOUTS};
use crate::segmentation::image::{PageImage, PixelKind};
use crate::segmentation::{rotate, CharBox, TextLine};

/// Page geometry. Columns are spread evenly inside a ruled frame.
#[derive(Debug, Clone)]
pub struct PageSpec {
    pub width: usize,
    pub height: usize,
    pub columns: usize,
    pub rows: usize,
    pub cell: usize,
    pub row_pitch: usize,
    pub margin: usize,
    pub rule_thickness: f64,
    pub stroke_thickness: (f64, f64),
    pub noise: f64,
}

impl Default for PageSpec {
    fn default() -> Self {
        PageSpec {
            width: 2000,
            height: 1400,
            columns: 5,
            rows: 8,
            cell: 100,
            row_pitch: 145,
            margin: 60,
            rule_thickness: 4.0,
            stroke_thickness: (5.0, 6.0),
            noise: 15.0,
        }
    }
}

/// A rendered page. Ground truth is in the unskewed frame, lines left to
/// right and boxes in reading order (rightmost column first, top to bottom).
#[derive(Debug, Clone)]
pub struct SyntheticPage {
    pub image: PageImage,
    pub skew: f64,
    pub lines: Vec<TextLine>,
    pub boxes: Vec<CharBox>,
    pub classes: Vec<GlyphClass>,
}

/// Highest layout index used on pages; later layouts split into pieces that
/// segment poorly.
pub const MAX_PAGE_LAYOUT: usize = 6;

/// Compositions that fill their cell and stay in one or more vertically
/// overlapping or closely stacked blobs.
fn page_class<R: Rng>(rng: &mut R, pool: &[usize]) -> GlyphClass {
    let layout = rng.gen_range(0..=MAX_PAGE_LAYOUT);
    let comps = (0..LAYOUTS[layout].len())
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect();
    GlyphClass::new(layout, comps)
}

/// Whether a class is drawn by page generation: a low layout index and
/// connected radicals only.
pub fn fits_page(class: &GlyphClass) -> bool {
    let pool = connected_radicals();
    class.layout <= MAX_PAGE_LAYOUT && class.components.iter().all(|c| pool.contains(c))
}

/// Renders a page of random compositions and rotates it by `skew` degrees.
pub fn generate_page<R: Rng>(spec: &PageSpec, skew: f64, rng: &mut R) -> SyntheticPage {
    let pool = connected_radicals();
    render_page(spec, skew, rng, |r| page_class(r, &pool))
}

/// As [`generate_page`], with glyphs drawn uniformly from `classes`.
pub fn generate_page_from<R: Rng>(spec: &PageSpec, skew: f64, classes: &[GlyphClass], rng: &mut R) -> SyntheticPage {
    assert!(!classes.is_empty());
    render_page(spec, skew, rng, |r| classes[r.gen_range(0..classes.len())].clone())
}

fn render_page<R: Rng>(
    spec: &PageSpec,
    skew: f64,
    rng: &mut R,
    mut pick: impl FnMut(&mut R) -> GlyphClass,
) -> SyntheticPage {
    let (w, h) = (spec.width, spec.height);
    let mut canvas = Canvas::new(w, h);
    let m = spec.margin as f64;
    let (right, bottom) = ((w - spec.margin) as f64, (h - spec.margin) as f64);
    let pitch = (right - m) / spec.columns as f64;
    let rt = spec.rule_thickness;
    canvas.segment((m, m), (right, m), rt);
    canvas.segment((m, bottom), (right, bottom), rt);
    for i in 0..=spec.columns {
        let x = m + i as f64 * pitch;
        canvas.segment((x, m), (x, bottom), rt);
    }

    let block = spec.rows * spec.row_pitch - (spec.row_pitch - spec.cell);
    let top = m + ((bottom - m) - block as f64) / 2.0;
    let mut lines = Vec::new();
    let mut boxes = Vec::new();
    let mut classes = Vec::new();
    let c = spec.cell as f64;
    for col in 0..spec.columns {
        let x0 = (m + (col as f64 + 0.5) * pitch - c / 2.0).round();
        lines.push(TextLine {
            x_start: x0 as usize,
            x_end: x0 as usize + spec.cell - 1,
        });
        for row in 0..spec.rows {
            let y0 = (top + (row * spec.row_pitch) as f64).round();
            let class = pick(rng);
            let t = rng.gen_range(spec.stroke_thickness.0..=spec.stroke_thickness.1);
            let pad = t.ceil() as usize + 2;
            let side = spec.cell + 2 * pad;
            let mut local = Canvas::new(side, side);
            let inset = t / 2.0;
            let span = c - 1.0 - t;
            for s in class.strokes(true) {
                let p = |u: f64, v: f64| (pad as f64 + inset + u * span, pad as f64 + inset + v * span);
                local.segment(p(s[0], s[1]), p(s[2], s[3]), t);
            }
            let (mut bx0, mut by0, mut bx1, mut by1) = (usize::MAX, usize::MAX, 0, 0);
            let (ox, oy) = (x0 as usize - pad, y0 as usize - pad);
            for ly in 0..side {
                for lx in 0..side {
                    let v = local.cov[ly * side + lx];
                    if v >= 0.5 {
                        bx0 = bx0.min(lx);
                        by0 = by0.min(ly);
                        bx1 = bx1.max(lx);
                        by1 = by1.max(ly);
                    }
                    let p = &mut canvas.cov[(oy + ly) * w + ox + lx];
                    *p = p.max(v);
                }
            }
            boxes.push(CharBox {
                x: ox + bx0,
                y: oy + by0,
                w: bx1 - bx0 + 1,
                h: by1 - by0 + 1,
                line: col,
            });
            classes.push(class);
        }
    }
    // Reading order: right-to-left columns, top to bottom.
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(boxes[i].line), boxes[i].y));
    let boxes = order.iter().map(|&i| boxes[i]).collect();
    let classes = order.iter().map(|&i| classes[i].clone()).collect();

    let paper = rng.gen_range(215.0..=245.0);
    let ink = rng.gen_range(15.0..=50.0);
    let pixels = canvas
        .cov
        .iter()
        .map(|&cv| {
            let v = paper - cv as f64 * (paper - ink) + rng.gen_range(-spec.noise..=spec.noise);
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    let flat = PageImage::new(w, h, PixelKind::Gray, pixels).expect("page geometry");
    SyntheticPage {
        image: rotate(&flat, skew),
        skew,
        lines,
        boxes,
        classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> PageSpec {
        PageSpec {
            width: 700,
            height: 600,
            columns: 3,
            rows: 4,
            ..PageSpec::default()
        }
    }

    #[test]
    fn ground_truth_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = generate_page(&small(), 0.0, &mut rng);
        assert_eq!(p.lines.len(), 3);
        assert_eq!(p.boxes.len(), 12);
        assert_eq!(p.boxes[0].line, 2);
        for b in &p.boxes {
            assert!(b.ratio() > 0.8, "{b:?}");
            let l = &p.lines[b.line];
            assert!(b.x + 4 >= l.x_start && b.right() <= l.x_end + 5);
        }
    }

    #[test]
    fn deterministic() {
        let a = generate_page(&small(), 0.5, &mut ChaCha8Rng::seed_from_u64(3));
        let b = generate_page(&small(), 0.5, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a.image, b.image);
        assert_eq!(a.boxes, b.boxes);
    }

    #[test]
    fn pool_classes_only() {
        let pool: Vec<GlyphClass> = crate::synth::generate_classes(40, 2)
            .into_iter()
            .filter(fits_page)
            .collect();
        assert!(!pool.is_empty());
        let p = generate_page_from(&small(), 0.0, &pool, &mut ChaCha8Rng::seed_from_u64(5));
        assert!(p.classes.iter().all(|c| pool.contains(c)));
    }
}
