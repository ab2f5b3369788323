//! Vertical text-line detection from the mean white run length of each
//! pixel column.

use rayon::prelude::*;

use super::config::SegConfig;
use super::image::PageImage;

/// A vertical text line spanning columns `x_start..=x_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextLine {
    pub x_start: usize,
    pub x_end: usize,
}

impl TextLine {
    pub fn width(&self) -> usize {
        self.x_end - self.x_start + 1
    }
}

/// Mean white run length of one column; `h` when there are fewer than `t` runs.
pub fn column_mean_runlength(img: &PageImage, x: usize, t: usize) -> f64 {
    let h = img.height();
    let mut runs = 0usize;
    let mut total = 0usize;
    let mut in_run = false;
    for y in 0..h {
        if img.get(x, y) == 0 {
            total += 1;
            if !in_run {
                runs += 1;
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    if runs >= t {
        total as f64 / runs as f64
    } else {
        h as f64
    }
}

/// Mean white run length for every column of a binary image.
pub fn runlength_profile(img: &PageImage, t: usize) -> Vec<f64> {
    (0..img.width())
        .into_par_iter()
        .map(|x| column_mean_runlength(img, x, t))
        .collect()
}

fn median(sorted: &[usize]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

/// Maximal runs of columns with `m < line_threshold * h`. Runs narrower than
/// `min_line_fraction` of the widest run (edges of ruling lines) are dropped,
/// then background gaps narrower than `merge_gap_fraction` of the median
/// line width are absorbed.
pub fn detect_lines(profile: &[f64], h: usize, cfg: &SegConfig) -> Vec<TextLine> {
    let limit = cfg.line_threshold * h as f64;
    let mut raw = Vec::new();
    let mut start = None;
    for (x, &m) in profile.iter().enumerate() {
        match (m < limit, start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                raw.push(TextLine {
                    x_start: s,
                    x_end: x - 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        raw.push(TextLine {
            x_start: s,
            x_end: profile.len() - 1,
        });
    }
    let widest = raw.iter().map(TextLine::width).max().unwrap_or(0) as f64;
    raw.retain(|l| l.width() as f64 >= cfg.min_line_fraction * widest);
    if raw.len() < 2 {
        return raw;
    }
    let mut widths: Vec<usize> = raw.iter().map(TextLine::width).collect();
    widths.sort_unstable();
    let max_gap = cfg.merge_gap_fraction * median(&widths);
    let mut merged: Vec<TextLine> = Vec::with_capacity(raw.len());
    for line in raw {
        match merged.last_mut() {
            Some(prev) if ((line.x_start - prev.x_end - 1) as f64) < max_gap => {
                prev.x_end = line.x_end;
            }
            _ => merged.push(line),
        }
    }
    merged
}

/// Total width of the columns not covered by any text line.
pub fn background_width(lines: &[TextLine], w: usize) -> usize {
    w - lines.iter().map(TextLine::width).sum::<usize>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::image::PixelKind;

    fn column(bits: &[u8]) -> PageImage {
        PageImage::new(1, bits.len(), PixelKind::Binary, bits.to_vec()).unwrap()
    }

    #[test]
    fn all_ink_column_is_background() {
        let img = column(&[1; 50]);
        assert_eq!(runlength_profile(&img, 7), vec![50.0]);
    }

    #[test]
    fn ten_runs_of_four() {
        // Height 100: ten white runs of length 4 separated by ink.
        let mut bits = vec![1u8; 100];
        for r in 0..10 {
            for k in 0..4 {
                bits[r * 10 + 2 + k] = 0;
            }
        }
        assert_eq!(runlength_profile(&column(&bits), 7), vec![4.0]);
    }

    #[test]
    fn too_few_runs_is_background() {
        let mut bits = vec![1u8; 100];
        for r in 0..3 {
            bits[r * 20 + 5] = 0;
        }
        assert_eq!(runlength_profile(&column(&bits), 7), vec![100.0]);
        // Exactly t runs takes the mean branch.
        let mut bits = vec![1u8; 100];
        for r in 0..7 {
            bits[r * 10 + 1] = 0;
            bits[r * 10 + 2] = 0;
        }
        assert_eq!(runlength_profile(&column(&bits), 7), vec![2.0]);
    }

    #[test]
    fn constant_profile_has_no_lines() {
        let cfg = SegConfig::default();
        assert!(detect_lines(&[100.0; 40], 100, &cfg).is_empty());
    }

    #[test]
    fn single_text_run() {
        let cfg = SegConfig::default();
        let profile: Vec<f64> = (0..40)
            .map(|x| if (10..=20).contains(&x) { 5.0 } else { 100.0 })
            .collect();
        assert_eq!(
            detect_lines(&profile, 100, &cfg),
            vec![TextLine { x_start: 10, x_end: 20 }]
        );
    }

    #[test]
    fn narrow_gap_absorbed() {
        // Runs [10,21] and [24,35] (width 12 each) separated by a 2-column gap:
        // 2 < 0.3 * 12 = 3.6, so they merge. A 40-column gap elsewhere survives.
        let cfg = SegConfig::default();
        let text = |x: usize| (10..=21).contains(&x) || (24..=35).contains(&x) || (76..=87).contains(&x);
        let profile: Vec<f64> = (0..100).map(|x| if text(x) { 3.0 } else { 100.0 }).collect();
        assert_eq!(
            detect_lines(&profile, 100, &cfg),
            vec![TextLine { x_start: 10, x_end: 35 }, TextLine { x_start: 76, x_end: 87 }]
        );
    }

    #[test]
    fn sliver_runs_dropped() {
        // One-column runs beside a 30-column line are ruling-line residue.
        let cfg = SegConfig::default();
        let text = |x: usize| x == 2 || x == 5 || (20..50).contains(&x) || x == 70;
        let profile: Vec<f64> = (0..80).map(|x| if text(x) { 3.0 } else { 100.0 }).collect();
        assert_eq!(
            detect_lines(&profile, 100, &cfg),
            vec![TextLine { x_start: 20, x_end: 49 }]
        );
    }

    #[test]
    fn gap_at_threshold_is_kept() {
        // Widths 10 → max gap 3.0; a gap of exactly 3 is not narrower, so no merge.
        let cfg = SegConfig::default();
        let text = |x: usize| (0..10).contains(&x) || (13..23).contains(&x);
        let profile: Vec<f64> = (0..30).map(|x| if text(x) { 3.0 } else { 100.0 }).collect();
        assert_eq!(detect_lines(&profile, 100, &cfg).len(), 2);
    }
}
