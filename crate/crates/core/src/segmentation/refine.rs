//! Turning raw component boxes into whole-character boxes.
//!
//! 1. Boxes with aspect ratio above `ratio_accept` are accepted as is.
//! 2. The character height `m_h` is the median height of those boxes.
//! 3. Residual boxes whose height is close to an integer multiple (≥ 2) of
//!    `m_h` are split into equal parts.
//! 4. Vertically adjacent residual boxes of one line are merged when their
//!    gap is below `merge_gap_fraction * m_h`.
//! 5. Merged boxes are accepted by ratio or split as in step 3.
//! 6. Accepted boxes are aligned row by row to the median top and bottom.
//!
//! Boxes never accepted are dropped.

use std::cmp::Reverse;

use super::boxes::CharBox;
use super::config::SegConfig;
use crate::error::{Error, Result};

fn median_f64(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn median_usize(mut v: Vec<usize>) -> usize {
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// Splits `b` into `round(h / m_h)` equal boxes when that count is at least
/// two, the height is within `height_tolerance` of the multiple, and every
/// piece passes the ratio test. The pieces partition `b` exactly.
pub fn split_box(b: &CharBox, m_h: f64, cfg: &SegConfig) -> Option<Vec<CharBox>> {
    let q = b.h as f64 / m_h;
    let n = q.round();
    if n < 2.0 || (q - n).abs() > cfg.height_tolerance {
        return None;
    }
    let n = n as usize;
    let edge = |i: usize| b.y + ((i * b.h) as f64 / n as f64).round() as usize;
    let pieces: Vec<CharBox> = (0..n)
        .map(|i| CharBox {
            x: b.x,
            y: edge(i),
            w: b.w,
            h: edge(i + 1) - edge(i),
            line: b.line,
        })
        .collect();
    if pieces.iter().all(|p| p.h > 0 && p.ratio() > cfg.ratio_accept) {
        Some(pieces)
    } else {
        None
    }
}

/// Chains vertically adjacent boxes of the same line whose gap is below
/// `max_gap` (overlapping boxes always merge).
pub fn merge_fragments(boxes: &[CharBox], max_gap: f64) -> Vec<CharBox> {
    let mut sorted = boxes.to_vec();
    sorted.sort_by_key(|b| (b.line, b.y, b.x));
    let mut out: Vec<CharBox> = Vec::with_capacity(sorted.len());
    for b in sorted {
        match out.last_mut() {
            Some(cur) if cur.line == b.line && ((b.y as f64) - (cur.bottom() as f64)) < max_gap => {
                *cur = cur.union(&b);
            }
            _ => out.push(b),
        }
    }
    out
}

/// Snaps the top and bottom of every box to the median extent of its row.
/// Rows are formed by boxes whose vertical centres lie within `m_h / 2` of
/// the running row centre.
pub fn align_rows(boxes: &mut [CharBox], m_h: f64) {
    let centre = |b: &CharBox| b.y as f64 + b.h as f64 / 2.0;
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| centre(&boxes[a]).total_cmp(&centre(&boxes[b])).then(a.cmp(&b)));
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut row_centre = f64::NEG_INFINITY;
    for i in order {
        let c = centre(&boxes[i]);
        match rows.last_mut() {
            Some(row) if c - row_centre < m_h / 2.0 => {
                row.push(i);
                row_centre = row.iter().map(|&j| centre(&boxes[j])).sum::<f64>() / row.len() as f64;
            }
            _ => {
                rows.push(vec![i]);
                row_centre = c;
            }
        }
    }
    for row in rows {
        let top = median_usize(row.iter().map(|&i| boxes[i].y).collect());
        let bottom = median_usize(row.iter().map(|&i| boxes[i].bottom()).collect());
        if bottom <= top {
            continue;
        }
        for i in row {
            boxes[i].y = top;
            boxes[i].h = bottom - top;
        }
    }
}

/// Median height of the boxes passing the ratio test (step 2).
pub fn estimate_char_height(cands: &[CharBox], cfg: &SegConfig) -> Result<f64> {
    let heights: Vec<f64> = cands
        .iter()
        .filter(|b| b.ratio() > cfg.ratio_accept)
        .map(|b| b.h as f64)
        .collect();
    if heights.is_empty() {
        return Err(Error::NoAcceptedBoxes);
    }
    Ok(median_f64(heights))
}

/// Runs the six refinement steps; output is in reading order (lines by
/// descending index, i.e. right to left, then top to bottom).
pub fn refine_boxes(cands: &[CharBox], cfg: &SegConfig) -> Result<Vec<CharBox>> {
    let (mut accepted, residual): (Vec<CharBox>, Vec<CharBox>) =
        cands.iter().partition(|b| b.ratio() > cfg.ratio_accept);
    if accepted.is_empty() {
        return Err(Error::NoAcceptedBoxes);
    }
    let m_h = median_f64(accepted.iter().map(|b| b.h as f64).collect());

    let mut remaining = Vec::new();
    for b in residual {
        match split_box(&b, m_h, cfg) {
            Some(pieces) => accepted.extend(pieces),
            None => remaining.push(b),
        }
    }

    for b in merge_fragments(&remaining, cfg.merge_gap_fraction * m_h) {
        if b.ratio() > cfg.ratio_accept {
            accepted.push(b);
        } else if let Some(pieces) = split_box(&b, m_h, cfg) {
            accepted.extend(pieces);
        }
    }

    align_rows(&mut accepted, m_h);
    accepted.sort_by_key(|b| (Reverse(b.line), b.y, b.x));
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SegConfig {
        SegConfig::default()
    }

    #[test]
    fn square_box_accepted_unchanged() {
        let b = CharBox::new(3, 4, 40, 38);
        assert!((b.ratio() - 0.95).abs() < 1e-12);
        assert_eq!(refine_boxes(&[b], &cfg()).unwrap(), vec![b]);
    }

    #[test]
    fn tall_box_split_in_three() {
        // 122 / 40 = 3.05 is within 0.2 of 3, so three pieces of ≈40.67 px.
        let b = CharBox::new(0, 10, 40, 122);
        let pieces = split_box(&b, 40.0, &cfg()).unwrap();
        assert_eq!(pieces.iter().map(|p| p.h).collect::<Vec<_>>(), [41, 40, 41]);
        assert_eq!(pieces[0].y, 10);
        assert_eq!(pieces[2].bottom(), b.bottom());
        for w in pieces.windows(2) {
            assert_eq!(w[0].bottom(), w[1].y);
        }
        let mean = pieces.iter().map(|p| p.h as f64).sum::<f64>() / 3.0;
        assert!((mean - 40.666).abs() < 0.01);
    }

    #[test]
    fn non_multiple_not_split() {
        // 100 / 40 = 2.5 is 0.5 away from an integer.
        assert!(split_box(&CharBox::new(0, 0, 40, 100), 40.0, &cfg()).is_none());
        // A single character height is not a split.
        assert!(split_box(&CharBox::new(0, 0, 40, 44), 40.0, &cfg()).is_none());
    }

    #[test]
    fn stacked_fragments_merge_then_accept() {
        // m_h = 40 from an accepted reference box in another line.
        let reference = CharBox {
            line: 0,
            ..CharBox::new(100, 200, 40, 40)
        };
        let top = CharBox {
            line: 1,
            ..CharBox::new(0, 0, 40, 15)
        };
        let bottom = CharBox {
            line: 1,
            ..CharBox::new(0, 18, 40, 20)
        };
        let out = refine_boxes(&[reference, top, bottom], &cfg()).unwrap();
        let merged = CharBox {
            line: 1,
            ..CharBox::new(0, 0, 40, 38)
        };
        assert!((merged.ratio() - 0.95).abs() < 1e-12);
        assert_eq!(out, vec![merged, reference]);
    }

    #[test]
    fn far_fragments_discarded() {
        let reference = CharBox::new(100, 0, 40, 40);
        let a = CharBox::new(0, 0, 40, 10);
        let b = CharBox::new(0, 30, 40, 10);
        // Gap 20 ≥ 0.3 * 40 = 12: no merge, both residual pieces are dropped.
        let out = refine_boxes(&[reference, a, b], &cfg()).unwrap();
        assert_eq!(out, vec![reference]);
    }

    #[test]
    fn nothing_accepted_is_an_error() {
        let thin = CharBox::new(0, 0, 5, 40);
        assert!(matches!(refine_boxes(&[thin], &cfg()), Err(Error::NoAcceptedBoxes)));
        assert!(matches!(refine_boxes(&[], &cfg()), Err(Error::NoAcceptedBoxes)));
    }

    #[test]
    fn rows_aligned_across_lines() {
        let a = CharBox {
            line: 0,
            ..CharBox::new(0, 10, 40, 40)
        };
        let b = CharBox {
            line: 1,
            ..CharBox::new(60, 12, 40, 38)
        };
        let c = CharBox {
            line: 2,
            ..CharBox::new(120, 9, 40, 42)
        };
        let out = refine_boxes(&[a, b, c], &cfg()).unwrap();
        for o in &out {
            assert_eq!((o.y, o.h), (10, 40));
        }
        // Reading order: rightmost line first.
        assert_eq!(out.iter().map(|o| o.line).collect::<Vec<_>>(), [2, 1, 0]);
    }
}
