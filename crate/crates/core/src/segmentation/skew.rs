//! Small-angle rotation and skew estimation.

use rayon::prelude::*;

use super::config::SegConfig;
use super::image::PageImage;
use super::lines::{background_width, detect_lines, runlength_profile};

/// Rotates about the image centre by `angle` degrees with nearest-neighbour
/// sampling. Uncovered pixels take the background value.
///
/// Positive angles turn the content clockwise on screen (y axis pointing down).
pub fn rotate(img: &PageImage, angle: f64) -> PageImage {
    if angle == 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let (sin, cos) = angle.to_radians().sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let fill = img.background();
    let src = img.pixels();
    let mut out = vec![fill; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let dy = y as f64 - cy;
        for (x, px) in row.iter_mut().enumerate() {
            let dx = x as f64 - cx;
            let sx = (cos * dx + sin * dy + cx).round();
            let sy = (-sin * dx + cos * dy + cy).round();
            if sx >= 0.0 && sy >= 0.0 && (sx as usize) < w && (sy as usize) < h {
                *px = src[sy as usize * w + sx as usize];
            }
        }
    });
    PageImage::new(w, h, img.kind(), out).expect("same geometry as input")
}

/// Total background width after undoing a trial skew of `angle` degrees.
pub fn background_width_at(img: &PageImage, angle: f64, cfg: &SegConfig) -> usize {
    let trial = rotate(img, -angle);
    let profile = runlength_profile(&trial, cfg.runlength_min_count);
    let lines = detect_lines(&profile, trial.height(), cfg);
    background_width(&lines, trial.width())
}

/// The candidate angle whose correction maximizes the total background-line
/// width. Ties prefer the smallest magnitude, then the negative angle.
pub fn estimate_skew(img: &PageImage, cfg: &SegConfig) -> f64 {
    let mut candidates = cfg.skew_candidates.clone();
    candidates.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    let scores: Vec<usize> = candidates.iter().map(|&a| background_width_at(img, a, cfg)).collect();
    let mut best = 0;
    for i in 1..candidates.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    candidates.get(best).copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::image::PixelKind;

    #[test]
    fn zero_angle_is_identity() {
        let px: Vec<u8> = (0..35).map(|i| (i * 7 % 3 == 0) as u8).collect();
        let img = PageImage::new(7, 5, PixelKind::Binary, px).unwrap();
        assert_eq!(rotate(&img, 0.0), img);
    }

    #[test]
    fn centre_pixel_is_fixed() {
        let mut img = PageImage::blank(41, 31, PixelKind::Binary).unwrap();
        img.set(20, 15, 1);
        for a in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            let r = rotate(&img, a);
            assert_eq!(r, img, "angle {a}");
        }
    }

    #[test]
    fn uncovered_corners_take_background() {
        let img = PageImage::new(50, 50, PixelKind::Gray, vec![0; 2500]).unwrap();
        let r = rotate(&img, 2.0);
        assert_eq!(r.get(0, 0), 255);
        assert_eq!(r.get(25, 25), 0);
    }

    #[test]
    fn tie_prefers_small_then_negative() {
        // A blank page scores identically at every angle.
        let img = PageImage::blank(30, 30, PixelKind::Binary).unwrap();
        let cfg = SegConfig::default();
        assert_eq!(estimate_skew(&img, &cfg), 0.0);
        let cfg = SegConfig {
            skew_candidates: vec![1.0, -1.0, 0.5, -0.5],
            ..SegConfig::default()
        };
        assert_eq!(estimate_skew(&img, &cfg), -0.5);
    }
}
