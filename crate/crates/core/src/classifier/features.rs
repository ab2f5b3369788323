//! Directional gradient features: Sobel gradients decomposed onto eight
//! directions, pooled bilinearly on an 8×8 grid, square-rooted and
//! L2-normalized.

use crate::error::{Error, Result};
use crate::segmentation::image::{PageImage, PixelKind};

pub const INPUT_SIZE: usize = 64;
pub const GRID: usize = 8;
pub const ORIENTATIONS: usize = 8;
pub const FEATURE_DIM: usize = ORIENTATIONS * GRID * GRID;

fn index(bin: usize, cy: usize, cx: usize) -> usize {
    (bin * GRID + cy) * GRID + cx
}

/// Feature index permutation induced by a left-right mirror of the input:
/// `features(mirror(img))[i] == features(img)[perm[i]]`.
pub fn mirror_permutation() -> Vec<usize> {
    let mut perm = vec![0; FEATURE_DIM];
    for bin in 0..ORIENTATIONS {
        for cy in 0..GRID {
            for cx in 0..GRID {
                perm[index(bin, cy, cx)] = index((12 - bin) % 8, cy, GRID - 1 - cx);
            }
        }
    }
    perm
}

/// Splits a gradient into its two bracketing directions (0 = +x, counting
/// towards +y in steps of 45°) by the parallelogram rule.
fn decompose(gx: f64, gy: f64) -> [(usize, f64); 2] {
    let (ax, ay) = (gx.abs(), gy.abs());
    let diag = match (gx >= 0.0, gy >= 0.0) {
        (true, true) => 1,
        (false, true) => 3,
        (false, false) => 5,
        (true, false) => 7,
    };
    if ax >= ay {
        let axis = if gx >= 0.0 { 0 } else { 4 };
        [(axis, ax - ay), (diag, ay * std::f64::consts::SQRT_2)]
    } else {
        let axis = if gy >= 0.0 { 2 } else { 6 };
        [(axis, ay - ax), (diag, ax * std::f64::consts::SQRT_2)]
    }
}

/// Bilinear weights of pixel coordinate `p` onto the two nearest cell centres.
fn cell_weights(p: usize) -> [(usize, f64); 2] {
    let cell = (INPUT_SIZE / GRID) as f64;
    let f = ((p as f64 + 0.5) / cell - 0.5).clamp(0.0, (GRID - 1) as f64);
    let c0 = f.floor() as usize;
    let t = f - c0 as f64;
    [(c0, 1.0 - t), ((c0 + 1).min(GRID - 1), t)]
}

/// Features of a 64×64 image; `FEATURE_DIM` non-negative values.
pub fn extract_features(img: &PageImage) -> Result<Vec<f64>> {
    if img.width() != INPUT_SIZE || img.height() != INPUT_SIZE {
        return Err(Error::ImageSize {
            width: img.width(),
            height: img.height(),
            expected_width: INPUT_SIZE,
            expected_height: INPUT_SIZE,
        });
    }
    let n = INPUT_SIZE;
    let px: Vec<f64> = match img.kind() {
        PixelKind::Gray => img.pixels().iter().map(|&p| p as f64 / 255.0).collect(),
        PixelKind::Binary => img.pixels().iter().map(|&p| 1.0 - p as f64).collect(),
    };
    let at = |x: isize, y: isize| {
        let cx = x.clamp(0, n as isize - 1) as usize;
        let cy = y.clamp(0, n as isize - 1) as usize;
        px[cy * n + cx]
    };
    let weights: Vec<[(usize, f64); 2]> = (0..n).map(cell_weights).collect();
    let mut feat = vec![0.0; FEATURE_DIM];
    for y in 0..n as isize {
        for x in 0..n as isize {
            let gx = (at(x + 1, y - 1) - at(x - 1, y - 1))
                + 2.0 * (at(x + 1, y) - at(x - 1, y))
                + (at(x + 1, y + 1) - at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) - at(x - 1, y - 1))
                + 2.0 * (at(x, y + 1) - at(x, y - 1))
                + (at(x + 1, y + 1) - at(x + 1, y - 1));
            if gx == 0.0 && gy == 0.0 {
                continue;
            }
            let wy = weights[y as usize];
            let wx = weights[x as usize];
            for (bin, mag) in decompose(gx, gy) {
                if mag == 0.0 {
                    continue;
                }
                for &(cy, a) in &wy {
                    for &(cx, b) in &wx {
                        feat[index(bin, cy, cx)] += mag * a * b;
                    }
                }
            }
        }
    }
    for v in feat.iter_mut() {
        *v = v.sqrt();
    }
    let norm = feat.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in feat.iter_mut() {
            *v /= norm;
        }
    }
    Ok(feat)
}

/// Shifts the image by `(dx, dy)` pixels, filling with the background.
pub fn translate(img: &PageImage, dx: isize, dy: isize) -> PageImage {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut out = PageImage::blank(img.width(), img.height(), img.kind()).expect("non-empty");
    for y in 0..h {
        let sy = y - dy;
        if sy < 0 || sy >= h {
            continue;
        }
        for x in 0..w {
            let sx = x - dx;
            if sx >= 0 && sx < w {
                out.set(x as usize, y as usize, img.get(sx as usize, sy as usize));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(pixels: Vec<u8>) -> PageImage {
        PageImage::new(INPUT_SIZE, INPUT_SIZE, PixelKind::Gray, pixels).unwrap()
    }

    fn mirror(img: &PageImage) -> PageImage {
        let mut out = img.clone();
        for y in 0..INPUT_SIZE {
            for x in 0..INPUT_SIZE {
                out.set(INPUT_SIZE - 1 - x, y, img.get(x, y));
            }
        }
        out
    }

    #[test]
    fn constant_image_is_zero() {
        let f = extract_features(&gray(vec![200; 4096])).unwrap();
        assert_eq!(f.len(), FEATURE_DIM);
        assert!(f.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wrong_size_rejected() {
        let img = PageImage::blank(32, 64, PixelKind::Gray).unwrap();
        assert!(matches!(extract_features(&img), Err(Error::ImageSize { .. })));
    }

    #[test]
    fn vertical_edge_uses_horizontal_bins() {
        let px = (0..4096).map(|i| if i % 64 < 32 { 0 } else { 255 }).collect();
        let f = extract_features(&gray(px)).unwrap();
        let mass = |bin: usize| f[bin * 64..(bin + 1) * 64].iter().sum::<f64>();
        assert!(mass(0) > 0.0);
        for bin in 1..8 {
            assert_eq!(mass(bin), 0.0, "bin {bin}");
        }
    }

    #[test]
    fn permutation_is_an_involution() {
        let p = mirror_permutation();
        for i in 0..FEATURE_DIM {
            assert_eq!(p[p[i]], i);
        }
    }

    #[test]
    fn translate_fills_background() {
        let img = gray((0..4096).map(|i| (i % 200) as u8).collect());
        let t = translate(&img, 2, -1);
        assert_eq!(t.get(0, 10), 255);
        assert_eq!(t.get(5, 63), 255);
        assert_eq!(t.get(5, 10), img.get(3, 11));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn mirror_permutes_features(px in proptest::collection::vec(any::<u8>(), 4096)) {
            let img = gray(px);
            let f = extract_features(&img).unwrap();
            let g = extract_features(&mirror(&img)).unwrap();
            let perm = mirror_permutation();
            prop_assert!(f.iter().all(|&v| v >= 0.0));
            for i in 0..FEATURE_DIM {
                prop_assert!((g[i] - f[perm[i]]).abs() <= 1e-12, "index {}: {} vs {}", i, g[i], f[perm[i]]);
            }
        }
    }
}
