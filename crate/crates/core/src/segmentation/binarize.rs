use super::image::{PageImage, PixelKind};
use crate::error::{Error, Result};

/// Global threshold maximizing the between-class variance of the intensity
/// histogram. Pixels with value `< t` are ink. Ties go to the lowest `t`;
/// a single-valued histogram yields `None`.
pub fn otsu_threshold(hist: &[u64; 256]) -> Option<u16> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return None;
    }
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();
    let mut best: Option<(u16, f64)> = None;
    let mut w0 = 0u64;
    let mut sum0 = 0f64;
    for t in 1..=255u16 {
        let v = (t - 1) as usize;
        w0 += hist[v];
        sum0 += v as f64 * hist[v] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if best.is_none_or(|(_, b)| var > b) {
            best = Some((t, var));
        }
    }
    best.map(|(t, _)| t)
}

pub fn histogram(img: &PageImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    hist
}

/// Converts a grayscale page to ink (1) / background (0).
pub fn binarize(img: &PageImage) -> Result<PageImage> {
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::EmptyImage);
    }
    if img.kind() == PixelKind::Binary {
        return Ok(img.clone());
    }
    // Uniform pages: dark means all ink, light means all background.
    let t = otsu_threshold(&histogram(img)).unwrap_or(128);
    let pixels = img.pixels().iter().map(|&p| ((p as u16) < t) as u8).collect();
    PageImage::new(img.width(), img.height(), PixelKind::Binary, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> PageImage {
        let px = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        PageImage::new(w, h, PixelKind::Gray, px).unwrap()
    }

    #[test]
    fn uniform_pages() {
        let white = binarize(&gray(8, 8, |_, _| 255)).unwrap();
        assert_eq!(white.ink_count(), 0);
        let black = binarize(&gray(8, 8, |_, _| 0)).unwrap();
        assert_eq!(black.ink_count(), 64);
    }

    #[test]
    fn bimodal_threshold_between_modes() {
        let img = gray(20, 10, |x, y| if (x * 7 + y * 3) % 5 == 0 { 20 } else { 230 });
        let t = otsu_threshold(&histogram(&img)).unwrap();
        // Every threshold in 21..=230 separates the modes identically; the lowest wins.
        assert_eq!(t, 21);
        assert!(t > 20 && t <= 230);
        let inked = img.pixels().iter().filter(|&&p| p == 20).count();
        assert_eq!(binarize(&img).unwrap().ink_count(), inked);
    }

    #[test]
    fn three_level_histogram_matches_brute_force() {
        let img = gray(30, 30, |x, y| [10u8, 120, 240][(x * 13 + y * 7) % 3]);
        let hist = histogram(&img);
        // Brute-force between-class variance over all thresholds.
        let mut best = (0u16, -1.0f64);
        for t in 1..=255u16 {
            let (a, b): (Vec<u8>, Vec<u8>) = img.pixels().iter().partition(|&&p| (p as u16) < t);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let mean = |v: &[u8]| v.iter().map(|&p| p as f64).sum::<f64>() / v.len() as f64;
            let var = a.len() as f64 * b.len() as f64 * (mean(&a) - mean(&b)).powi(2);
            if var > best.1 * (1.0 + 1e-12) {
                best = (t, var);
            }
        }
        assert_eq!(otsu_threshold(&hist), Some(best.0));
    }
}
