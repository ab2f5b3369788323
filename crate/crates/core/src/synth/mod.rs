//! Synthetic data: compositional glyph classes, rendered samples and ruled
//! pages with ground truth.

pub mod glyph;
pub mod page;

pub use glyph::{
    class_entries, generate_classes, random_class, render_glyph, GlyphClass, RenderStyle, LABEL_BASE, RADICALS,
};
pub use page::{fits_page, generate_page, generate_page_from, PageSpec, SyntheticPage, MAX_PAGE_LAYOUT};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Label;
use crate::segmentation::image::PageImage;

/// Renders `per_class` samples of every class as `(image_id, label, image)`.
/// Each sample draws from its own ChaCha stream, so output does not depend
/// on thread count.
pub fn render_corpus(
    classes: &[GlyphClass],
    labels: &[Label],
    per_class: usize,
    style: &RenderStyle,
    seed: u64,
) -> Vec<(String, Label, PageImage)> {
    assert_eq!(classes.len(), labels.len());
    (0..classes.len() * per_class)
        .into_par_iter()
        .map(|n| {
            let (c, k) = (n / per_class, n % per_class);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n as u64);
            let img = render_glyph(&classes[c], style, &mut rng);
            (format!("{}_{k:03}", labels[c]), labels[c], img)
        })
        .collect()
}

/// Seed and size of the bundled dictionary.
pub const BUNDLED_SEED: u64 = 20_160_302;
pub const BUNDLED_SIZE: usize = 3739;

/// Bundled synthetic dictionary (TSV), regenerable with
/// `class_entries(&generate_classes(BUNDLED_SIZE, BUNDLED_SEED))`.
pub const BUNDLED_DICTIONARY: &str = include_str!("../../data/synthetic_dict.tsv");
