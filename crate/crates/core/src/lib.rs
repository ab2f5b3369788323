//! Open-set Chinese character recognition through multi-typed attributes.
//!
//! Characters are described by 23 categorical attribute sets (pronunciation,
//! layout structure, stroke count, and the Cangjie, Zhengma, Wubi and
//! Four-Corner codes). A glyph classifier predicts each set; the hardened
//! prediction is matched against a lexicon by Hamming distance, so classes
//! never seen in training can still be recognized.

pub mod classifier;
pub mod codec;
pub mod error;
pub mod evaluation;
pub mod matcher;
pub mod segmentation;
pub mod synth;

pub use error::{Error, Label, Result};
