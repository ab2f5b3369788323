//! Native attribute classifier: directional features, a shared backbone
//! with one softmax head per attribute set, and its training loop.

pub mod features;
pub mod model;
pub mod store;
pub mod train;

pub use features::{extract_features, mirror_permutation, translate, FEATURE_DIM, INPUT_SIZE};
pub use model::{softmax, total_loss, MultiHeadModel};
pub use store::{
    labels_tsv, load_images, load_labeled, parse_labels, to_samples, write_store, StoredImage, LABELS_FILE,
};
pub use train::{
    batch_features, coverage, predict, predict_features, train, train_from, CoverageReport, LossTrace, Sample,
    TrainConfig,
};
