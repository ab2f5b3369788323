//! Experimental protocols: frequency split, k-shot augmentation, accuracy
//! metrics, word-spotting mAP, the group-subset ablation report, and the
//! synthetic zero-shot and k-shot experiments.

pub mod metrics;
pub mod protocol;
pub mod report;
pub mod split;

pub use metrics::{
    attribute_accuracy, character_accuracy, features_tsv, parse_features_tsv, recognize_top1, word_spotting_map,
    SpottingResult,
};
pub use protocol::{experiment_train_config, kshot_run, zero_shot_run, KShotConfig, ZeroShotConfig};
pub use report::{ablation_report, canonical_subsets, EvalReport, SubsetAccuracy};
pub use split::{frequency_split, kshot_augment, Split, SplitSpec, PARTITIONS};
