//! End-to-end experiments on synthetic rendered corpora: zero-shot transfer
//! to held-out classes and k-shot learning of low-frequency classes.

use std::collections::HashMap;

use super::metrics::character_accuracy;
use super::report::{ablation_report, EvalReport};
use super::split::{frequency_split, kshot_augment, SplitSpec};
use crate::classifier::{predict, train, Sample, TrainConfig};
use crate::codec::{build_lexicon, entry_indices, AttributeSchema, CharacterEntry, GroupSelection};
use crate::error::{Label, Result};
use crate::segmentation::PageImage;
use crate::synth::{class_entries, generate_classes, render_corpus, RenderStyle};

/// Classifier settings used by both experiments unless overridden.
pub fn experiment_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        initial_lr: 10.0,
        lr_halving_interval: 1_000_000,
        batch_size: 100,
        iterations: 1000,
        seed,
        ..TrainConfig::default()
    }
}

/// Disjoint seen and unseen class sets.
#[derive(Debug, Clone)]
pub struct ZeroShotConfig {
    pub train_classes: usize,
    pub test_classes: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub style: RenderStyle,
    pub train: TrainConfig,
}

impl Default for ZeroShotConfig {
    fn default() -> Self {
        ZeroShotConfig {
            train_classes: 200,
            test_classes: 50,
            train_per_class: 10,
            test_per_class: 10,
            style: RenderStyle::default(),
            train: experiment_train_config(0),
        }
    }
}

type Corpus = Vec<(String, Label, PageImage)>;

fn samples_for(
    ids: &[String],
    corpus: &Corpus,
    index: &HashMap<&str, usize>,
    entries: &HashMap<Label, &CharacterEntry>,
    schema: &AttributeSchema,
) -> Result<Vec<Sample>> {
    ids.iter()
        .map(|id| {
            let (_, label, image) = &corpus[index[id.as_str()]];
            Ok(Sample {
                id: id.clone(),
                label: *label,
                image: image.clone(),
                targets: entry_indices(entries[label], schema)?,
            })
        })
        .collect()
}

/// Trains on the seen classes and reports accuracy on the unseen ones
/// against a lexicon of the unseen classes only. Classes, images and the
/// model all derive from `seed`.
pub fn zero_shot_run(cfg: &ZeroShotConfig, schema: &AttributeSchema, seed: u64) -> Result<EvalReport> {
    let n = cfg.train_classes;
    let classes = generate_classes(n + cfg.test_classes, seed.wrapping_add(1000));
    let entries = class_entries(&classes);
    let labels: Vec<Label> = entries.iter().map(|e| e.label).collect();
    let by_label: HashMap<Label, &CharacterEntry> = entries.iter().map(|e| (e.label, e)).collect();

    let train_set = render_corpus(&classes[..n], &labels[..n], cfg.train_per_class, &cfg.style, seed);
    let test_set = render_corpus(&classes[n..], &labels[n..], cfg.test_per_class, &cfg.style, !seed);
    let index = train_set.iter().enumerate().map(|(i, t)| (t.0.as_str(), i)).collect();
    let ids: Vec<String> = train_set.iter().map(|t| t.0.clone()).collect();
    let samples = samples_for(&ids, &train_set, &index, &by_label, schema)?;

    let tc = TrainConfig {
        seed,
        ..cfg.train.clone()
    };
    let (model, _) = train(&samples, &tc, schema)?;
    let images: Vec<&PageImage> = test_set.iter().map(|t| &t.2).collect();
    let preds: Vec<_> = test_set
        .iter()
        .map(|t| t.0.clone())
        .zip(predict(&model, &images)?)
        .collect();

    let lexicon = build_lexicon(&entries[n..], schema)?;
    let truth: HashMap<String, Label> = test_set.iter().map(|t| (t.0.clone(), t.1)).collect();
    let mut targets = HashMap::new();
    for (id, l, _) in &test_set {
        targets.insert(id.clone(), entry_indices(by_label[l], schema)?);
    }
    let mut report = ablation_report(&preds, &lexicon, schema, &truth, &targets)?;
    report.counts = vec![("train".into(), samples.len()), ("test".into(), test_set.len())];
    Ok(report)
}

/// High-frequency classes (more samples than the split threshold) plus
/// low-frequency classes that are moved into training `k` at a time.
#[derive(Debug, Clone)]
pub struct KShotConfig {
    pub hifreq_classes: usize,
    pub lofreq_classes: usize,
    pub hifreq_samples: usize,
    pub lofreq_samples: usize,
    pub max_k: usize,
    pub style: RenderStyle,
    pub train: TrainConfig,
}

impl Default for KShotConfig {
    fn default() -> Self {
        KShotConfig {
            hifreq_classes: 60,
            lofreq_classes: 30,
            hifreq_samples: 25,
            lofreq_samples: 10,
            max_k: 5,
            style: RenderStyle::default(),
            train: TrainConfig {
                batch_size: 50,
                iterations: 400,
                ..experiment_train_config(0)
            },
        }
    }
}

/// Low-frequency character accuracy (all groups, lexicon of every class)
/// for `k = 0..=max_k`. Each `k` trains a fresh model with the same seed;
/// the test set is what `kshot_augment` leaves in the low-frequency split.
pub fn kshot_run(cfg: &KShotConfig, schema: &AttributeSchema, seed: u64) -> Result<Vec<f64>> {
    let nh = cfg.hifreq_classes;
    let classes = generate_classes(nh + cfg.lofreq_classes, seed.wrapping_add(5000));
    let entries = class_entries(&classes);
    let labels: Vec<Label> = entries.iter().map(|e| e.label).collect();
    let by_label: HashMap<Label, &CharacterEntry> = entries.iter().map(|e| (e.label, e)).collect();

    let mut corpus = render_corpus(&classes[..nh], &labels[..nh], cfg.hifreq_samples, &cfg.style, seed);
    corpus.extend(render_corpus(
        &classes[nh..],
        &labels[nh..],
        cfg.lofreq_samples,
        &cfg.style,
        !seed,
    ));
    let index: HashMap<&str, usize> = corpus.iter().enumerate().map(|(i, t)| (t.0.as_str(), i)).collect();
    let items: Vec<(String, Label)> = corpus.iter().map(|t| (t.0.clone(), t.1)).collect();
    let truth: HashMap<String, Label> = items.iter().cloned().collect();
    let split = frequency_split(
        &items,
        &SplitSpec {
            seed,
            ..SplitSpec::default()
        },
    )?;
    let lexicon = build_lexicon(&entries, schema)?;
    let tc = TrainConfig {
        seed,
        ..cfg.train.clone()
    };

    (0..=cfg.max_k)
        .map(|k| {
            let aug = kshot_augment(&split, &items, k, seed)?;
            let samples = samples_for(&aug.hifreq_train, &corpus, &index, &by_label, schema)?;
            let (model, _) = train(&samples, &tc, schema)?;
            let images: Vec<&PageImage> = aug.lofreq.iter().map(|id| &corpus[index[id.as_str()]].2).collect();
            let preds: Vec<_> = aug.lofreq.iter().cloned().zip(predict(&model, &images)?).collect();
            character_accuracy(&preds, &lexicon, schema, &truth, GroupSelection::all())
        })
        .collect()
}
