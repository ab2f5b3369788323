//! Mini-batch gradient descent on the summed cross-entropy.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::features::{extract_features, translate, FEATURE_DIM};
use super::model::{BatchWorkspace, MultiHeadModel};
use crate::codec::AttributeSchema;
use crate::error::{Error, Label, Result};
use crate::matcher::PredictionSet;
use crate::segmentation::image::PageImage;

/// Training hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub initial_lr: f64,
    /// The learning rate halves every this many iterations.
    pub lr_halving_interval: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Width of the shared ReLU layer; 0 puts the heads directly on the features.
    pub hidden: usize,
    /// Uniform ±`jitter_pixels` translation of every drawn sample.
    pub jitter: bool,
    pub jitter_pixels: usize,
    /// Sample store appended to the training set.
    pub augment_corpus: Option<PathBuf>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            initial_lr: 1e-4,
            lr_halving_interval: 10_000,
            batch_size: 200,
            iterations: 2_000,
            seed: 0,
            hidden: 0,
            jitter: false,
            jitter_pixels: 2,
            augment_corpus: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return bad("initial_lr must be positive");
        }
        if self.lr_halving_interval == 0 || self.batch_size == 0 || self.iterations == 0 {
            return bad("lr_halving_interval, batch_size and iterations must be positive");
        }
        Ok(())
    }

    /// Learning rate used at iteration `it` (0-based).
    pub fn learning_rate(&self, it: usize) -> f64 {
        self.initial_lr * 0.5f64.powi((it / self.lr_halving_interval) as i32)
    }

    /// Parses `key=value` lines; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::format("train config", i + 1, m);
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let (k, v) = (k.trim(), v.trim());
            fn num<T: std::str::FromStr>(v: &str, err: impl Fn(String) -> Error) -> Result<T> {
                v.parse().map_err(|_| err(format!("bad value `{v}`")))
            }
            match k {
                "initial_lr" => cfg.initial_lr = num(v, err)?,
                "lr_halving_interval" => cfg.lr_halving_interval = num(v, err)?,
                "batch_size" => cfg.batch_size = num(v, err)?,
                "iterations" => cfg.iterations = num(v, err)?,
                "seed" => cfg.seed = num(v, err)?,
                "hidden" => cfg.hidden = num(v, err)?,
                "jitter" => cfg.jitter = num(v, err)?,
                "jitter_pixels" => cfg.jitter_pixels = num(v, err)?,
                "augment_corpus" => cfg.augment_corpus = Some(PathBuf::from(v)),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "initial_lr={}", self.initial_lr);
        let _ = writeln!(s, "lr_halving_interval={}", self.lr_halving_interval);
        let _ = writeln!(s, "batch_size={}", self.batch_size);
        let _ = writeln!(s, "iterations={}", self.iterations);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "hidden={}", self.hidden);
        let _ = writeln!(s, "jitter={}", self.jitter);
        let _ = writeln!(s, "jitter_pixels={}", self.jitter_pixels);
        if let Some(p) = &self.augment_corpus {
            let _ = writeln!(s, "augment_corpus={}", p.display());
        }
        s
    }
}

/// A 64×64 training image with its per-set target indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub label: Label,
    pub image: PageImage,
    pub targets: Vec<usize>,
}

/// Mean per-sample loss of every iteration's batch, before its update.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossTrace {
    pub batch_loss: Vec<f64>,
}

impl LossTrace {
    /// Trailing moving average with the given window.
    pub fn smoothed(&self, window: usize) -> Vec<f64> {
        let w = window.max(1);
        let mut out = Vec::with_capacity(self.batch_loss.len());
        let mut sum = 0.0;
        for (i, &l) in self.batch_loss.iter().enumerate() {
            sum += l;
            if i >= w {
                sum -= self.batch_loss[i - w];
            }
            out.push(sum / (i + 1).min(w) as f64);
        }
        out
    }
}

/// Symbols never seen as a training target, per set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub untrained_per_set: Vec<usize>,
}

impl CoverageReport {
    pub fn untrained(&self) -> usize {
        self.untrained_per_set.iter().sum()
    }
}

pub fn coverage(schema: &AttributeSchema, samples: &[Sample]) -> CoverageReport {
    let mut seen: Vec<Vec<bool>> = schema.sets().iter().map(|s| vec![false; s.len()]).collect();
    for s in samples {
        for (i, &t) in s.targets.iter().enumerate() {
            if let Some(slot) = seen.get_mut(i).and_then(|v| v.get_mut(t)) {
                *slot = true;
            }
        }
    }
    CoverageReport {
        untrained_per_set: seen.iter().map(|v| v.iter().filter(|&&b| !b).count()).collect(),
    }
}

/// Features of many images, in input order.
pub fn batch_features(images: &[&PageImage]) -> Result<Vec<Vec<f64>>> {
    images.par_iter().map(|img| extract_features(img)).collect()
}

/// Trains a fresh Xavier-initialized model.
pub fn train(samples: &[Sample], cfg: &TrainConfig, schema: &AttributeSchema) -> Result<(MultiHeadModel, LossTrace)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let model = MultiHeadModel::xavier(schema, FEATURE_DIM, cfg.hidden, &mut rng);
    train_from(model, samples, cfg, &mut rng)
}

/// Continues training `model`; batches and jitter draw from `rng`.
pub fn train_from(
    mut model: MultiHeadModel,
    samples: &[Sample],
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(MultiHeadModel, LossTrace)> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    for s in samples {
        model
            .check_targets(&s.targets)
            .map_err(|e| Error::InvalidParameter(format!("sample {}: {e}", s.id)))?;
    }
    let images: Vec<&PageImage> = samples.iter().map(|s| &s.image).collect();
    let cached = batch_features(&images)?;

    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut cursor = order.len();
    let mut grad = vec![0.0; model.params().len()];
    let mut ws = BatchWorkspace::default();
    let mut trace = LossTrace::default();
    let j = cfg.jitter_pixels as isize;
    let mut picks = Vec::with_capacity(cfg.batch_size);
    for it in 0..cfg.iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        picks.clear();
        for _ in 0..cfg.batch_size {
            if cursor == order.len() {
                order.shuffle(rng);
                cursor = 0;
            }
            let shift = if cfg.jitter && j > 0 {
                (rng.gen_range(-j..=j), rng.gen_range(-j..=j))
            } else {
                (0, 0)
            };
            picks.push((order[cursor], shift));
            cursor += 1;
        }
        let shifted: Vec<Option<Vec<f64>>> = picks
            .par_iter()
            .map(|&(i, (dx, dy))| {
                if dx == 0 && dy == 0 {
                    Ok(None)
                } else {
                    extract_features(&translate(&samples[i].image, dx, dy)).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let xs: Vec<&[f64]> = picks
            .iter()
            .zip(&shifted)
            .map(|(&(i, _), s)| s.as_deref().unwrap_or(&cached[i]))
            .collect();
        let ts: Vec<&[usize]> = picks.iter().map(|&(i, _)| samples[i].targets.as_slice()).collect();
        let loss = model.batch_gradient(&xs, &ts, &mut grad, &mut ws);
        let b = cfg.batch_size as f64;
        trace.batch_loss.push(loss / b);
        let step = cfg.learning_rate(it) / b;
        for (p, g) in model.params_mut().iter_mut().zip(&grad) {
            *p -= step * g;
        }
    }
    Ok((model, trace))
}

/// Forward pass for every image, order preserved.
pub fn predict(model: &MultiHeadModel, images: &[&PageImage]) -> Result<Vec<PredictionSet>> {
    predict_features(model, &batch_features(images)?)
}

pub fn predict_features(model: &MultiHeadModel, features: &[Vec<f64>]) -> Result<Vec<PredictionSet>> {
    features.par_iter().map(|f| model.forward(f)).collect()
}
