//! Frequency split and k-shot augmentation.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Label, Result};

/// Split parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    /// Labels with strictly more samples than this are high-frequency.
    pub frequency_threshold: usize,
    pub train_fraction: f64,
    pub k: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            frequency_threshold: 20,
            train_fraction: 0.8,
            k: 0,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frequency_threshold == 0 {
            return Err(Error::InvalidParameter("frequency_threshold must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter("train_fraction must be in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Image ids per partition. `lofreq` holds the low-frequency test images.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub hifreq_train: Vec<String>,
    pub hifreq_test: Vec<String>,
    pub lofreq: Vec<String>,
}

pub const PARTITIONS: [&str; 3] = ["hifreq_train", "hifreq_test", "lofreq"];

impl Split {
    pub fn partition(&self, name: &str) -> Option<&[String]> {
        match name {
            "hifreq_train" => Some(&self.hifreq_train),
            "hifreq_test" => Some(&self.hifreq_test),
            "lofreq" => Some(&self.lofreq),
            _ => None,
        }
    }

    /// `image_id<TAB>partition` rows, partitions in fixed order.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for name in PARTITIONS {
            for id in self.partition(name).unwrap() {
                let _ = writeln!(s, "{id}\t{name}");
            }
        }
        s
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut split = Split::default();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (id, part) = line
                .split_once('\t')
                .ok_or_else(|| Error::format("split", i + 1, "expected image_id<TAB>partition"))?;
            if !seen.insert(id.to_string()) {
                return Err(Error::format("split", i + 1, format!("image `{id}` listed twice")));
            }
            let list = match part.trim() {
                "hifreq_train" => &mut split.hifreq_train,
                "hifreq_test" => &mut split.hifreq_test,
                "lofreq" => &mut split.lofreq,
                other => return Err(Error::format("split", i + 1, format!("unknown partition `{other}`"))),
            };
            list.push(id.to_string());
        }
        Ok(split)
    }
}

fn by_label(items: &[(String, Label)]) -> BTreeMap<Label, Vec<String>> {
    let mut m: BTreeMap<Label, Vec<String>> = BTreeMap::new();
    for (id, l) in items {
        m.entry(*l).or_default().push(id.clone());
    }
    m
}

/// Labels with more than `frequency_threshold` images are split per label,
/// `floor(train_fraction * n)` shuffled images to train and the rest to
/// test; all images of the other labels go to `lofreq`.
pub fn frequency_split(items: &[(String, Label)], spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    if items.is_empty() {
        return Err(Error::EmptyInput("labelled samples"));
    }
    let mut ids = HashSet::new();
    for (id, _) in items {
        if !ids.insert(id.as_str()) {
            return Err(Error::IdMismatch(format!("duplicate image id `{id}`")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut split = Split::default();
    for (_, mut group) in by_label(items) {
        if group.len() > spec.frequency_threshold {
            group.shuffle(&mut rng);
            let n_train = (spec.train_fraction * group.len() as f64).floor() as usize;
            let test = group.split_off(n_train);
            split.hifreq_train.extend(group);
            split.hifreq_test.extend(test);
        } else {
            split.lofreq.extend(group);
        }
    }
    Ok(split)
}

/// Moves `min(k, count - 1)` seeded images of every low-frequency label into
/// training. For a fixed seed the moved images for `k` are a prefix of those
/// for `k + 1`.
pub fn kshot_augment(split: &Split, labels: &[(String, Label)], k: usize, seed: u64) -> Result<Split> {
    let label_of: std::collections::HashMap<&str, Label> = labels.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let mut lofreq_items = Vec::with_capacity(split.lofreq.len());
    for id in &split.lofreq {
        let l = label_of
            .get(id.as_str())
            .ok_or_else(|| Error::IdMismatch(format!("image `{id}` has no label")))?;
        lofreq_items.push((id.clone(), *l));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Split {
        hifreq_train: split.hifreq_train.clone(),
        hifreq_test: split.hifreq_test.clone(),
        lofreq: Vec::new(),
    };
    for (_, mut group) in by_label(&lofreq_items) {
        group.shuffle(&mut rng);
        let moved = k.min(group.len().saturating_sub(1));
        let rest = group.split_off(moved);
        out.hifreq_train.extend(group);
        out.lofreq.extend(rest);
    }
    Ok(out)
}
