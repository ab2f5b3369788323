//! Hardening of classifier outputs and Hamming nearest-neighbour
//! recognition against a lexicon.

pub mod predictions;

use rayon::prelude::*;

pub use predictions::{read_predictions, write_predictions, PredictionForm, PredictionSet, SetPrediction};

use crate::codec::{AttributeSchema, AttributeVector, Lexicon};
use crate::error::{Error, Label, Result};

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ if v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Hardens per-set predictions into a one-hot-per-set attribute vector.
pub fn argmax_onehot(preds: &PredictionSet, schema: &AttributeSchema) -> Result<AttributeVector> {
    let mut indices = Vec::with_capacity(schema.len());
    for (i, set) in schema.sets().iter().enumerate() {
        let p = preds.get(i).ok_or_else(|| Error::MissingSet(set.name.clone()))?;
        let k = match p {
            SetPrediction::Index(k) => {
                if *k >= set.len() {
                    return Err(Error::ProbabilityLength {
                        set: set.name.clone(),
                        expected: set.len(),
                        actual: k + 1,
                    });
                }
                *k
            }
            SetPrediction::Probs(v) => {
                if v.len() != set.len() {
                    return Err(Error::ProbabilityLength {
                        set: set.name.clone(),
                        expected: set.len(),
                        actual: v.len(),
                    });
                }
                argmax(v).unwrap_or(0)
            }
        };
        indices.push(k);
    }
    AttributeVector::from_indices(schema, &indices)
}

/// Number of differing bit positions.
pub fn hamming(a: &AttributeVector, b: &AttributeVector) -> Result<u32> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    if a.schema_id() != b.schema_id() {
        return Err(Error::SchemaMismatch {
            expected: a.schema_id().to_string(),
            actual: b.schema_id().to_string(),
        });
    }
    Ok(hamming_words(a.words(), b.words()))
}

#[inline]
pub(crate) fn hamming_words(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub label: Label,
    pub distance: u32,
    pub index: usize,
}

/// Candidates by ascending distance, ties by ascending lexicon index.
pub type RankedCandidates = Vec<Candidate>;

/// The `k` lexicon entries nearest to `query`.
pub fn recognize(query: &AttributeVector, lexicon: &Lexicon, k: usize) -> Result<RankedCandidates> {
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    if query.schema_id() != lexicon.schema_id() || query.dim() != lexicon.dim() {
        return Err(Error::SchemaMismatch {
            expected: lexicon.schema_id().to_string(),
            actual: query.schema_id().to_string(),
        });
    }
    if k == 0 || k > lexicon.len() {
        return Err(Error::InvalidParameter(format!(
            "k must be in 1..={}, got {k}",
            lexicon.len()
        )));
    }
    let q = query.words();
    let w = lexicon.words_per_entry();
    let mut keyed: Vec<(u32, u32)> = lexicon
        .packed()
        .chunks_exact(w)
        .enumerate()
        .map(|(i, words)| (hamming_words(q, words), i as u32))
        .collect();
    if k < keyed.len() {
        keyed.select_nth_unstable(k - 1);
        keyed.truncate(k);
    }
    keyed.sort_unstable();
    Ok(keyed
        .into_iter()
        .map(|(d, i)| Candidate {
            label: lexicon.labels()[i as usize],
            distance: d,
            index: i as usize,
        })
        .collect())
}

/// Recognizes many queries in parallel; output order follows `queries`.
pub fn recognize_batch(queries: &[AttributeVector], lexicon: &Lexicon, k: usize) -> Result<Vec<RankedCandidates>> {
    queries.par_iter().map(|q| recognize(q, lexicon, k)).collect()
}
