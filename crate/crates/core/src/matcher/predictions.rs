//! Per-image attribute predictions and their text interchange format.
//!
//! One image per line: `image_id<TAB>set=index;set=p0,p1,...`. A value with
//! a `,` or `.` is a probability vector over the set's alphabet, otherwise an
//! argmax index. Both forms may be mixed within a line.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::codec::{decode_vector, AttributeSchema, AttributeVector};
use crate::error::{Error, Result};

/// Classifier output for one attribute set.
#[derive(Debug, Clone, PartialEq)]
pub enum SetPrediction {
    Index(usize),
    Probs(Vec<f64>),
}

impl SetPrediction {
    pub fn argmax(&self) -> usize {
        match self {
            SetPrediction::Index(k) => *k,
            SetPrediction::Probs(p) => super::argmax(p).unwrap_or(0),
        }
    }
}

/// Predictions for one image, one slot per schema set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionSet {
    sets: Vec<Option<SetPrediction>>,
}

impl PredictionSet {
    pub fn with_len(n: usize) -> Self {
        PredictionSet { sets: vec![None; n] }
    }

    pub fn from_sets(sets: Vec<SetPrediction>) -> Self {
        PredictionSet {
            sets: sets.into_iter().map(Some).collect(),
        }
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Self::from_sets(indices.iter().map(|&k| SetPrediction::Index(k)).collect())
    }

    /// Argmax-form predictions reproducing a one-hot vector.
    pub fn from_vector(v: &AttributeVector, schema: &AttributeSchema) -> Result<Self> {
        let a = decode_vector(v, schema)?;
        if let Some(&i) = a.flagged.first() {
            return Err(Error::InvalidParameter(format!(
                "set `{}` is not one-hot",
                schema.sets()[i].name
            )));
        }
        let idx: Vec<usize> = (0..schema.len())
            .map(|i| {
                let span = schema.span(i);
                span.clone().position(|b| v.get(b)).unwrap_or(0)
            })
            .collect();
        Ok(Self::from_indices(&idx))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&SetPrediction> {
        self.sets.get(i).and_then(Option::as_ref)
    }

    pub fn set(&mut self, i: usize, p: SetPrediction) {
        if i >= self.sets.len() {
            self.sets.resize(i + 1, None);
        }
        self.sets[i] = Some(p);
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<&SetPrediction>> {
        self.sets.iter().map(Option::as_ref)
    }

    /// Argmax index per set, `None` where the set is missing.
    pub fn argmax_indices(&self) -> Vec<Option<usize>> {
        self.iter().map(|p| p.map(SetPrediction::argmax)).collect()
    }

    /// Keeps the slots of `sub`'s sets, in `sub`'s order.
    pub fn restrict(&self, full: &AttributeSchema, sub: &AttributeSchema) -> Result<Self> {
        let mapping = full.set_mapping(sub)?;
        Ok(PredictionSet {
            sets: mapping
                .into_iter()
                .map(|i| self.sets.get(i).cloned().flatten())
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionForm {
    Argmax,
    Soft,
}

/// Renders predictions in the interchange format. Soft values are written
/// with six decimals.
pub fn write_predictions(
    rows: &[(String, PredictionSet)],
    schema: &AttributeSchema,
    form: PredictionForm,
) -> Result<String> {
    let mut out = String::new();
    for (id, preds) in rows {
        if id.is_empty() || id.contains(['\t', '\n']) {
            return Err(Error::InvalidParameter(format!("bad image id `{id}`")));
        }
        out.push_str(id);
        out.push('\t');
        let mut first = true;
        for (i, set) in schema.sets().iter().enumerate() {
            let Some(p) = preds.get(i) else { continue };
            if !first {
                out.push(';');
            }
            first = false;
            out.push_str(&set.name);
            out.push('=');
            match (form, p) {
                (PredictionForm::Argmax, p) => {
                    let _ = write!(out, "{}", p.argmax());
                }
                (PredictionForm::Soft, SetPrediction::Probs(v)) => write_probs(&mut out, v),
                (PredictionForm::Soft, SetPrediction::Index(k)) => {
                    let v: Vec<f64> = (0..set.len()).map(|j| (j == *k) as u8 as f64).collect();
                    write_probs(&mut out, &v);
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn write_probs(out: &mut String, v: &[f64]) {
    for (j, x) in v.iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x:.6}");
    }
}

/// Parses the interchange format. Blank lines and `#` comments are skipped.
pub fn read_predictions(text: &str, schema: &AttributeSchema) -> Result<Vec<(String, PredictionSet)>> {
    const WHAT: &str = "predictions";
    let mut rows = Vec::new();
    let mut ids = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let (id, body) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(WHAT, lineno, "expected image_id<TAB>assignments"))?;
        if id.is_empty() {
            return Err(Error::format(WHAT, lineno, "empty image id"));
        }
        if !ids.insert(id.to_string()) {
            return Err(Error::format(WHAT, lineno, format!("duplicate image id `{id}`")));
        }
        let mut preds = PredictionSet::with_len(schema.len());
        for item in body.split(';').filter(|s| !s.trim().is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::format(WHAT, lineno, format!("expected name=value in `{item}`")))?;
            let name = name.trim();
            let set_i = schema
                .set_index(name)
                .ok_or_else(|| Error::UnknownSet(name.to_string()))?;
            if preds.get(set_i).is_some() {
                return Err(Error::format(WHAT, lineno, format!("set `{name}` given twice")));
            }
            let value = value.trim();
            let p = if value.contains([',', '.']) {
                let probs = value
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::format(WHAT, lineno, format!("bad probabilities for `{name}`")))?;
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::format(
                        WHAT,
                        lineno,
                        format!("negative or non-finite probability for `{name}`"),
                    ));
                }
                SetPrediction::Probs(probs)
            } else {
                let k = value
                    .parse::<usize>()
                    .map_err(|_| Error::format(WHAT, lineno, format!("bad index `{value}` for `{name}`")))?;
                SetPrediction::Index(k)
            };
            preds.set(set_i, p);
        }
        rows.push((id.to_string(), preds));
    }
    Ok(rows)
}
