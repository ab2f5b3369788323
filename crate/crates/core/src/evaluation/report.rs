//! Ablation report over the canonical group subsets.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::metrics::{attribute_accuracy, character_accuracy};
use crate::codec::{AttributeSchema, Group, GroupSelection, Lexicon};
use crate::error::{Label, Result};
use crate::matcher::PredictionSet;

/// The eight subsets reported: pinyin+structure+stroke, each code alone,
/// the three shape codes, all four codes, and everything.
pub fn canonical_subsets() -> Vec<GroupSelection> {
    use Group::*;
    vec![
        GroupSelection::from_groups([Pinyin, Structure, Stroke]),
        GroupSelection::from_groups([Cangjie]),
        GroupSelection::from_groups([Zhengma]),
        GroupSelection::from_groups([Wubi]),
        GroupSelection::from_groups([FourCorner]),
        GroupSelection::from_groups([Cangjie, Zhengma, Wubi]),
        GroupSelection::from_groups([Cangjie, Zhengma, Wubi, FourCorner]),
        GroupSelection::all(),
    ]
}

/// One character-accuracy row.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetAccuracy {
    pub subset: GroupSelection,
    pub dims: usize,
    pub accuracy: f64,
}

/// Evaluation metrics; `counts` holds `(name, count)` pairs such as split sizes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub attribute: Vec<(String, f64)>,
    pub character: Vec<SubsetAccuracy>,
    pub map: Option<f64>,
    pub counts: Vec<(String, usize)>,
}

impl EvalReport {
    /// `metric<TAB>value<TAB>dims` rows after a header row.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("metric\tvalue\tdims\n");
        for (name, v) in &self.attribute {
            let _ = writeln!(s, "attr_acc.{name}\t{v:.6}\t");
        }
        for row in &self.character {
            let _ = writeln!(s, "char_acc.{}\t{:.6}\t{}", row.subset, row.accuracy, row.dims);
        }
        if let Some(m) = self.map {
            let _ = writeln!(s, "map\t{m:.6}\t");
        }
        for (name, n) in &self.counts {
            let _ = writeln!(s, "count.{name}\t{n}\t");
        }
        s
    }

    pub fn char_acc(&self, subset: GroupSelection) -> Option<f64> {
        self.character.iter().find(|r| r.subset == subset).map(|r| r.accuracy)
    }
}

/// Per-set attribute accuracy plus character accuracy for every canonical subset.
pub fn ablation_report(
    preds: &[(String, PredictionSet)],
    lexicon: &Lexicon,
    schema: &AttributeSchema,
    truth: &HashMap<String, Label>,
    targets: &HashMap<String, Vec<usize>>,
) -> Result<EvalReport> {
    let attr = attribute_accuracy(preds, targets, schema)?;
    let mut character = Vec::new();
    for subset in canonical_subsets() {
        character.push(SubsetAccuracy {
            subset,
            dims: schema.selection_dim(subset),
            accuracy: character_accuracy(preds, lexicon, schema, truth, subset)?,
        });
    }
    Ok(EvalReport {
        attribute: schema.sets().iter().map(|s| s.name.clone()).zip(attr).collect(),
        character,
        map: None,
        counts: vec![("images".into(), preds.len())],
    })
}
