//! Attribute accuracy, character accuracy by group subset, and
//! word-spotting mAP.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::codec::{AttributeSchema, GroupSelection, Lexicon};
use crate::error::{Error, Label, Result};
use crate::matcher::{argmax_onehot, recognize_batch, PredictionSet};

fn lookup<'a, T>(map: &'a HashMap<String, T>, id: &str) -> Result<&'a T> {
    map.get(id)
        .ok_or_else(|| Error::IdMismatch(format!("no ground truth for image `{id}`")))
}

/// Per-set fraction of images whose argmax equals the target index.
pub fn attribute_accuracy(
    preds: &[(String, PredictionSet)],
    truth: &HashMap<String, Vec<usize>>,
    schema: &AttributeSchema,
) -> Result<Vec<f64>> {
    if preds.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let mut hits = vec![0usize; schema.len()];
    for (id, p) in preds {
        let t = lookup(truth, id)?;
        if t.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                actual: t.len(),
            });
        }
        for (i, k) in p.argmax_indices().into_iter().enumerate().take(schema.len()) {
            if k == Some(t[i]) {
                hits[i] += 1;
            }
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / preds.len() as f64).collect())
}

/// Rank-1 recognitions for the selected groups, in prediction order.
pub fn recognize_top1(
    preds: &[(String, PredictionSet)],
    lexicon: &Lexicon,
    schema: &AttributeSchema,
    groups: GroupSelection,
) -> Result<Vec<Label>> {
    let (sub, sub_lex) = lexicon.project(schema, groups)?;
    let queries = preds
        .iter()
        .map(|(_, p)| argmax_onehot(p, schema)?.project(schema, &sub))
        .collect::<Result<Vec<_>>>()?;
    Ok(recognize_batch(&queries, &sub_lex, 1)?
        .into_iter()
        .map(|r| r[0].label)
        .collect())
}

/// Fraction of images whose rank-1 label under `groups` equals the truth.
pub fn character_accuracy(
    preds: &[(String, PredictionSet)],
    lexicon: &Lexicon,
    schema: &AttributeSchema,
    truth: &HashMap<String, Label>,
    groups: GroupSelection,
) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let mut want = Vec::with_capacity(preds.len());
    for (id, _) in preds {
        let l = *lookup(truth, id)?;
        if lexicon.position(l).is_none() {
            return Err(Error::UnknownLabel(l));
        }
        want.push(l);
    }
    let got = recognize_top1(preds, lexicon, schema, groups)?;
    let hits = got.iter().zip(&want).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Result of [`word_spotting_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpottingResult {
    pub map: f64,
    pub queries: usize,
    /// Queries whose label has no other instance.
    pub skipped: usize,
}

/// Feature file: `image_id<TAB>v1,v2,...` per image. Values use Rust's
/// shortest round-trip formatting.
pub fn features_tsv(items: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    for (id, f) in items {
        out.push_str(id);
        out.push('\t');
        for (i, v) in f.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_features_tsv(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| Error::format("features", i + 1, m);
        let (id, body) = line
            .split_once('\t')
            .ok_or_else(|| err("expected image_id<TAB>values".into()))?;
        let f = body
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| err(format!("bad value `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        out.push((id.to_string(), f));
    }
    Ok(out)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Every image queries all others ranked by Euclidean distance (ties by
/// image id); AP is the mean precision at the ranks of relevant items.
pub fn word_spotting_map(items: &[(String, Vec<f64>)], labels: &HashMap<String, Label>) -> Result<SpottingResult> {
    if items.is_empty() {
        return Err(Error::EmptyInput("features"));
    }
    let dim = items[0].1.len();
    let mut item_labels = Vec::with_capacity(items.len());
    for (id, f) in items {
        if f.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: f.len(),
            });
        }
        item_labels.push(*lookup(labels, id)?);
    }
    let mut counts: HashMap<Label, usize> = HashMap::new();
    for l in &item_labels {
        *counts.entry(*l).or_default() += 1;
    }
    let aps: Vec<Option<f64>> = (0..items.len())
        .into_par_iter()
        .map(|q| {
            let ql = item_labels[q];
            if counts[&ql] < 2 {
                return None;
            }
            let mut ranked: Vec<(f64, &str, bool)> = (0..items.len())
                .filter(|&j| j != q)
                .map(|j| {
                    (
                        squared_distance(&items[q].1, &items[j].1),
                        items[j].0.as_str(),
                        item_labels[j] == ql,
                    )
                })
                .collect();
            ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
            let mut found = 0usize;
            let mut sum = 0.0;
            for (rank, r) in ranked.iter().enumerate() {
                if r.2 {
                    found += 1;
                    sum += found as f64 / (rank + 1) as f64;
                }
            }
            Some(sum / found as f64)
        })
        .collect();
    let valid: Vec<f64> = aps.iter().flatten().copied().collect();
    let skipped = aps.len() - valid.len();
    if valid.is_empty() {
        return Err(Error::InvalidParameter("no label has two or more instances".into()));
    }
    Ok(SpottingResult {
        map: valid.iter().sum::<f64>() / valid.len() as f64,
        queries: valid.len(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{build_lexicon, encode_entry, parse_dictionary};
    use crate::synth::BUNDLED_DICTIONARY;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn attribute_accuracy_counts() {
        let schema = AttributeSchema::default_schema();
        let t = vec![0usize; 23];
        let mut preds = Vec::new();
        let mut truth = HashMap::new();
        for i in 0..4 {
            let mut idx = t.clone();
            if i == 2 {
                idx[5] = 1;
            }
            preds.push((format!("i{i}"), PredictionSet::from_indices(&idx)));
            truth.insert(format!("i{i}"), t.clone());
        }
        let acc = attribute_accuracy(&preds, &truth, &schema).unwrap();
        assert_eq!(acc[5], 0.75);
        assert!(acc.iter().enumerate().all(|(i, &a)| i == 5 || a == 1.0));
        preds.push(("zz".into(), PredictionSet::from_indices(&t)));
        assert!(matches!(
            attribute_accuracy(&preds, &truth, &schema),
            Err(Error::IdMismatch(_))
        ));
    }

    #[test]
    fn random_predictions_approach_chance() {
        let schema = AttributeSchema::default_schema();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let mut preds = Vec::new();
        let mut truth = HashMap::new();
        for i in 0..n {
            let idx: Vec<usize> = schema.sets().iter().map(|s| rng.gen_range(0..s.len())).collect();
            let tgt: Vec<usize> = schema.sets().iter().map(|s| rng.gen_range(0..s.len())).collect();
            preds.push((i.to_string(), PredictionSet::from_indices(&idx)));
            truth.insert(i.to_string(), tgt);
        }
        let acc = attribute_accuracy(&preds, &truth, &schema).unwrap();
        for (a, s) in acc.iter().zip(schema.sets()) {
            let p = 1.0 / s.len() as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((a - p).abs() <= 3.0 * sigma + 1e-12, "{}: {a} vs {p}", s.name);
        }
    }

    #[test]
    fn collision_exposed_by_tie_break() {
        let schema = AttributeSchema::default_schema();
        let text = "F0000\tx\tb\ta\t1\ts00\t3\tAB\tABC\tAB\t10000\n\
                    F0001\ty\tp\to\t2\ts01\t4\tAB\tXYZ\tCD\t20000\n";
        let parsed = parse_dictionary(text, &schema);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let entries = parsed.entries;
        let lex = build_lexicon(&entries, &schema).unwrap();
        let mut preds = Vec::new();
        let mut truth = HashMap::new();
        for e in &entries {
            let v = encode_entry(e, &schema).unwrap();
            preds.push((e.label.to_string(), PredictionSet::from_vector(&v, &schema).unwrap()));
            truth.insert(e.label.to_string(), e.label);
        }
        let cj = GroupSelection::parse("cj").unwrap();
        assert_eq!(character_accuracy(&preds, &lex, &schema, &truth, cj).unwrap(), 0.5);
        let all = GroupSelection::all();
        assert_eq!(character_accuracy(&preds, &lex, &schema, &truth, all).unwrap(), 1.0);
    }

    #[test]
    fn unknown_truth_label_rejected() {
        let schema = AttributeSchema::default_schema();
        let entries = parse_dictionary(BUNDLED_DICTIONARY, &schema).entries;
        let lex = build_lexicon(&entries[..3], &schema).unwrap();
        let v = encode_entry(&entries[0], &schema).unwrap();
        let preds = vec![("a".to_string(), PredictionSet::from_vector(&v, &schema).unwrap())];
        let truth = HashMap::from([("a".to_string(), entries[10].label)]);
        assert!(matches!(
            character_accuracy(&preds, &lex, &schema, &truth, GroupSelection::all()),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn map_examples() {
        let labels: HashMap<String, Label> = [("q", 1), ("a", 1), ("b", 2), ("c", 1), ("d", 2)]
            .iter()
            .map(|&(k, v)| (k.to_string(), Label(v)))
            .collect();
        let one = vec![
            ("q".to_string(), vec![0.0]),
            ("a".to_string(), vec![1.0]),
            ("b".to_string(), vec![5.0]),
        ];
        // q finds a at rank 1 (AP 1); a finds q at rank 1 (AP 1); b is a singleton.
        let r = word_spotting_map(&one, &labels).unwrap();
        assert_eq!((r.map, r.queries, r.skipped), (1.0, 2, 1));
        // Query q: ranking a(1) b(2) c(3) d(4) → relevant at 1 and 3 → 5/6.
        let items = vec![
            ("q".to_string(), vec![0.0]),
            ("a".to_string(), vec![1.0]),
            ("b".to_string(), vec![2.0]),
            ("c".to_string(), vec![3.0]),
            ("d".to_string(), vec![40.0]),
        ];
        let only_q: HashMap<String, Label> = labels
            .iter()
            .map(|(k, &v)| {
                (
                    k.clone(),
                    if k == "q" || k == "a" || k == "c" {
                        v
                    } else {
                        Label(100 + k.len() as u32 + k.as_bytes()[0] as u32)
                    },
                )
            })
            .collect();
        let r = word_spotting_map(&items, &only_q).unwrap();
        let ap_q = (1.0 + 2.0 / 3.0) / 2.0;
        // a: ranking q(1) b(1) tie by id → b, q? distances: q 1, b 1, c 2, d 39 → b, q, c: relevant q@2, c@3.
        let ap_a = (1.0 / 2.0 + 2.0 / 3.0) / 2.0;
        // c: b(1), d(37)? distances: b 1, a 2, q 3, d 37 → relevant a@2, q@3.
        let ap_c = (1.0 / 2.0 + 2.0 / 3.0) / 2.0;
        assert!((r.map - (ap_q + ap_a + ap_c) / 3.0).abs() < 1e-12);
        assert_eq!(r.skipped, 2);
    }

    #[test]
    fn features_round_trip() {
        let items = vec![
            ("a".to_string(), vec![0.1, -2.5, 1e-12]),
            ("b".to_string(), vec![3.0, 0.0, 7.25]),
        ];
        assert_eq!(parse_features_tsv(&features_tsv(&items)).unwrap(), items);
        assert!(parse_features_tsv("a\t1,x\n").is_err());
    }
}
