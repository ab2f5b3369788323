//! The recognition lexicon: labels paired with attribute vectors.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::dictionary::CharacterEntry;
use super::schema::{AttributeSchema, GroupSelection, SchemaId};
use super::vector::{encode_entry, AttributeVector};
use crate::error::{Error, Label, Result};

/// Ordered (label, vector) pairs; the insertion index is the tie-break key
/// for recognition.
///
/// Vectors are additionally kept in one contiguous word array so that a scan
/// touches memory linearly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    schema_id: SchemaId,
    dim: usize,
    labels: Vec<Label>,
    packed: Vec<u64>,
}

impl Lexicon {
    pub fn new(schema: &AttributeSchema) -> Self {
        Self::empty(schema.id().clone(), schema.dim())
    }

    fn empty(schema_id: SchemaId, dim: usize) -> Self {
        Lexicon {
            schema_id,
            dim,
            labels: Vec::new(),
            packed: Vec::new(),
        }
    }

    pub fn push(&mut self, label: Label, vector: &AttributeVector) -> Result<()> {
        if vector.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: vector.dim(),
            });
        }
        if *vector.schema_id() != self.schema_id {
            return Err(Error::SchemaMismatch {
                expected: self.schema_id.to_string(),
                actual: vector.schema_id().to_string(),
            });
        }
        if self.labels.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        self.labels.push(label);
        self.packed.extend_from_slice(vector.words());
        Ok(())
    }

    pub fn from_pairs(
        schema: &AttributeSchema,
        pairs: impl IntoIterator<Item = (Label, AttributeVector)>,
    ) -> Result<Self> {
        let mut lex = Self::new(schema);
        let mut seen = HashSet::new();
        for (label, v) in pairs {
            if !seen.insert(label) {
                return Err(Error::DuplicateLabel(label));
            }
            v.check_schema(schema)?;
            lex.labels.push(label);
            lex.packed.extend_from_slice(v.words());
        }
        Ok(lex)
    }

    pub fn schema_id(&self) -> &SchemaId {
        &self.schema_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn words_per_entry(&self) -> usize {
        self.dim.div_ceil(64)
    }

    pub(crate) fn packed(&self) -> &[u64] {
        &self.packed
    }

    pub fn entry_words(&self, i: usize) -> &[u64] {
        let w = self.words_per_entry();
        &self.packed[i * w..(i + 1) * w]
    }

    pub fn vector(&self, i: usize) -> AttributeVector {
        let bytes: Vec<u8> = self
            .entry_words(i)
            .iter()
            .flat_map(|w| w.to_be_bytes())
            .take(self.dim.div_ceil(8))
            .collect();
        AttributeVector::from_bytes(&bytes, self.dim, self.schema_id.clone()).expect("lexicon words are well formed")
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, AttributeVector)> + '_ {
        (0..self.len()).map(|i| (self.labels[i], self.vector(i)))
    }

    /// Projects every entry onto the selected groups.
    pub fn project(&self, full: &AttributeSchema, selection: GroupSelection) -> Result<(AttributeSchema, Lexicon)> {
        if *full.id() != self.schema_id {
            return Err(Error::SchemaMismatch {
                expected: full.id().to_string(),
                actual: self.schema_id.to_string(),
            });
        }
        let sub = full.restrict(selection)?;
        let mapping = full.set_mapping(&sub)?;
        let mut out = Lexicon::new(&sub);
        for (label, v) in self.iter() {
            let p = v.project_with(full, &sub, &mapping);
            out.labels.push(label);
            out.packed.extend_from_slice(p.words());
        }
        Ok((sub, out))
    }

    /// Serializes as `schema_id<TAB>dim<TAB>count` followed by one
    /// `label<TAB>hex` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * (self.dim / 4 + 8) + 64);
        let _ = writeln!(out, "{}\t{}\t{}", self.schema_id, self.dim, self.len());
        for i in 0..self.len() {
            let _ = writeln!(out, "{}\t{}", self.labels[i], self.vector(i).to_hex());
        }
        out
    }

    /// Parses the lexicon file format; leading `#` comment lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        const WHAT: &str = "lexicon";
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::format(WHAT, 1, "missing header"))?;
        let h: Vec<&str> = header.split('\t').collect();
        if h.len() != 3 {
            return Err(Error::format(WHAT, hline + 1, "header must be schema_id, dim, count"));
        }
        let schema_id: SchemaId = h[0].trim().into();
        let dim: usize = h[1]
            .trim()
            .parse()
            .map_err(|_| Error::format(WHAT, hline + 1, "bad dimension"))?;
        let count: usize = h[2]
            .trim()
            .parse()
            .map_err(|_| Error::format(WHAT, hline + 1, "bad count"))?;
        let mut lex = Lexicon::empty(schema_id.clone(), dim);
        let mut seen = HashSet::new();
        for (i, line) in lines {
            let (label, bits) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(WHAT, i + 1, "expected label<TAB>bits"))?;
            let label =
                Label::parse(label).ok_or_else(|| Error::format(WHAT, i + 1, format!("bad label `{label}`")))?;
            if !seen.insert(label) {
                return Err(Error::DuplicateLabel(label));
            }
            let v = AttributeVector::from_hex(bits, dim, schema_id.clone())
                .map_err(|e| Error::format(WHAT, i + 1, e.to_string()))?;
            lex.labels.push(label);
            lex.packed.extend_from_slice(v.words());
        }
        if lex.len() != count {
            return Err(Error::format(
                WHAT,
                hline + 1,
                format!("header count {count} but {} entries", lex.len()),
            ));
        }
        Ok(lex)
    }
}

/// Encodes entries into a lexicon, preserving input order.
pub fn build_lexicon(entries: &[CharacterEntry], schema: &AttributeSchema) -> Result<Lexicon> {
    let mut lex = Lexicon::new(schema);
    let mut seen = HashSet::with_capacity(entries.len());
    for e in entries {
        if !seen.insert(e.label) {
            return Err(Error::DuplicateLabel(e.label));
        }
        let v = encode_entry(e, schema)?;
        lex.labels.push(e.label);
        lex.packed.extend_from_slice(v.words());
    }
    Ok(lex)
}
