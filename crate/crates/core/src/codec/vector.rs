//! Bit-packed attribute vectors.
//!
//! Bit `i` of the layout lives in word `i / 64` at position `63 - i % 64`,
//! so the big-endian bytes of the word array are the layout read
//! most-significant-bit first.

use super::dictionary::{CharacterEntry, RejectReason};
use super::schema::{AttributeSchema, SchemaId, FILLER};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeVector {
    words: Vec<u64>,
    dim: usize,
    schema_id: SchemaId,
}

#[inline]
fn mask(i: usize) -> u64 {
    1u64 << (63 - (i % 64))
}

impl AttributeVector {
    pub fn zeros(schema: &AttributeSchema) -> Self {
        Self::zeros_with(schema.dim(), schema.id().clone())
    }

    pub(crate) fn zeros_with(dim: usize, schema_id: SchemaId) -> Self {
        AttributeVector {
            words: vec![0; dim.div_ceil(64)],
            dim,
            schema_id,
        }
    }

    /// Builds a vector from explicit per-set symbol indices.
    pub fn from_indices(schema: &AttributeSchema, indices: &[usize]) -> Result<Self> {
        if indices.len() != schema.len() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                actual: indices.len(),
            });
        }
        let mut v = Self::zeros(schema);
        for (set_i, &sym) in indices.iter().enumerate() {
            let span = schema.span(set_i);
            if sym >= span.len() {
                return Err(Error::InvalidParameter(format!(
                    "index {sym} out of range for set `{}`",
                    schema.sets()[set_i].name
                )));
            }
            v.set(span.start + sym, true);
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn schema_id(&self) -> &SchemaId {
        &self.schema_id
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit {i} out of range {}", self.dim);
        self.words[i / 64] & mask(i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, on: bool) {
        assert!(i < self.dim, "bit {i} out of range {}", self.dim);
        if on {
            self.words[i / 64] |= mask(i);
        } else {
            self.words[i / 64] &= !mask(i);
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(move |i| self.get(i))
    }

    /// Layout bytes, most significant bit first; `ceil(dim / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_be_bytes()).collect();
        bytes.truncate(self.dim.div_ceil(8));
        bytes
    }

    pub fn from_bytes(bytes: &[u8], dim: usize, schema_id: SchemaId) -> Result<Self> {
        if bytes.len() != dim.div_ceil(8) {
            return Err(Error::DimensionMismatch {
                expected: dim.div_ceil(8) * 8,
                actual: bytes.len() * 8,
            });
        }
        let mut v = Self::zeros_with(dim, schema_id);
        for (wi, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            v.words[wi] = u64::from_be_bytes(buf);
        }
        // Padding bits past `dim` must stay clear so popcount-based distances are exact.
        if !dim.is_multiple_of(64) {
            let last = v.words.len() - 1;
            let keep = !0u64 << (64 - dim % 64);
            if v.words[last] & !keep != 0 {
                return Err(Error::InvalidParameter(
                    "non-zero padding bits in attribute vector".into(),
                ));
            }
        }
        Ok(v)
    }

    pub fn to_hex(&self) -> String {
        hex::encode_upper(self.to_bytes())
    }

    pub fn from_hex(s: &str, dim: usize, schema_id: SchemaId) -> Result<Self> {
        let bytes = hex::decode(s.trim()).map_err(|e| Error::InvalidParameter(format!("bad hex bit string: {e}")))?;
        Self::from_bytes(&bytes, dim, schema_id)
    }

    pub(crate) fn check_schema(&self, schema: &AttributeSchema) -> Result<()> {
        if self.dim != schema.dim() {
            return Err(Error::DimensionMismatch {
                expected: schema.dim(),
                actual: self.dim,
            });
        }
        if self.schema_id != *schema.id() {
            return Err(Error::SchemaMismatch {
                expected: schema.id().to_string(),
                actual: self.schema_id.to_string(),
            });
        }
        Ok(())
    }

    /// Keeps the blocks of `sub`'s sets, in `sub`'s order.
    pub fn project(&self, full: &AttributeSchema, sub: &AttributeSchema) -> Result<Self> {
        self.check_schema(full)?;
        let mapping = full.set_mapping(sub)?;
        Ok(self.project_with(full, sub, &mapping))
    }

    pub(crate) fn project_with(&self, full: &AttributeSchema, sub: &AttributeSchema, mapping: &[usize]) -> Self {
        let mut out = Self::zeros(sub);
        for (sub_i, &full_i) in mapping.iter().enumerate() {
            let src = full.span(full_i);
            let dst = sub.span(sub_i);
            for (a, b) in src.zip(dst) {
                if self.get(a) {
                    out.set(b, true);
                }
            }
        }
        out
    }
}

/// Per-set symbol indices of `entry` in schema order.
pub fn entry_indices(entry: &CharacterEntry, schema: &AttributeSchema) -> Result<Vec<usize>> {
    let symbols = entry.symbols(schema).map_err(|r| invalid(entry, r))?;
    Ok(symbols
        .iter()
        .enumerate()
        .map(|(i, sym)| {
            schema.sets()[i]
                .index_of(sym)
                .expect("symbols() validated alphabet membership")
        })
        .collect())
}

/// Concatenated one-hot encoding of `entry` in schema order.
pub fn encode_entry(entry: &CharacterEntry, schema: &AttributeSchema) -> Result<AttributeVector> {
    let mut v = AttributeVector::zeros(schema);
    for (i, k) in entry_indices(entry, schema)?.into_iter().enumerate() {
        v.set(schema.span(i).start + k, true);
    }
    Ok(v)
}

fn invalid(entry: &CharacterEntry, reason: RejectReason) -> Error {
    Error::InvalidEntry {
        label: entry.label,
        reason: reason.to_string(),
    }
}

/// Result of decoding: the symbol at each set's 1-bit, or `None` for blocks
/// that are not one-hot (listed again in `flagged`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolAssignment {
    pub symbols: Vec<Option<String>>,
    pub flagged: Vec<usize>,
}

impl SymbolAssignment {
    pub fn is_complete(&self) -> bool {
        self.flagged.is_empty()
    }

    /// Reassembles an entry from a complete assignment (filler dropped).
    pub fn to_entry(
        &self,
        schema: &AttributeSchema,
        label: crate::error::Label,
        glyph: &str,
    ) -> Option<CharacterEntry> {
        use super::schema::Group;
        if !self.is_complete() {
            return None;
        }
        let sym = |i: usize| self.symbols[i].as_deref().unwrap_or_default();
        let group_code = |g: Group| -> String {
            schema
                .group_sets(g)
                .into_iter()
                .map(sym)
                .filter(|s| *s != FILLER)
                .collect()
        };
        let py = schema.group_sets(Group::Pinyin);
        let one = |g: Group| schema.group_sets(g).first().map(|&i| sym(i).to_string());
        Some(CharacterEntry {
            label,
            glyph: glyph.to_string(),
            pinyin_initial: py.first().map(|&i| sym(i).to_string()).unwrap_or_default(),
            pinyin_final: py.get(1).map(|&i| sym(i).to_string()).unwrap_or_default(),
            tone: py.get(2).and_then(|&i| sym(i).parse().ok()).unwrap_or(0),
            structure: one(Group::Structure).unwrap_or_default(),
            stroke_count: one(Group::Stroke).and_then(|s| s.parse().ok()).unwrap_or(0),
            cangjie: group_code(Group::Cangjie),
            zhengma: group_code(Group::Zhengma),
            wubi: group_code(Group::Wubi),
            fourcorner: group_code(Group::FourCorner),
        })
    }
}

/// Per-set symbol decoding; blocks without exactly one set bit are flagged.
pub fn decode_vector(vec: &AttributeVector, schema: &AttributeSchema) -> Result<SymbolAssignment> {
    if vec.dim() != schema.dim() {
        return Err(Error::DimensionMismatch {
            expected: schema.dim(),
            actual: vec.dim(),
        });
    }
    let mut symbols = Vec::with_capacity(schema.len());
    let mut flagged = Vec::new();
    for (i, set) in schema.sets().iter().enumerate() {
        let span = schema.span(i);
        let mut hit = None;
        let mut count = 0;
        for (k, bit) in span.enumerate() {
            if vec.get(bit) {
                count += 1;
                hit = Some(k);
            }
        }
        if count == 1 {
            symbols.push(hit.map(|k| set.alphabet[k].clone()));
        } else {
            symbols.push(None);
            flagged.push(i);
        }
    }
    Ok(SymbolAssignment { symbols, flagged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::dictionary::parse_dictionary;
    use crate::codec::schema::GroupSelection;

    fn entry() -> (AttributeSchema, CharacterEntry) {
        let s = AttributeSchema::default_schema();
        let d = parse_dictionary("4E2D\t中\tzh\tong\t3\ts00\t4\tLAB\tKBA\tK\t50006", &s);
        (s, d.entries[0].clone())
    }

    #[test]
    fn tone_block_is_one_hot_at_three() {
        let (s, e) = entry();
        let v = encode_entry(&e, &s).unwrap();
        let tone = s.set_index("pinyin_tone").unwrap();
        let bits: Vec<u8> = s.span(tone).map(|i| v.get(i) as u8).collect();
        assert_eq!(bits, [0, 0, 0, 1, 0]);
        assert_eq!(v.count_ones(), 23);
    }

    #[test]
    fn short_cangjie_padded_with_filler() {
        let (s, e) = entry();
        let v = encode_entry(&e, &s).unwrap();
        for name in ["cangjie_4", "cangjie_5"] {
            let i = s.set_index(name).unwrap();
            let star = s.sets()[i].index_of("*").unwrap();
            let span = s.span(i);
            assert!(v.get(span.start + star));
            assert_eq!(span.filter(|&b| v.get(b)).count(), 1);
        }
    }

    #[test]
    fn decode_round_trip() {
        let (s, e) = entry();
        let v = encode_entry(&e, &s).unwrap();
        let a = decode_vector(&v, &s).unwrap();
        assert!(a.is_complete());
        let expected: Vec<Option<String>> = e.symbols(&s).unwrap().into_iter().map(Some).collect();
        assert_eq!(a.symbols, expected);
        assert_eq!(a.to_entry(&s, e.label, &e.glyph).unwrap(), e);
    }

    #[test]
    fn all_zero_vector_flags_every_set() {
        let s = AttributeSchema::default_schema();
        let a = decode_vector(&AttributeVector::zeros(&s), &s).unwrap();
        assert_eq!(a.flagged.len(), 23);
        assert!(a.symbols.iter().all(Option::is_none));
    }

    #[test]
    fn double_bit_block_flagged() {
        let (s, e) = entry();
        let mut v = encode_entry(&e, &s).unwrap();
        let i = s.set_index("wubi_1").unwrap();
        let span = s.span(i);
        // Turn on a second bit in the wubi_1 block.
        let extra = span.clone().find(|&b| !v.get(b)).unwrap();
        v.set(extra, true);
        let a = decode_vector(&v, &s).unwrap();
        assert_eq!(a.flagged, vec![i]);
        let decoded = a.symbols.iter().filter(|x| x.is_some()).count();
        assert_eq!(decoded, 22);
    }

    #[test]
    fn dimension_mismatch() {
        let s = AttributeSchema::default_schema();
        let small = AttributeSchema::load("x\tstructure\ta,b\n").unwrap();
        assert!(matches!(
            decode_vector(&AttributeVector::zeros(&small), &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bytes_and_hex() {
        let s = AttributeSchema::load("x\tstructure\ta,b,c,d,e,f,g,h,i,j\n").unwrap();
        let mut v = AttributeVector::zeros(&s);
        v.set(0, true);
        v.set(9, true);
        assert_eq!(v.to_bytes(), vec![0x80, 0x40]);
        assert_eq!(v.to_hex(), "8040");
        let back = AttributeVector::from_hex("8040", 10, s.id().clone()).unwrap();
        assert_eq!(back, v);
        assert!(AttributeVector::from_hex("8041", 10, s.id().clone()).is_err());
        assert!(AttributeVector::from_hex("80", 10, s.id().clone()).is_err());
    }

    #[test]
    fn projection_dims() {
        let (s, e) = entry();
        let v = encode_entry(&e, &s).unwrap();
        for (sel, dim, ones) in [("cj", 134, 5), ("cj,zm,wb,fc", 396, 18), ("all", 511, 23)] {
            let sub = s.restrict(GroupSelection::parse(sel).unwrap()).unwrap();
            let p = v.project(&s, &sub).unwrap();
            assert_eq!(p.dim(), dim);
            assert_eq!(p.count_ones(), ones);
        }
        let all = s.restrict(GroupSelection::all()).unwrap();
        assert_eq!(v.project(&s, &all).unwrap(), v);
    }
}
