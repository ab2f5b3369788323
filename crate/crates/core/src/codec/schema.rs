//! Attribute-set schema: the ordered list of attribute sets and the bit
//! layout they induce.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Symbol used to pad input-method codes shorter than the group's slot count.
pub const FILLER: &str = "*";

/// The manifest bundled with the crate (23 sets, 511 dimensions).
pub const DEFAULT_MANIFEST: &str = include_str!("../../data/default_schema.tsv");

/// Attribute-type family an attribute set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Pinyin,
    Structure,
    Stroke,
    Cangjie,
    Zhengma,
    Wubi,
    FourCorner,
}

impl Group {
    pub const ALL: [Group; 7] = [
        Group::Pinyin,
        Group::Structure,
        Group::Stroke,
        Group::Cangjie,
        Group::Zhengma,
        Group::Wubi,
        Group::FourCorner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Pinyin => "pinyin",
            Group::Structure => "structure",
            Group::Stroke => "stroke",
            Group::Cangjie => "cangjie",
            Group::Zhengma => "zhengma",
            Group::Wubi => "wubi",
            Group::FourCorner => "fourcorner",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Group::Pinyin => "py",
            Group::Structure => "struct",
            Group::Stroke => "stroke",
            Group::Cangjie => "cj",
            Group::Zhengma => "zm",
            Group::Wubi => "wb",
            Group::FourCorner => "fc",
        }
    }

    /// Groups whose sets hold consecutive positions of one code string.
    pub fn is_positional(self) -> bool {
        matches!(self, Group::Cangjie | Group::Zhengma | Group::Wubi | Group::FourCorner)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let g = match s.trim().to_ascii_lowercase().as_str() {
            "pinyin" | "py" => Group::Pinyin,
            "structure" | "struct" => Group::Structure,
            "stroke" | "nstroke" | "strokes" => Group::Stroke,
            "cangjie" | "cj" => Group::Cangjie,
            "zhengma" | "zm" => Group::Zhengma,
            "wubi" | "wb" => Group::Wubi,
            "fourcorner" | "four-corner" | "fc" => Group::FourCorner,
            _ => return Err(Error::UnknownGroup(s.to_string())),
        };
        Ok(g)
    }
}

/// An ordered, duplicate-free set of groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GroupSelection(u8);

impl GroupSelection {
    pub fn all() -> Self {
        Self::from_groups(Group::ALL)
    }

    pub fn from_groups(groups: impl IntoIterator<Item = Group>) -> Self {
        let mut bits = 0u8;
        for g in groups {
            bits |= 1 << g as u8;
        }
        GroupSelection(bits)
    }

    /// Parses a comma- or `+`-separated list such as `cj,zm` or `cj+zm+wb`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        let mut groups = Vec::new();
        for part in s.split([',', '+']).map(str::trim).filter(|p| !p.is_empty()) {
            groups.push(part.parse::<Group>()?);
        }
        if groups.is_empty() {
            return Err(Error::EmptySelection);
        }
        Ok(Self::from_groups(groups))
    }

    pub fn contains(self, g: Group) -> bool {
        self.0 & (1 << g as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn groups(self) -> impl Iterator<Item = Group> {
        Group::ALL.into_iter().filter(move |g| self.contains(*g))
    }
}

impl fmt::Display for GroupSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::all() {
            return f.write_str("all");
        }
        let names: Vec<_> = self.groups().map(Group::short_name).collect();
        f.write_str(&names.join("+"))
    }
}

/// One categorical attribute: a named alphabet of symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSet {
    pub name: String,
    pub group: Group,
    pub alphabet: Vec<String>,
}

impl AttributeSet {
    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == symbol)
    }

    pub fn has_filler(&self) -> bool {
        self.index_of(FILLER).is_some()
    }
}

/// Stable identifier of a schema: a prefix of the SHA-256 of its canonical text.
pub type SchemaId = Arc<str>;

/// Ordered attribute sets defining the binary vector layout.
#[derive(Debug, Clone)]
pub struct AttributeSchema {
    sets: Vec<AttributeSet>,
    offsets: Vec<usize>,
    dim: usize,
    id: SchemaId,
}

impl PartialEq for AttributeSchema {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.sets == other.sets
    }
}

impl Eq for AttributeSchema {}

impl AttributeSchema {
    /// The bundled 23-set, 511-dimensional schema.
    pub fn default_schema() -> Self {
        Self::load(DEFAULT_MANIFEST).expect("bundled manifest is valid")
    }

    /// Parses a manifest: one set per line, `name<TAB>group<TAB>sym,sym,...`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn load(manifest: &str) -> Result<Self> {
        let mut sets = Vec::new();
        for (i, raw) in manifest.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::format(
                    "schema manifest",
                    i + 1,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let name = fields[0].trim();
            if name.is_empty() {
                return Err(Error::format("schema manifest", i + 1, "empty set name"));
            }
            let group: Group = fields[1].parse()?;
            let alphabet: Vec<String> = if fields[2].trim().is_empty() {
                Vec::new()
            } else {
                fields[2].split(',').map(|s| s.trim().to_string()).collect()
            };
            sets.push(AttributeSet {
                name: name.to_string(),
                group,
                alphabet,
            });
        }
        Self::from_sets(sets)
    }

    pub fn from_sets(sets: Vec<AttributeSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::format("schema manifest", 0, "no attribute sets"));
        }
        let mut names = HashSet::new();
        for set in &sets {
            if !names.insert(set.name.as_str()) {
                return Err(Error::DuplicateSet(set.name.clone()));
            }
            if set.alphabet.is_empty() {
                return Err(Error::EmptyAlphabet(set.name.clone()));
            }
            let mut seen = HashSet::new();
            for sym in &set.alphabet {
                if sym.is_empty() {
                    return Err(Error::format(
                        "schema manifest",
                        0,
                        format!("empty symbol in set `{}`", set.name),
                    ));
                }
                if !seen.insert(sym.as_str()) {
                    return Err(Error::DuplicateSymbol {
                        set: set.name.clone(),
                        symbol: sym.clone(),
                    });
                }
            }
        }
        let mut offsets = Vec::with_capacity(sets.len());
        let mut dim = 0;
        for set in &sets {
            offsets.push(dim);
            dim += set.len();
        }
        let canonical = canonical_text(&sets);
        let digest = Sha256::digest(canonical.as_bytes());
        let id: SchemaId = hex::encode(&digest[..8]).into();
        Ok(AttributeSchema { sets, offsets, dim, id })
    }

    /// Canonical manifest text (no comments). `load(to_manifest())` is the identity.
    pub fn to_manifest(&self) -> String {
        canonical_text(&self.sets)
    }

    pub fn id(&self) -> &SchemaId {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sets(&self) -> &[AttributeSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set_index(&self, name: &str) -> Option<usize> {
        self.sets.iter().position(|s| s.name == name)
    }

    /// Bit range occupied by set `i`.
    pub fn span(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.sets[i].len()
    }

    /// Indices of the sets belonging to `group`, in schema order.
    pub fn group_sets(&self, group: Group) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.sets[i].group == group).collect()
    }

    pub fn group_dim(&self, group: Group) -> usize {
        self.sets
            .iter()
            .filter(|s| s.group == group)
            .map(AttributeSet::len)
            .sum()
    }

    pub fn selection_dim(&self, selection: GroupSelection) -> usize {
        selection.groups().map(|g| self.group_dim(g)).sum()
    }

    /// Groups present in this schema.
    pub fn groups(&self) -> GroupSelection {
        GroupSelection::from_groups(self.sets.iter().map(|s| s.group))
    }

    /// Sub-schema keeping only the sets of the selected groups, in order.
    pub fn restrict(&self, selection: GroupSelection) -> Result<AttributeSchema> {
        if selection.is_empty() {
            return Err(Error::EmptySelection);
        }
        for g in selection.groups() {
            if !self.groups().contains(g) {
                return Err(Error::UnknownGroup(g.name().to_string()));
            }
        }
        let sets = self
            .sets
            .iter()
            .filter(|s| selection.contains(s.group))
            .cloned()
            .collect();
        Self::from_sets(sets)
    }

    /// For each set of `sub` (a restriction of `self`), the index of the
    /// same-named set in `self`.
    pub(crate) fn set_mapping(&self, sub: &AttributeSchema) -> Result<Vec<usize>> {
        sub.sets
            .iter()
            .map(|s| {
                let i = self
                    .set_index(&s.name)
                    .ok_or_else(|| Error::UnknownSet(s.name.clone()))?;
                if self.sets[i] != *s {
                    return Err(Error::SchemaMismatch {
                        expected: self.id.to_string(),
                        actual: sub.id.to_string(),
                    });
                }
                Ok(i)
            })
            .collect()
    }
}

fn canonical_text(sets: &[AttributeSet]) -> String {
    let mut out = String::new();
    for s in sets {
        out.push_str(&s.name);
        out.push('\t');
        out.push_str(s.group.name());
        out.push('\t');
        out.push_str(&s.alphabet.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schema_dims() {
        let s = AttributeSchema::default_schema();
        assert_eq!(s.len(), 23);
        assert_eq!(s.dim(), 511);
        let dims: Vec<usize> = s.sets().iter().map(AttributeSet::len).collect();
        assert_eq!(&dims[..5], &[26, 38, 5, 15, 31]);
        assert_eq!(&dims[18..], &[10, 10, 10, 10, 10]);
        assert_eq!(&dims[5..10], &[26, 27, 27, 27, 27]);
        let py = s.group_dim(Group::Pinyin) + s.group_dim(Group::Structure) + s.group_dim(Group::Stroke);
        assert_eq!(py, 115);
        assert_eq!(s.group_dim(Group::Cangjie), 134);
        assert_eq!(s.group_dim(Group::Zhengma), 105);
        assert_eq!(s.group_dim(Group::Wubi), 107);
        assert_eq!(s.group_dim(Group::FourCorner), 50);
    }

    #[test]
    fn filler_placement() {
        let s = AttributeSchema::default_schema();
        let filler: Vec<&str> = s
            .sets()
            .iter()
            .filter(|x| x.has_filler())
            .map(|x| x.name.as_str())
            .collect();
        assert_eq!(
            filler,
            [
                "cangjie_2",
                "cangjie_3",
                "cangjie_4",
                "cangjie_5",
                "zhengma_4",
                "wubi_2",
                "wubi_3",
                "wubi_4"
            ]
        );
    }

    #[test]
    fn tiny_manifest() {
        let s = AttributeSchema::load("x\tstructure\ta,b\n").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn manifest_errors() {
        assert!(matches!(
            AttributeSchema::load("x\tstructure\ta,a\n"),
            Err(Error::DuplicateSymbol { .. })
        ));
        assert!(matches!(
            AttributeSchema::load("x\tstructure\ta\nx\tstroke\tb\n"),
            Err(Error::DuplicateSet(_))
        ));
        assert!(matches!(
            AttributeSchema::load("x\tstructure\t\n"),
            Err(Error::EmptyAlphabet(_))
        ));
        assert!(matches!(
            AttributeSchema::load("x\tstructure\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            AttributeSchema::load("x\tcolour\ta\n"),
            Err(Error::UnknownGroup(_))
        ));
        assert!(AttributeSchema::load("# only comments\n").is_err());
    }

    #[test]
    fn manifest_round_trip_is_exact() {
        let s = AttributeSchema::default_schema();
        let text = s.to_manifest();
        let again = AttributeSchema::load(&text).unwrap();
        assert_eq!(again.to_manifest(), text);
        assert_eq!(again.id(), s.id());
    }

    #[test]
    fn restrict_dims() {
        let s = AttributeSchema::default_schema();
        let cj = s.restrict(GroupSelection::parse("cj").unwrap()).unwrap();
        assert_eq!(cj.dim(), 134);
        let four = s.restrict(GroupSelection::parse("cj,zm,wb,fc").unwrap()).unwrap();
        assert_eq!(four.dim(), 396);
        let all = s.restrict(GroupSelection::all()).unwrap();
        assert_eq!(all.id(), s.id());
        assert!(matches!(GroupSelection::parse(""), Err(Error::EmptySelection)));
        assert!(matches!(GroupSelection::parse("cj,xx"), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn selection_display() {
        assert_eq!(GroupSelection::parse("zm+cj").unwrap().to_string(), "cj+zm");
        assert_eq!(GroupSelection::all().to_string(), "all");
    }
}
