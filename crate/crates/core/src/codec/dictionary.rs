//! Character dictionary records and the TSV dictionary reader.
//!
//! Column order: `label glyph pinyin_initial pinyin_final tone structure
//! stroke_count cangjie zhengma wubi fourcorner`, where `label` is a
//! hexadecimal codepoint. Every field is required.

use std::collections::HashSet;
use std::fmt;

use super::schema::{AttributeSchema, Group, FILLER};
use crate::error::Label;

/// Highest stroke-count bin; larger counts are folded into it.
pub const MAX_STROKE_BIN: u32 = 31;

const COLUMNS: [&str; 11] = [
    "label",
    "glyph",
    "pinyin_initial",
    "pinyin_final",
    "tone",
    "structure",
    "stroke_count",
    "cangjie",
    "zhengma",
    "wubi",
    "fourcorner",
];

/// One dictionary record with a single (pre-resolved) pronunciation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterEntry {
    pub label: Label,
    pub glyph: String,
    pub pinyin_initial: String,
    pub pinyin_final: String,
    pub tone: u8,
    pub structure: String,
    pub stroke_count: u32,
    pub cangjie: String,
    pub zhengma: String,
    pub wubi: String,
    pub fourcorner: String,
}

/// Why a dictionary line or entry was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    MissingField(&'static str),
    InvalidLabel(String),
    InvalidNumber {
        field: &'static str,
        value: String,
    },
    CodeTooLong {
        field: &'static str,
        len: usize,
        max: usize,
    },
    SymbolOutsideAlphabet {
        set: String,
        symbol: String,
    },
    DuplicateLabel,
    UnsupportedSchema(String),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::MissingField(field) => write!(f, "missing field `{field}`"),
            RejectReason::InvalidLabel(v) => write!(f, "invalid label `{v}`"),
            RejectReason::InvalidNumber { field, value } => {
                write!(f, "invalid number `{value}` in field `{field}`")
            }
            RejectReason::CodeTooLong { field, len, max } => {
                write!(f, "code too long: {field} has {len} symbols, maximum is {max}")
            }
            RejectReason::SymbolOutsideAlphabet { set, symbol } => {
                write!(f, "symbol `{symbol}` outside the alphabet of `{set}`")
            }
            RejectReason::DuplicateLabel => f.write_str("duplicate label"),
            RejectReason::UnsupportedSchema(msg) => write!(f, "unsupported schema: {msg}"),
        }
    }
}

/// A rejected dictionary line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub label: Option<Label>,
    pub reason: RejectReason,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Some(l) => write!(f, "line {} ({l}): {}", self.line, self.reason),
            None => write!(f, "line {}: {}", self.line, self.reason),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedDictionary {
    pub entries: Vec<CharacterEntry>,
    pub diagnostics: Vec<Diagnostic>,
}

impl CharacterEntry {
    /// Per-set symbols in schema order, with short positional codes padded
    /// by the filler symbol. Fails if any symbol is outside its alphabet.
    pub fn symbols(&self, schema: &AttributeSchema) -> Result<Vec<String>, RejectReason> {
        let mut out = vec![String::new(); schema.len()];
        for group in schema.groups().groups() {
            let idx = schema.group_sets(group);
            let values: Vec<String> = match group {
                Group::Pinyin => {
                    let all = [
                        self.pinyin_initial.clone(),
                        self.pinyin_final.clone(),
                        self.tone.to_string(),
                    ];
                    if idx.len() > all.len() {
                        return Err(RejectReason::UnsupportedSchema(format!(
                            "{} pinyin sets, dictionaries provide 3",
                            idx.len()
                        )));
                    }
                    all[..idx.len()].to_vec()
                }
                Group::Structure | Group::Stroke => {
                    if idx.len() != 1 {
                        return Err(RejectReason::UnsupportedSchema(format!(
                            "group {group} must have exactly one set"
                        )));
                    }
                    if group == Group::Structure {
                        vec![self.structure.clone()]
                    } else {
                        vec![self.stroke_count.min(MAX_STROKE_BIN).to_string()]
                    }
                }
                Group::Cangjie | Group::Zhengma | Group::Wubi | Group::FourCorner => {
                    let (field, code) = self.code(group);
                    let chars: Vec<String> = code.chars().map(String::from).collect();
                    if chars.len() > idx.len() {
                        return Err(RejectReason::CodeTooLong {
                            field,
                            len: chars.len(),
                            max: idx.len(),
                        });
                    }
                    let mut v = chars;
                    v.resize(idx.len(), FILLER.to_string());
                    v
                }
            };
            for (&set_i, value) in idx.iter().zip(values) {
                let set = &schema.sets()[set_i];
                if set.index_of(&value).is_none() {
                    return Err(RejectReason::SymbolOutsideAlphabet {
                        set: set.name.clone(),
                        symbol: value,
                    });
                }
                out[set_i] = value;
            }
        }
        Ok(out)
    }

    fn code(&self, group: Group) -> (&'static str, &str) {
        match group {
            Group::Cangjie => ("cangjie", &self.cangjie),
            Group::Zhengma => ("zhengma", &self.zhengma),
            Group::Wubi => ("wubi", &self.wubi),
            Group::FourCorner => ("fourcorner", &self.fourcorner),
            _ => unreachable!("not a positional group"),
        }
    }

    /// Serializes the entry as one dictionary TSV line (no newline).
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.label,
            self.glyph,
            self.pinyin_initial,
            self.pinyin_final,
            self.tone,
            self.structure,
            self.stroke_count,
            self.cangjie,
            self.zhengma,
            self.wubi,
            self.fourcorner
        )
    }
}

/// Parses a dictionary and validates each line against `schema`.
///
/// Rejected lines are reported as diagnostics; blank lines, `#` comments and
/// a leading `label...` header are skipped.
pub fn parse_dictionary(text: &str, schema: &AttributeSchema) -> ParsedDictionary {
    let mut out = ParsedDictionary::default();
    let mut seen = HashSet::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if std::mem::take(&mut first) && line.starts_with("label\t") {
            continue;
        }
        let lineno = i + 1;
        match parse_line(line) {
            Err((label, reason)) => out.diagnostics.push(Diagnostic {
                line: lineno,
                label,
                reason,
            }),
            Ok(entry) => {
                if let Err(reason) = entry.symbols(schema) {
                    out.diagnostics.push(Diagnostic {
                        line: lineno,
                        label: Some(entry.label),
                        reason,
                    });
                } else if !seen.insert(entry.label) {
                    out.diagnostics.push(Diagnostic {
                        line: lineno,
                        label: Some(entry.label),
                        reason: RejectReason::DuplicateLabel,
                    });
                } else {
                    out.entries.push(entry);
                }
            }
        }
    }
    out
}

fn parse_line(line: &str) -> Result<CharacterEntry, (Option<Label>, RejectReason)> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    let label_text = fields.first().copied().unwrap_or("");
    if label_text.is_empty() {
        return Err((None, RejectReason::MissingField("label")));
    }
    let label = Label::parse(label_text).ok_or_else(|| (None, RejectReason::InvalidLabel(label_text.to_string())))?;
    let fail = |r: RejectReason| (Some(label), r);
    for (col, name) in COLUMNS.iter().enumerate() {
        if fields.get(col).is_none_or(|f| f.is_empty()) {
            return Err(fail(RejectReason::MissingField(name)));
        }
    }
    let number = |col: usize| -> Result<u32, (Option<Label>, RejectReason)> {
        fields[col].parse::<u32>().map_err(|_| {
            fail(RejectReason::InvalidNumber {
                field: COLUMNS[col],
                value: fields[col].to_string(),
            })
        })
    };
    let tone = number(4)?;
    if tone > 9 {
        return Err(fail(RejectReason::InvalidNumber {
            field: "tone",
            value: fields[4].to_string(),
        }));
    }
    let strokes = number(6)?;
    if strokes == 0 {
        return Err(fail(RejectReason::InvalidNumber {
            field: "stroke_count",
            value: fields[6].to_string(),
        }));
    }
    Ok(CharacterEntry {
        label,
        glyph: fields[1].to_string(),
        pinyin_initial: fields[2].to_string(),
        pinyin_final: fields[3].to_string(),
        tone: tone as u8,
        structure: fields[5].to_string(),
        stroke_count: strokes.min(MAX_STROKE_BIN),
        cangjie: fields[7].to_ascii_uppercase(),
        zhengma: fields[8].to_ascii_uppercase(),
        wubi: fields[9].to_ascii_uppercase(),
        fourcorner: fields[10].to_string(),
    })
}

/// Renders entries as a dictionary file (with a header line).
pub fn write_dictionary(entries: &[CharacterEntry]) -> String {
    let mut out = COLUMNS.join("\t");
    out.push('\n');
    for e in entries {
        out.push_str(&e.to_tsv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = "4E2D\t中\tzh\tong\t1\ts00\t4\tL\tKBA\tK\t50006";

    fn schema() -> AttributeSchema {
        AttributeSchema::default_schema()
    }

    #[test]
    fn parses_valid_line() {
        let d = parse_dictionary(LINE, &schema());
        assert!(d.diagnostics.is_empty(), "{:?}", d.diagnostics);
        let e = &d.entries[0];
        assert_eq!(e.label, Label(0x4E2D));
        assert_eq!(e.tone, 1);
        assert_eq!(e.cangjie, "L");
    }

    #[test]
    fn tone_three() {
        let line = LINE.replace("\t1\ts00", "\t3\ts00");
        let d = parse_dictionary(&line, &schema());
        assert_eq!(d.entries[0].tone, 3);
    }

    #[test]
    fn six_letter_cangjie_rejected() {
        let line = LINE.replace("\tL\t", "\tABCDEF\t");
        let d = parse_dictionary(&line, &schema());
        assert!(d.entries.is_empty());
        assert_eq!(d.diagnostics.len(), 1);
        assert!(matches!(
            d.diagnostics[0].reason,
            RejectReason::CodeTooLong {
                field: "cangjie",
                len: 6,
                max: 5
            }
        ));
        assert!(d.diagnostics[0].to_string().contains("code too long"));
    }

    #[test]
    fn empty_stream() {
        let d = parse_dictionary("", &schema());
        assert!(d.entries.is_empty());
        assert!(d.diagnostics.is_empty());
    }

    #[test]
    fn missing_field_rejected() {
        let line = "4E2D\t中\tzh\tong\t1\ts00\t4\tL\tKBA\tK";
        let d = parse_dictionary(line, &schema());
        assert_eq!(d.diagnostics[0].reason, RejectReason::MissingField("fourcorner"));
        let blank = LINE.replace("\tzh\t", "\t\t");
        let d = parse_dictionary(&blank, &schema());
        assert_eq!(d.diagnostics[0].reason, RejectReason::MissingField("pinyin_initial"));
    }

    #[test]
    fn symbol_outside_alphabet() {
        let line = LINE.replace("\tong\t", "\tqqq\t");
        let d = parse_dictionary(&line, &schema());
        assert!(matches!(
            &d.diagnostics[0].reason,
            RejectReason::SymbolOutsideAlphabet { set, .. } if set == "pinyin_final"
        ));
        // Zhengma positions 2 and 3 carry no filler, so codes shorter than 3 cannot be encoded.
        let line = LINE.replace("\tKBA\t", "\tK\t");
        let d = parse_dictionary(&line, &schema());
        assert!(matches!(
            &d.diagnostics[0].reason,
            RejectReason::SymbolOutsideAlphabet { set, .. } if set == "zhengma_2"
        ));
    }

    #[test]
    fn duplicate_label_rejected() {
        let text = format!("{LINE}\n{LINE}\n");
        let d = parse_dictionary(&text, &schema());
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.diagnostics[0].line, 2);
        assert_eq!(d.diagnostics[0].reason, RejectReason::DuplicateLabel);
    }

    #[test]
    fn stroke_count_collapses() {
        let line = LINE.replace("\t4\tL", "\t36\tL");
        let d = parse_dictionary(&line, &schema());
        assert_eq!(d.entries[0].stroke_count, 31);
        let syms = d.entries[0].symbols(&schema()).unwrap();
        assert_eq!(syms[4], "31");
    }

    #[test]
    fn header_and_comments_skipped() {
        let e = parse_dictionary(LINE, &schema()).entries;
        let text = write_dictionary(&e);
        let text = format!("# provenance\n{text}# trailing comment\n\n");
        let d = parse_dictionary(&text, &schema());
        assert_eq!(d.entries, e);
        assert!(d.diagnostics.is_empty());
    }
}
