use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the toolkit.
///
/// Everything except [`Error::Io`] is a validation failure; the CLI maps the
/// two families onto different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{what}, line {line}: {msg}")]
    Format {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("duplicate attribute set name `{0}`")]
    DuplicateSet(String),

    #[error("attribute set `{0}` has an empty alphabet")]
    EmptyAlphabet(String),

    #[error("duplicate symbol `{symbol}` in attribute set `{set}`")]
    DuplicateSymbol { set: String, symbol: String },

    #[error("unknown attribute group `{0}`")]
    UnknownGroup(String),

    #[error("unknown attribute set `{0}`")]
    UnknownSet(String),

    #[error("group selection is empty")]
    EmptySelection,

    #[error("duplicate label {0}")]
    DuplicateLabel(Label),

    #[error("label {0} is not in the lexicon")]
    UnknownLabel(Label),

    #[error("invalid entry {label}: {reason}")]
    InvalidEntry { label: Label, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("schema mismatch: expected {expected}, got {actual}")]
    SchemaMismatch { expected: String, actual: String },

    #[error("lexicon is empty")]
    EmptyLexicon,

    #[error("prediction is missing attribute set `{0}`")]
    MissingSet(String),

    #[error("attribute set `{set}` expects {expected} values, got {actual}")]
    ProbabilityLength {
        set: String,
        expected: usize,
        actual: usize,
    },

    #[error("image is {width}x{height}, expected {expected_width}x{expected_height}")]
    ImageSize {
        width: usize,
        height: usize,
        expected_width: usize,
        expected_height: usize,
    },

    #[error("image has zero area")]
    EmptyImage,

    #[error("cannot estimate m_h: no candidate box passed the aspect-ratio test")]
    NoAcceptedBoxes,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("image id mismatch: {0}")]
    IdMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }

    pub(crate) fn format(what: &'static str, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            what,
            line,
            msg: msg.into(),
        }
    }
}

/// A character label: the Unicode scalar value of the character.
///
/// Displayed and parsed as an uppercase hexadecimal codepoint (`4E00`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

impl Label {
    pub fn parse(s: &str) -> Option<Label> {
        let s = s.trim();
        let s = s.strip_prefix("U+").or_else(|| s.strip_prefix("u+")).unwrap_or(s);
        if s.is_empty() || s.len() > 6 {
            return None;
        }
        let v = u32::from_str_radix(s, 16).ok()?;
        char::from_u32(v).map(|_| Label(v))
    }

    pub fn as_char(self) -> Option<char> {
        char::from_u32(self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04X}", self.0)
    }
}
