//! Attribute schema, dictionary parsing, and the binary attribute codec.

pub mod dictionary;
pub mod lexicon;
pub mod schema;
pub mod vector;

pub use dictionary::{parse_dictionary, write_dictionary, CharacterEntry, Diagnostic, ParsedDictionary, RejectReason};
pub use lexicon::{build_lexicon, Lexicon};
pub use schema::{AttributeSchema, AttributeSet, Group, GroupSelection, SchemaId, FILLER};
pub use vector::{decode_vector, encode_entry, entry_indices, AttributeVector, SymbolAssignment};
