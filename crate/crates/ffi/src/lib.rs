//! C interface to the hanzi-attr toolkit.
//!
//! Every fallible function returns an [`HaStatus`]. On failure the message is
//! available from [`ha_last_error`] on the same thread until the next call.
//! Handles are opaque and must be released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hanzi_attr::codec::{build_lexicon, parse_dictionary, AttributeSchema, AttributeVector, GroupSelection, Lexicon};
use hanzi_attr::matcher::{argmax_onehot, hamming, recognize, PredictionSet, SetPrediction};
use hanzi_attr::segmentation::{segment_page, PageImage, PixelKind, SegConfig, Segmentation};
use hanzi_attr::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Utf8 = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// An attribute schema.
pub struct HaSchema {
    inner: AttributeSchema,
    id: CString,
}

/// A lexicon of packed attribute vectors.
pub struct HaLexicon {
    inner: Lexicon,
}

/// Result of segmenting one page.
pub struct HaSegmentation {
    inner: Segmentation,
}

/// One recognition candidate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HaCandidate {
    /// Unicode codepoint (or private-use label) of the lexicon entry.
    pub label: u32,
    pub distance: u32,
}

/// A character box in deskewed page coordinates.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HaBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub line: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let s = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

struct Fail(HaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = if e.is_io() {
            HaStatus::Io
        } else {
            HaStatus::InvalidArgument
        };
        Fail(code, e.to_string())
    }
}

fn fail<T>(code: HaStatus, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(code, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HaStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HaStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            HaStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .map_or_else(|| fail(HaStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return fail(HaStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|e| fail(HaStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(HaStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return fail(HaStatus::NullPointer, "output pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn wrap_schema(inner: AttributeSchema) -> HaSchema {
    let id = CString::new(inner.id().to_string()).unwrap_or_default();
    HaSchema { inner, id }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ha_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ha_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The built-in 23-set schema.
#[no_mangle]
pub unsafe extern "C" fn ha_schema_default(out: *mut *mut HaSchema) -> HaStatus {
    guard(|| put(out, wrap_schema(AttributeSchema::default_schema())))
}

/// Parses a schema manifest (`name<TAB>group<TAB>sym,sym,...` lines).
#[no_mangle]
pub unsafe extern "C" fn ha_schema_load(manifest: *const c_char, out: *mut *mut HaSchema) -> HaStatus {
    guard(|| {
        let text = as_str(manifest, "manifest")?;
        put(out, wrap_schema(AttributeSchema::load(text)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ha_schema_free(schema: *mut HaSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Total number of bits in an attribute vector; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ha_schema_dim(schema: *const HaSchema) -> usize {
    schema.as_ref().map_or(0, |s| s.inner.dim())
}

/// Number of attribute sets; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ha_schema_set_count(schema: *const HaSchema) -> usize {
    schema.as_ref().map_or(0, |s| s.inner.len())
}

/// Number of symbols in set `index`; 0 when out of range.
#[no_mangle]
pub unsafe extern "C" fn ha_schema_set_size(schema: *const HaSchema, index: usize) -> usize {
    schema
        .as_ref()
        .and_then(|s| s.inner.sets().get(index))
        .map_or(0, |set| set.len())
}

/// Hex schema id, owned by the handle.
#[no_mangle]
pub unsafe extern "C" fn ha_schema_id(schema: *const HaSchema) -> *const c_char {
    schema.as_ref().map_or(ptr::null(), |s| s.id.as_ptr())
}

/// Encodes every valid row of a dictionary TSV. Rows with diagnostics are
/// skipped and counted in `rejected` (may be null).
#[no_mangle]
pub unsafe extern "C" fn ha_lexicon_from_dictionary(
    schema: *const HaSchema,
    dictionary: *const c_char,
    rejected: *mut usize,
    out: *mut *mut HaLexicon,
) -> HaStatus {
    guard(|| {
        let schema = as_ref(schema, "schema")?;
        let text = as_str(dictionary, "dictionary")?;
        let parsed = parse_dictionary(text, &schema.inner);
        if !rejected.is_null() {
            *rejected = parsed.diagnostics.len();
        }
        if parsed.entries.is_empty() {
            return fail(HaStatus::InvalidArgument, "dictionary has no valid entries");
        }
        let inner = build_lexicon(&parsed.entries, &schema.inner)?;
        put(out, HaLexicon { inner })
    })
}

/// Parses a lexicon file as written by `hanzi-attr lexicon build`.
#[no_mangle]
pub unsafe extern "C" fn ha_lexicon_load(text: *const c_char, out: *mut *mut HaLexicon) -> HaStatus {
    guard(|| {
        let text = as_str(text, "lexicon")?;
        put(
            out,
            HaLexicon {
                inner: Lexicon::from_text(text)?,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn ha_lexicon_free(lexicon: *mut HaLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Number of entries; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ha_lexicon_len(lexicon: *const HaLexicon) -> usize {
    lexicon.as_ref().map_or(0, |l| l.inner.len())
}

fn query_vector(schema: &AttributeSchema, preds: PredictionSet) -> Result<AttributeVector, Fail> {
    Ok(argmax_onehot(&preds, schema)?)
}

fn selected(
    schema: &AttributeSchema,
    lexicon: &Lexicon,
    q: AttributeVector,
    groups: *const c_char,
) -> Result<(Lexicon, AttributeVector), Fail> {
    let sel = if groups.is_null() {
        GroupSelection::all()
    } else {
        GroupSelection::parse(unsafe { as_str(groups, "groups")? })?
    };
    let (sub, lex) = lexicon.project(schema, sel)?;
    let q = q.project(schema, &sub)?;
    Ok((lex, q))
}

unsafe fn rank(
    schema: &HaSchema,
    lexicon: &HaLexicon,
    query: AttributeVector,
    groups: *const c_char,
    out: *mut HaCandidate,
    capacity: usize,
) -> Result<usize, Fail> {
    if out.is_null() && capacity > 0 {
        return fail(HaStatus::NullPointer, "candidate buffer is null");
    }
    let k = capacity.min(lexicon.inner.len());
    if k == 0 {
        return fail(HaStatus::BufferTooSmall, "candidate buffer has no room");
    }
    let ranked = if groups.is_null() {
        recognize(&query, &lexicon.inner, k)?
    } else {
        let (lex, q) = selected(&schema.inner, &lexicon.inner, query, groups)?;
        recognize(&q, &lex, k)?
    };
    let dst = std::slice::from_raw_parts_mut(out, k);
    for (d, c) in dst.iter_mut().zip(&ranked) {
        *d = HaCandidate {
            label: c.label.0,
            distance: c.distance,
        };
    }
    Ok(ranked.len())
}

/// Ranks lexicon entries by Hamming distance to a hardened prediction given
/// as one symbol index per attribute set (`set_count` values).
///
/// `groups` is a comma list such as `"cj,zm"`, or null for all groups.
/// Up to `capacity` candidates are written to `out`; their number goes to
/// `written`.
#[no_mangle]
pub unsafe extern "C" fn ha_recognize_indices(
    schema: *const HaSchema,
    lexicon: *const HaLexicon,
    indices: *const usize,
    set_count: usize,
    groups: *const c_char,
    out: *mut HaCandidate,
    capacity: usize,
    written: *mut usize,
) -> HaStatus {
    guard(|| {
        let schema = as_ref(schema, "schema")?;
        let lexicon = as_ref(lexicon, "lexicon")?;
        let idx = as_slice(indices, set_count, "indices")?;
        if idx.len() != schema.inner.len() {
            return fail(
                HaStatus::InvalidArgument,
                format!("expected {} indices, got {}", schema.inner.len(), idx.len()),
            );
        }
        let q = query_vector(&schema.inner, PredictionSet::from_indices(idx))?;
        let n = rank(schema, lexicon, q, groups, out, capacity)?;
        if !written.is_null() {
            *written = n;
        }
        Ok(())
    })
}

/// Like [`ha_recognize_indices`], from per-set probability vectors laid out
/// back to back in schema order (`dim` values in total).
#[no_mangle]
pub unsafe extern "C" fn ha_recognize_probs(
    schema: *const HaSchema,
    lexicon: *const HaLexicon,
    probs: *const f64,
    dim: usize,
    groups: *const c_char,
    out: *mut HaCandidate,
    capacity: usize,
    written: *mut usize,
) -> HaStatus {
    guard(|| {
        let schema = as_ref(schema, "schema")?;
        let lexicon = as_ref(lexicon, "lexicon")?;
        let p = as_slice(probs, dim, "probs")?;
        if p.len() != schema.inner.dim() {
            return fail(
                HaStatus::InvalidArgument,
                format!("expected {} probabilities, got {}", schema.inner.dim(), p.len()),
            );
        }
        let sets = (0..schema.inner.len())
            .map(|i| SetPrediction::Probs(p[schema.inner.span(i)].to_vec()))
            .collect();
        let q = query_vector(&schema.inner, PredictionSet::from_sets(sets))?;
        let n = rank(schema, lexicon, q, groups, out, capacity)?;
        if !written.is_null() {
            *written = n;
        }
        Ok(())
    })
}

/// Hamming distance between two hardened predictions (symbol indices per set).
#[no_mangle]
pub unsafe extern "C" fn ha_hamming_indices(
    schema: *const HaSchema,
    a: *const usize,
    b: *const usize,
    set_count: usize,
    distance: *mut u32,
) -> HaStatus {
    guard(|| {
        let schema = as_ref(schema, "schema")?;
        let va = AttributeVector::from_indices(&schema.inner, as_slice(a, set_count, "a")?)?;
        let vb = AttributeVector::from_indices(&schema.inner, as_slice(b, set_count, "b")?)?;
        if distance.is_null() {
            return fail(HaStatus::NullPointer, "distance is null");
        }
        *distance = hamming(&va, &vb)?;
        Ok(())
    })
}

/// Segments a row-major page. With `binary` false the pixels are 0-255
/// intensities (dark ink on light paper); otherwise 0/1 with 1 = ink.
/// `config` holds `key=value` lines, or null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn ha_segment(
    pixels: *const u8,
    width: usize,
    height: usize,
    binary: bool,
    config: *const c_char,
    out: *mut *mut HaSegmentation,
) -> HaStatus {
    guard(|| {
        let n = width
            .checked_mul(height)
            .map_or_else(|| fail(HaStatus::InvalidArgument, "image size overflows"), Ok)?;
        let data = as_slice(pixels, n, "pixels")?;
        let kind = if binary { PixelKind::Binary } else { PixelKind::Gray };
        let img = PageImage::new(width, height, kind, data.to_vec())?;
        let cfg = if config.is_null() {
            SegConfig::default()
        } else {
            SegConfig::parse(as_str(config, "config")?)?
        };
        put(
            out,
            HaSegmentation {
                inner: segment_page(&img, &cfg)?,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn ha_segmentation_free(seg: *mut HaSegmentation) {
    if !seg.is_null() {
        drop(Box::from_raw(seg));
    }
}

/// Estimated skew in degrees; NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ha_segmentation_skew(seg: *const HaSegmentation) -> f64 {
    seg.as_ref().map_or(f64::NAN, |s| s.inner.skew_angle)
}

#[no_mangle]
pub unsafe extern "C" fn ha_segmentation_line_count(seg: *const HaSegmentation) -> usize {
    seg.as_ref().map_or(0, |s| s.inner.lines.len())
}

#[no_mangle]
pub unsafe extern "C" fn ha_segmentation_box_count(seg: *const HaSegmentation) -> usize {
    seg.as_ref().map_or(0, |s| s.inner.boxes.len())
}

/// Copies the boxes in reading order. Fails with `BufferTooSmall` (and
/// writes nothing) when `capacity` is below the box count.
#[no_mangle]
pub unsafe extern "C" fn ha_segmentation_boxes(
    seg: *const HaSegmentation,
    out: *mut HaBox,
    capacity: usize,
) -> HaStatus {
    guard(|| {
        let seg = as_ref(seg, "segmentation")?;
        let boxes = &seg.inner.boxes;
        if capacity < boxes.len() {
            return fail(
                HaStatus::BufferTooSmall,
                format!("{} boxes, buffer holds {capacity}", boxes.len()),
            );
        }
        if boxes.is_empty() {
            return Ok(());
        }
        if out.is_null() {
            return fail(HaStatus::NullPointer, "box buffer is null");
        }
        let dst = std::slice::from_raw_parts_mut(out, boxes.len());
        for (d, b) in dst.iter_mut().zip(boxes) {
            *d = HaBox {
                x: b.x as u32,
                y: b.y as u32,
                w: b.w as u32,
                h: b.h as u32,
                line: b.line as u32,
            };
        }
        Ok(())
    })
}
