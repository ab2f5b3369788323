#ifndef HANZI_ATTR_H
#define HANZI_ATTR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HaStatus {
  HA_STATUS_OK = 0,
  HA_STATUS_NULL_POINTER = 1,
  HA_STATUS_INVALID_ARGUMENT = 2,
  HA_STATUS_IO = 3,
  HA_STATUS_UTF8 = 4,
  HA_STATUS_BUFFER_TOO_SMALL = 5,
  HA_STATUS_PANIC = 6,
} HaStatus;

// A lexicon of packed attribute vectors.
typedef struct HaLexicon HaLexicon;

// An attribute schema.
typedef struct HaSchema HaSchema;

// Result of segmenting one page.
typedef struct HaSegmentation HaSegmentation;

// One recognition candidate.
typedef struct HaCandidate {
  // Unicode codepoint (or private-use label) of the lexicon entry.
  uint32_t label;
  uint32_t distance;
} HaCandidate;

// A character box in deskewed page coordinates.
typedef struct HaBox {
  uint32_t x;
  uint32_t y;
  uint32_t w;
  uint32_t h;
  uint32_t line;
} HaBox;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *ha_last_error(void);

// Library version as a static NUL-terminated string.
const char *ha_version(void);

// The built-in 23-set schema.
enum HaStatus ha_schema_default(struct HaSchema **out);

// Parses a schema manifest (`name<TAB>group<TAB>sym,sym,...` lines).
enum HaStatus ha_schema_load(const char *manifest, struct HaSchema **out);

void ha_schema_free(struct HaSchema *schema);

// Total number of bits in an attribute vector; 0 for a null handle.
size_t ha_schema_dim(const struct HaSchema *schema);

// Number of attribute sets; 0 for a null handle.
size_t ha_schema_set_count(const struct HaSchema *schema);

// Number of symbols in set `index`; 0 when out of range.
size_t ha_schema_set_size(const struct HaSchema *schema, size_t index);

// Hex schema id, owned by the handle.
const char *ha_schema_id(const struct HaSchema *schema);

// Encodes every valid row of a dictionary TSV. Rows with diagnostics are
// skipped and counted in `rejected` (may be null).
enum HaStatus ha_lexicon_from_dictionary(const struct HaSchema *schema,
                                         const char *dictionary,
                                         size_t *rejected,
                                         struct HaLexicon **out);

// Parses a lexicon file as written by `hanzi-attr lexicon build`.
enum HaStatus ha_lexicon_load(const char *text, struct HaLexicon **out);

void ha_lexicon_free(struct HaLexicon *lexicon);

// Number of entries; 0 for a null handle.
size_t ha_lexicon_len(const struct HaLexicon *lexicon);

// Ranks lexicon entries by Hamming distance to a hardened prediction given
// as one symbol index per attribute set (`set_count` values).
//
// `groups` is a comma list such as `"cj,zm"`, or null for all groups.
// Up to `capacity` candidates are written to `out`; their number goes to
// `written`.
enum HaStatus ha_recognize_indices(const struct HaSchema *schema,
                                   const struct HaLexicon *lexicon,
                                   const size_t *indices,
                                   size_t set_count,
                                   const char *groups,
                                   struct HaCandidate *out,
                                   size_t capacity,
                                   size_t *written);

// Like [`ha_recognize_indices`], from per-set probability vectors laid out
// back to back in schema order (`dim` values in total).
enum HaStatus ha_recognize_probs(const struct HaSchema *schema,
                                 const struct HaLexicon *lexicon,
                                 const double *probs,
                                 size_t dim,
                                 const char *groups,
                                 struct HaCandidate *out,
                                 size_t capacity,
                                 size_t *written);

// Hamming distance between two hardened predictions (symbol indices per set).
enum HaStatus ha_hamming_indices(const struct HaSchema *schema,
                                 const size_t *a,
                                 const size_t *b,
                                 size_t set_count,
                                 uint32_t *distance);

// Segments a row-major page. With `binary` false the pixels are 0-255
// intensities (dark ink on light paper); otherwise 0/1 with 1 = ink.
// `config` holds `key=value` lines, or null for the defaults.
enum HaStatus ha_segment(const uint8_t *pixels,
                         size_t width,
                         size_t height,
                         bool binary,
                         const char *config,
                         struct HaSegmentation **out);

void ha_segmentation_free(struct HaSegmentation *seg);

// Estimated skew in degrees; NaN for a null handle.
double ha_segmentation_skew(const struct HaSegmentation *seg);

size_t ha_segmentation_line_count(const struct HaSegmentation *seg);

size_t ha_segmentation_box_count(const struct HaSegmentation *seg);

// Copies the boxes in reading order. Fails with `BufferTooSmall` (and
// writes nothing) when `capacity` is below the box count.
enum HaStatus ha_segmentation_boxes(const struct HaSegmentation *seg,
                                    struct HaBox *out,
                                    size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HANZI_ATTR_H */
