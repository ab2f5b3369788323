//! Sample store: a directory of 64×64 PGM images (`<image_id>.pgm`) and a
//! `labels.tsv` of `image_id<TAB>codepoint` rows.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use super::features::INPUT_SIZE;
use super::train::Sample;
use crate::codec::{entry_indices, AttributeSchema, CharacterEntry};
use crate::error::{Error, Label, Result};
use crate::segmentation::image::PageImage;
use crate::segmentation::pgm::{read_pgm, write_pgm};

pub const LABELS_FILE: &str = "labels.tsv";

/// An image of the store with its character label.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredImage {
    pub id: String,
    pub label: Option<Label>,
    pub image: PageImage,
}

/// Parses `image_id<TAB>codepoint` rows.
pub fn parse_labels(text: &str) -> Result<Vec<(String, Label)>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, cp) = line
            .split_once('\t')
            .ok_or_else(|| Error::format("labels", i + 1, "expected image_id<TAB>codepoint"))?;
        let label = Label::parse(cp).ok_or_else(|| Error::format("labels", i + 1, format!("bad codepoint `{cp}`")))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::format("labels", i + 1, format!("duplicate image id `{id}`")));
        }
        out.push((id.to_string(), label));
    }
    Ok(out)
}

pub fn labels_tsv(rows: &[(String, Label)]) -> String {
    rows.iter().map(|(id, l)| format!("{id}\t{l}\n")).collect()
}

fn read_image(dir: &Path, id: &str) -> Result<PageImage> {
    let img = read_pgm(fs::File::open(dir.join(format!("{id}.pgm")))?)?;
    if img.width() != INPUT_SIZE || img.height() != INPUT_SIZE {
        return Err(Error::ImageSize {
            width: img.width(),
            height: img.height(),
            expected_width: INPUT_SIZE,
            expected_height: INPUT_SIZE,
        });
    }
    Ok(img)
}

/// Loads the images listed in `labels` (default `dir/labels.tsv`), in file order.
pub fn load_labeled(dir: &Path, labels: Option<&Path>) -> Result<Vec<StoredImage>> {
    let path = labels.map(Path::to_path_buf).unwrap_or_else(|| dir.join(LABELS_FILE));
    let rows = parse_labels(&fs::read_to_string(path)?)?;
    rows.into_iter()
        .map(|(id, label)| {
            Ok(StoredImage {
                image: read_image(dir, &id)?,
                id,
                label: Some(label),
            })
        })
        .collect()
}

/// All images of a directory: the `labels.tsv` order when present, else every
/// `*.pgm` sorted by file name.
pub fn load_images(dir: &Path) -> Result<Vec<StoredImage>> {
    if dir.join(LABELS_FILE).is_file() {
        return load_labeled(dir, None);
    }
    let mut ids = Vec::new();
    for e in fs::read_dir(dir)? {
        let p = e?.path();
        if p.extension().is_some_and(|x| x == "pgm") {
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                ids.push(stem.to_string());
            }
        }
    }
    ids.sort();
    ids.into_iter()
        .map(|id| {
            Ok(StoredImage {
                image: read_image(dir, &id)?,
                id,
                label: None,
            })
        })
        .collect()
}

/// Writes images and `labels.tsv` into `dir` (created if missing).
pub fn write_store(dir: &Path, images: &[StoredImage]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut rows = Vec::new();
    for s in images {
        let f = fs::File::create(dir.join(format!("{}.pgm", s.id)))?;
        write_pgm(&s.image, BufWriter::new(f))?;
        if let Some(l) = s.label {
            rows.push((s.id.clone(), l));
        }
    }
    fs::write(dir.join(LABELS_FILE), labels_tsv(&rows))?;
    Ok(())
}

/// Attaches per-set targets from the dictionary.
pub fn to_samples(
    images: Vec<StoredImage>,
    entries: &[CharacterEntry],
    schema: &AttributeSchema,
) -> Result<Vec<Sample>> {
    let by_label: HashMap<Label, &CharacterEntry> = entries.iter().map(|e| (e.label, e)).collect();
    images
        .into_iter()
        .map(|s| {
            let label = s
                .label
                .ok_or_else(|| Error::IdMismatch(format!("image `{}` has no label", s.id)))?;
            let e = by_label.get(&label).ok_or(Error::UnknownLabel(label))?;
            Ok(Sample {
                targets: entry_indices(e, schema)?,
                id: s.id,
                label,
                image: s.image,
            })
        })
        .collect()
}
