use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use hanzi_attr::classifier::{
    batch_features, coverage, load_images, load_labeled, parse_labels, predict_features, to_samples, train,
    write_store, MultiHeadModel, StoredImage, TrainConfig, INPUT_SIZE, LABELS_FILE,
};
use hanzi_attr::codec::{
    build_lexicon, parse_dictionary, write_dictionary, AttributeSchema, CharacterEntry, GroupSelection, Lexicon,
};
use hanzi_attr::evaluation::{
    ablation_report, features_tsv, frequency_split, kshot_augment, parse_features_tsv, word_spotting_map, Split,
    SplitSpec,
};
use hanzi_attr::matcher::{
    argmax_onehot, read_predictions, recognize_batch, write_predictions, PredictionForm, PredictionSet,
};
use hanzi_attr::segmentation::pgm::{read_pgm, write_pgm};
use hanzi_attr::segmentation::{
    boxes_tsv, glyph_crop, lines_tsv, rotate, segment_page_with_image, PageImage, SegConfig,
};
use hanzi_attr::synth::{
    class_entries, fits_page, generate_classes, generate_page_from, render_corpus, GlyphClass, PageSpec, RenderStyle,
    LABEL_BASE,
};
use hanzi_attr::{Error, Label, Result};

use crate::args::*;

/// Skews cycled through by `synth pages`.
const PAGE_SKEWS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write_file(path: &Path, data: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, data).map_err(|e| io_error(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| io_error(path, e))
}

fn config_hash(config: &str) -> String {
    hex::encode(&Sha256::digest(config.as_bytes())[..8])
}

/// Provenance for the first line of every text output.
struct Provenance {
    schema: Option<String>,
    config: String,
}

impl Provenance {
    fn new(schema: Option<&AttributeSchema>, config: String) -> Self {
        let p = Provenance {
            schema: schema.map(|s| s.id().to_string()),
            config,
        };
        info!("schema_id={} config={}", p.schema_id(), config_hash(&p.config));
        p
    }

    fn schema_id(&self) -> &str {
        self.schema.as_deref().unwrap_or("none")
    }

    fn header(&self) -> String {
        format!(
            "# hanzi-attr {} schema={} config={}\n",
            env!("CARGO_PKG_VERSION"),
            self.schema_id(),
            config_hash(&self.config)
        )
    }

    fn write(&self, path: &Path, body: &str) -> Result<()> {
        write_file(path, format!("{}{body}", self.header()))
    }
}

fn load_schema(arg: &SchemaArg) -> Result<AttributeSchema> {
    match &arg.schema {
        Some(p) => AttributeSchema::load(&read_text(p)?),
        None => Ok(AttributeSchema::default_schema()),
    }
}

fn load_dictionary(path: &Path, schema: &AttributeSchema) -> Result<Vec<CharacterEntry>> {
    let parsed = parse_dictionary(&read_text(path)?, schema);
    for d in &parsed.diagnostics {
        warn!("{}: rejected {d}", path.display());
    }
    if parsed.entries.is_empty() {
        return Err(Error::EmptyInput("dictionary"));
    }
    Ok(parsed.entries)
}

fn load_lexicon(path: &Path, schema: &AttributeSchema) -> Result<Lexicon> {
    let lex = Lexicon::from_text(&read_text(path)?)?;
    if lex.schema_id() != schema.id() {
        return Err(Error::SchemaMismatch {
            expected: schema.id().to_string(),
            actual: lex.schema_id().to_string(),
        });
    }
    Ok(lex)
}

fn read_image(path: &Path) -> Result<PageImage> {
    let f = fs::File::open(path).map_err(|e| io_error(path, e))?;
    read_pgm(io::BufReader::new(f))
}

fn write_image(path: &Path, img: &PageImage) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| io_error(path, e))?;
    write_pgm(img, io::BufWriter::new(f))
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("page").to_string()
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Lexicon(LexiconCmd::Build { schema, dict, output }) => lexicon_build(&schema, &dict, &output),
        Command::Segment(a) => segment(&a),
        Command::Train(a) => train_cmd(&a),
        Command::Predict(a) => predict(&a),
        Command::Recognize(a) => recognize(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Spot(a) => spot(&a),
        Command::Split(a) => split(&a),
        Command::Synth(c) => synth(&c),
    }
}

fn lexicon_build(schema: &SchemaArg, dict: &Path, output: &Path) -> Result<()> {
    let schema = load_schema(schema)?;
    let entries = load_dictionary(dict, &schema)?;
    let lex = build_lexicon(&entries, &schema)?;
    info!("{} entries, {} bits", lex.len(), lex.dim());
    Provenance::new(Some(&schema), String::new()).write(output, &lex.to_text())
}

fn segment(a: &SegmentArgs) -> Result<()> {
    let cfg = match &a.config {
        Some(p) => SegConfig::parse(&read_text(p)?)?,
        None => SegConfig::default(),
    };
    if !(a.crop_fill > 0.0 && a.crop_fill <= 1.0) {
        return Err(Error::InvalidParameter("crop fill must be in (0, 1]".into()));
    }
    let mut config = cfg.to_text();
    if a.crops.is_some() {
        let _ = writeln!(config, "crop_fill={}", a.crop_fill);
    }
    let prov = Provenance::new(None, config);
    let img = read_image(&a.input)?;
    let (_, seg) = segment_page_with_image(&img, &cfg)?;
    let id = stem(&a.input);
    info!(
        "{id}: skew {}°, {} lines, {} boxes",
        seg.skew_angle,
        seg.lines.len(),
        seg.boxes.len()
    );
    prov.write(&a.output, &boxes_tsv(&id, &seg))?;
    if let Some(p) = &a.lines {
        prov.write(p, &lines_tsv(&id, &seg))?;
    }
    if let Some(dir) = &a.crops {
        create_dir(dir)?;
        let page = rotate(&img.to_gray(), -seg.skew_angle);
        for (i, b) in seg.boxes.iter().enumerate() {
            let crop = glyph_crop(&page, b, a.crop_fill, INPUT_SIZE);
            write_image(&dir.join(format!("{id}_{i:03}.pgm")), &crop)?;
        }
    }
    Ok(())
}

fn train_cmd(a: &TrainArgs) -> Result<()> {
    let schema = load_schema(&a.schema)?;
    let entries = load_dictionary(&a.dict, &schema)?;
    let mut cfg = match &a.config {
        Some(p) => TrainConfig::parse(&read_text(p)?)?,
        None => TrainConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(p) = &a.augment_corpus {
        cfg.augment_corpus = Some(p.clone());
    }
    let prov = Provenance::new(Some(&schema), cfg.to_text());

    let mut images = load_labeled(&a.samples, a.labels.as_deref())?;
    if let Some(dir) = &cfg.augment_corpus {
        let extra = load_labeled(dir, None)?;
        info!("augmenting with {} images from {}", extra.len(), dir.display());
        images.extend(extra);
    }
    let samples = to_samples(images, &entries, &schema)?;
    let cov = coverage(&schema, &samples);
    if cov.untrained() > 0 {
        warn!("{} attribute symbols have no training sample", cov.untrained());
    }
    info!("training on {} samples", samples.len());
    let (model, trace) = train(&samples, &cfg, &schema)?;
    info!(
        "final smoothed loss {:.4}, model {}",
        trace.smoothed(100).last().copied().unwrap_or(f64::NAN),
        model.checksum()
    );
    write_file(&a.output, model.to_bytes())?;
    if let Some(p) = &a.trace {
        let mut body = String::from("iteration\tloss\n");
        for (i, l) in trace.batch_loss.iter().enumerate() {
            let _ = writeln!(body, "{i}\t{l:.6}");
        }
        prov.write(p, &body)?;
    }
    Ok(())
}

fn load_model(path: &Path, schema: &AttributeSchema) -> Result<MultiHeadModel> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    let model = MultiHeadModel::from_bytes(&bytes)?;
    model.check_schema(schema)?;
    Ok(model)
}

fn predict(a: &PredictArgs) -> Result<()> {
    let schema = load_schema(&a.schema)?;
    let model = load_model(&a.model, &schema)?;
    let form = match a.form {
        Form::Soft => PredictionForm::Soft,
        Form::Argmax => PredictionForm::Argmax,
    };
    let prov = Provenance::new(
        Some(&schema),
        format!("model={}\nform={:?}\n", model.checksum(), a.form),
    );
    let images = load_images(&a.images)?;
    if images.is_empty() {
        return Err(Error::EmptyInput("images"));
    }
    let refs: Vec<&PageImage> = images.iter().map(|s| &s.image).collect();
    let features = batch_features(&refs)?;
    let preds = predict_features(&model, &features)?;
    let rows: Vec<(String, PredictionSet)> = images.iter().map(|s| s.id.clone()).zip(preds).collect();
    prov.write(&a.output, &write_predictions(&rows, &schema, form)?)?;
    if let Some(p) = &a.features_out {
        let items: Vec<(String, Vec<f64>)> = images.iter().map(|s| s.id.clone()).zip(features).collect();
        prov.write(p, &features_tsv(&items))?;
    }
    info!("{} images", rows.len());
    Ok(())
}

fn parse_groups(groups: &Option<String>) -> Result<GroupSelection> {
    match groups {
        Some(g) => GroupSelection::parse(g),
        None => Ok(GroupSelection::all()),
    }
}

fn recognize(a: &RecognizeArgs) -> Result<()> {
    let schema = load_schema(&a.schema)?;
    let lex = load_lexicon(&a.lexicon, &schema)?;
    let groups = parse_groups(&a.groups)?;
    let prov = Provenance::new(Some(&schema), format!("groups={groups}\ntop={}\n", a.top));
    let preds = read_predictions(&read_text(&a.preds)?, &schema)?;
    let (sub, sub_lex) = lex.project(&schema, groups)?;
    let queries = preds
        .iter()
        .map(|(_, p)| argmax_onehot(p, &schema)?.project(&schema, &sub))
        .collect::<Result<Vec<_>>>()?;
    let ranked = recognize_batch(&queries, &sub_lex, a.top)?;
    let mut body = String::from("image_id\trank\tlabel\tdistance\n");
    for ((id, _), cands) in preds.iter().zip(&ranked) {
        for (r, c) in cands.iter().enumerate() {
            let _ = writeln!(body, "{id}\t{}\t{}\t{}", r + 1, c.label, c.distance);
        }
    }
    prov.write(&a.output, &body)
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let schema = load_schema(&a.schema)?;
    let lex = load_lexicon(&a.lexicon, &schema)?;
    let mut config = String::new();
    if a.split.is_some() {
        let _ = writeln!(config, "partition={}", a.partition);
    }
    let prov = Provenance::new(Some(&schema), config);
    let mut preds = read_predictions(&read_text(&a.preds)?, &schema)?;
    let truth: HashMap<String, Label> = parse_labels(&read_text(&a.truth)?)?.into_iter().collect();
    if let Some(p) = &a.split {
        let split = Split::from_tsv(&read_text(p)?)?;
        let keep: HashSet<&str> = split
            .partition(&a.partition)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown partition `{}`", a.partition)))?
            .iter()
            .map(String::as_str)
            .collect();
        preds.retain(|(id, _)| keep.contains(id.as_str()));
    }
    let mut targets = HashMap::new();
    for (id, _) in &preds {
        let label = truth
            .get(id)
            .ok_or_else(|| Error::IdMismatch(format!("no ground truth for image `{id}`")))?;
        let pos = lex.position(*label).ok_or(Error::UnknownLabel(*label))?;
        let t: Vec<usize> = PredictionSet::from_vector(&lex.vector(pos), &schema)?
            .argmax_indices()
            .into_iter()
            .map(|k| k.expect("one-hot vector"))
            .collect();
        targets.insert(id.clone(), t);
    }
    let mut report = ablation_report(&preds, &lex, &schema, &truth, &targets)?;
    report.counts.push(("preds".into(), preds.len()));
    if let Some(p) = &a.features {
        let ids: HashSet<&str> = preds.iter().map(|(id, _)| id.as_str()).collect();
        let items: Vec<_> = parse_features_tsv(&read_text(p)?)?
            .into_iter()
            .filter(|(id, _)| ids.contains(id.as_str()))
            .collect();
        let spot = word_spotting_map(&items, &truth)?;
        report.map = Some(spot.map);
        report.counts.push(("map_queries".into(), spot.queries));
        report.counts.push(("map_skipped".into(), spot.skipped));
    }
    prov.write(&a.output, &report.to_tsv())
}

fn spot(a: &SpotArgs) -> Result<()> {
    let prov = Provenance::new(None, String::new());
    let items = parse_features_tsv(&read_text(&a.features)?)?;
    let labels: HashMap<String, Label> = parse_labels(&read_text(&a.labels)?)?.into_iter().collect();
    let r = word_spotting_map(&items, &labels)?;
    info!("mAP {:.4} over {} queries ({} skipped)", r.map, r.queries, r.skipped);
    prov.write(
        &a.output,
        &format!("map\t{:.6}\nqueries\t{}\nskipped\t{}\n", r.map, r.queries, r.skipped),
    )
}

fn split(a: &SplitArgs) -> Result<()> {
    let spec = SplitSpec {
        frequency_threshold: a.threshold,
        train_fraction: a.train_fraction,
        k: a.k,
        seed: a.seed,
    };
    let prov = Provenance::new(
        None,
        format!(
            "threshold={}\ntrain_fraction={}\nk={}\nseed={}\n",
            spec.frequency_threshold, spec.train_fraction, spec.k, spec.seed
        ),
    );
    let items = parse_labels(&read_text(&a.labels)?)?;
    let mut s = frequency_split(&items, &spec)?;
    if spec.k > 0 {
        s = kshot_augment(&s, &items, spec.k, spec.seed)?;
    }
    info!(
        "hifreq_train {}, hifreq_test {}, lofreq {}",
        s.hifreq_train.len(),
        s.hifreq_test.len(),
        s.lofreq.len()
    );
    prov.write(&a.output, &s.to_tsv())
}

fn source_classes(src: &ClassSource) -> Vec<GlyphClass> {
    generate_classes(src.dict_size, src.dict_seed)
}

fn source_config(src: &ClassSource) -> String {
    format!("dict_size={}\ndict_seed={}\n", src.dict_size, src.dict_seed)
}

fn synth(cmd: &SynthCmd) -> Result<()> {
    match cmd {
        SynthCmd::Dictionary { source, output } => {
            let prov = Provenance::new(None, source_config(source));
            let entries = class_entries(&source_classes(source));
            prov.write(output, &write_dictionary(&entries))
        }
        SynthCmd::Samples {
            source,
            first,
            count,
            per_class,
            seed,
            output,
        } => {
            let classes = source_classes(source);
            let end = first + count;
            if *count == 0 || end > classes.len() {
                return Err(Error::InvalidParameter(format!(
                    "class range {first}..{end} outside 0..{}",
                    classes.len()
                )));
            }
            let config = format!(
                "{}first={first}\ncount={count}\nper_class={per_class}\nseed={seed}\n",
                source_config(source)
            );
            let prov = Provenance::new(None, config);
            let labels: Vec<Label> = (*first..end).map(|i| Label(LABEL_BASE + i as u32)).collect();
            let corpus = render_corpus(
                &classes[*first..end],
                &labels,
                *per_class,
                &RenderStyle::default(),
                *seed,
            );
            let images: Vec<StoredImage> = corpus
                .into_iter()
                .map(|(id, label, image)| StoredImage {
                    id,
                    label: Some(label),
                    image,
                })
                .collect();
            write_store(output, &images).map_err(|e| match e {
                Error::Io(io) => io_error(output, io),
                other => other,
            })?;
            // Rewrite the label file with the provenance line.
            let rows = read_text(&output.join(LABELS_FILE))?;
            prov.write(&output.join(LABELS_FILE), &rows)?;
            info!("{} images in {}", images.len(), output.display());
            Ok(())
        }
        SynthCmd::Pages {
            source,
            count,
            classes: limit,
            seed,
            output,
        } => {
            let mut config = format!("{}count={count}\nseed={seed}\n", source_config(source));
            if let Some(n) = limit {
                let _ = writeln!(config, "classes={n}");
            }
            let prov = Provenance::new(None, config);
            let classes = source_classes(source);
            let label_of: HashMap<&GlyphClass, Label> = classes
                .iter()
                .enumerate()
                .map(|(i, c)| (c, Label(LABEL_BASE + i as u32)))
                .collect();
            let pool: Vec<GlyphClass> = classes
                .iter()
                .filter(|c| fits_page(c))
                .take(limit.unwrap_or(usize::MAX))
                .cloned()
                .collect();
            if pool.is_empty() {
                return Err(Error::InvalidParameter("no dictionary class fits a page".into()));
            }
            create_dir(output)?;
            let spec = PageSpec::default();
            let mut truth = String::new();
            let mut gt = String::new();
            for i in 0..*count {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(i as u64);
                let skew = PAGE_SKEWS[i % PAGE_SKEWS.len()];
                let page = generate_page_from(&spec, skew, &pool, &mut rng);
                let id = format!("page_{i:03}");
                write_image(&output.join(format!("{id}.pgm")), &page.image)?;
                for (k, (b, c)) in page.boxes.iter().zip(&page.classes).enumerate() {
                    let _ = writeln!(truth, "{id}_{k:03}\t{}", label_of[c]);
                    let _ = writeln!(gt, "{id}\t{k}\t{}\t{}\t{}\t{}", b.x, b.y, b.w, b.h);
                }
            }
            prov.write(&output.join("truth.tsv"), &truth)?;
            prov.write(&output.join("gt_boxes.tsv"), &gt)?;
            info!("{count} pages in {}", output.display());
            Ok(())
        }
    }
}
