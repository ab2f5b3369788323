use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Attribute-code character recognition: lexicons, page segmentation,
/// attribute classification, Hamming matching and evaluation.
#[derive(Debug, Parser)]
#[command(name = "hanzi-attr", version)]
pub struct Cli {
    /// Worker threads (0 = one per core). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SchemaArg {
    /// Schema manifest; the built-in 23-set schema when absent.
    #[arg(long, env = "HANZI_ATTR_SCHEMA")]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lexicon operations.
    #[command(subcommand)]
    Lexicon(LexiconCmd),
    /// Segment a page into text lines and character boxes.
    Segment(SegmentArgs),
    /// Train the attribute classifier on a sample store.
    Train(TrainArgs),
    /// Predict attribute distributions for a directory of glyph images.
    Predict(PredictArgs),
    /// Match predictions against a lexicon.
    Recognize(RecognizeArgs),
    /// Attribute and character accuracy over the canonical group subsets.
    Evaluate(EvaluateArgs),
    /// Word-spotting mAP over feature vectors.
    Spot(SpotArgs),
    /// Frequency split with optional k-shot augmentation.
    Split(SplitArgs),
    /// Synthetic dictionaries, glyph samples and pages.
    #[command(subcommand)]
    Synth(SynthCmd),
}

#[derive(Debug, Subcommand)]
pub enum LexiconCmd {
    /// Encode a dictionary into a lexicon file.
    Build {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long)]
        dict: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Page image (PGM).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Segmentation config (`key=value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Box TSV output.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Line report output.
    #[arg(long)]
    pub lines: Option<PathBuf>,
    /// Write one square glyph crop per box into this directory.
    #[arg(long)]
    pub crops: Option<PathBuf>,
    /// Fraction of the crop side covered by the box.
    #[arg(long, default_value_t = 0.86)]
    pub crop_fill: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Sample store directory.
    #[arg(long)]
    pub samples: PathBuf,
    /// Label file; `<samples>/labels.tsv` by default.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub schema: SchemaArg,
    /// Dictionary supplying the per-set targets of every label.
    #[arg(long)]
    pub dict: PathBuf,
    /// Training config (`key=value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Additional labelled sample store.
    #[arg(long)]
    pub augment_corpus: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-iteration batch loss output.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Soft,
    Argmax,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Directory of 64×64 PGM images.
    #[arg(long)]
    pub images: PathBuf,
    #[command(flatten)]
    pub schema: SchemaArg,
    #[arg(long, value_enum, default_value_t = Form::Soft)]
    pub form: Form,
    /// Also write the feature vector of every image (input to `spot`).
    #[arg(long)]
    pub features_out: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RecognizeArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub preds: PathBuf,
    #[command(flatten)]
    pub schema: SchemaArg,
    /// Attribute groups to match on, e.g. `cj,zm`; all groups by default.
    #[arg(long)]
    pub groups: Option<String>,
    /// Candidates per image.
    #[arg(long, default_value_t = 1)]
    pub top: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub preds: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Ground-truth labels (`image_id<TAB>codepoint`).
    #[arg(long)]
    pub truth: PathBuf,
    #[command(flatten)]
    pub schema: SchemaArg,
    /// Split file from `split`; restricts evaluation to `--partition`.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, default_value = "lofreq", requires = "split")]
    pub partition: String,
    /// Feature vectors for the word-spotting mAP row.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpotArgs {
    /// Feature file (`image_id<TAB>v1,v2,...`).
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub labels: PathBuf,
    /// Labels with more images than this are high-frequency.
    #[arg(long, default_value_t = 20)]
    pub threshold: usize,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    /// Low-frequency images per label moved into training.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassSource {
    /// Number of classes in the generated dictionary.
    #[arg(long, default_value_t = hanzi_attr::synth::BUNDLED_SIZE)]
    pub dict_size: usize,
    /// Seed of the generated dictionary.
    #[arg(long, default_value_t = hanzi_attr::synth::BUNDLED_SEED)]
    pub dict_seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum SynthCmd {
    /// Write a synthetic dictionary (the bundled one by default).
    Dictionary {
        #[command(flatten)]
        source: ClassSource,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render glyph samples of a range of dictionary classes into a sample store.
    Samples {
        #[command(flatten)]
        source: ClassSource,
        /// Index of the first class.
        #[arg(long, default_value_t = 0)]
        first: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render ruled pages with ground-truth boxes and labels.
    Pages {
        #[command(flatten)]
        source: ClassSource,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Draw glyphs from the first N page-compatible classes only.
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}
