use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "ngfilter", version, about = "Detect and remove rain and cicada-chorus noise in environmental audio")]
pub struct Cli {
    /// Worker threads; 0 uses every core. Output does not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled synthetic corpus of ten-second WAV scenes.
    Synth(SynthArgs),
    /// Convert recordings to 22.05 kHz mono and cut them into segments.
    Segment(SegmentArgs),
    /// Compute a feature set for every segment of every WAV file.
    Featurize(FeaturizeArgs),
    /// Train a classifier on a labelled feature CSV.
    Train(TrainArgs),
    /// Cross-validate a classifier on a labelled feature CSV.
    #[command(alias = "evaluate")]
    Cv(CvArgs),
    /// Drop segments whose rain probability reaches the threshold.
    Gate(GateArgs),
    /// Band-stop cicada choruses in segments the detector flags.
    Filter(FilterArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of scenes.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of rain-positive scenes.
    #[arg(long, default_value_t = 0.5)]
    pub rain: f64,
    /// Fraction of scenes with a cicada chorus.
    #[arg(long, default_value_t = 0.5)]
    pub cicada: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// WAV file or directory of WAV files.
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Rain,
    Cicada,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Arff,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct PipelineArgs {
    /// Apply a 1 kHz high-pass filter before computing features.
    #[arg(long)]
    pub highpass: bool,
    /// Apply MMSE-STSA noise reduction before computing features.
    #[arg(long)]
    pub mmse: bool,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// WAV file or directory of WAV files.
    pub input: PathBuf,
    /// Indices, FreqIndices, MFCCs, MFCCsNoDelta, All, AllNoDelta or CFSSubset.
    #[arg(long, default_value = "All")]
    pub set: String,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Feature names kept by selection, one per line (needed for CFSSubset).
    #[arg(long)]
    pub selection: Option<PathBuf>,
    /// Corpus manifest providing labels, matched on file name.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Which manifest label to use.
    #[arg(long, value_enum, default_value = "rain", requires = "labels")]
    pub task: Task,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct ClassifierArgs {
    /// naive-bayes, knn, tree or random-forest.
    #[arg(long, default_value = "random-forest")]
    pub classifier: String,
    /// Neighbours for knn; must be odd.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labelled feature CSV.
    pub features: PathBuf,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Feature set the CSV was computed with; CFSSubset runs selection first.
    #[arg(long, default_value = "All")]
    pub set: String,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    /// Labelled feature CSV.
    pub features: PathBuf,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// CFSSubset reruns selection inside every training fold.
    #[arg(long, default_value = "All")]
    pub set: String,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Evaluate k = 1, 3, ..., 25 and report the best by AUC.
    #[arg(long)]
    pub sweep_k: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    /// WAV file or directory of WAV files.
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// WAV file or directory of WAV files.
    pub input: PathBuf,
    /// Cicada detector; not needed with --band.
    #[arg(long, required_unless_present = "band")]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Stop this band (LOW:HIGH in Hz) in every segment instead of detecting one.
    #[arg(long, value_parser = parse_band)]
    pub band: Option<(f64, f64)>,
    /// Apply MMSE-STSA after the band-stop.
    #[arg(long)]
    pub mmse: bool,
    /// Apply the 1 kHz high-pass last.
    #[arg(long)]
    pub highpass: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_band(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LOW:HIGH")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad low edge '{lo}'"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad high edge '{hi}'"))?;
    if !(lo > 0.0 && lo < hi) {
        return Err(format!("band {lo}:{hi} must satisfy 0 < LOW < HIGH"));
    }
    Ok((lo, hi))
}
