use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use embalign::eval::{
    frequency_bin_scores, gold_set, tag_bin_scores, tag_scores_for, FrequencyBins, FrequencyTable,
    GoldSet, PairTags, PairWords,
};
use embalign::io::{pharaoh, report, text, EmbeddingCorpus, Encoding, Level};
use embalign::runner::{
    score_run, sweep, sweep_layers, LayerInput, RunOptions, SweepAxis, WordAlignments,
};
use embalign::{
    corpus_score, grow_diag_final_and, intersect, run_corpus, AlignmentSet, ExtractionConfig,
    Method,
};

#[derive(Parser)]
#[command(
    name = "embalign",
    version,
    about = "Word alignment from embedding similarity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align two embedding files and write Pharaoh alignments.
    Align(AlignArgs),
    /// Score a Pharaoh alignment file against gold.
    Score(ScoreArgs),
    /// Combine forward and backward alignments.
    Symmetrize(SymmetrizeArgs),
    /// Score one configuration per axis value or per layer.
    Sweep(SweepArgs),
    /// Scores per frequency bin or per tag.
    Bins(BinsArgs),
    /// Re-encode an embedding file.
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long, default_value = "argmax")]
    method: Method,
    #[arg(long, default_value_t = 2)]
    n_max: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    /// Apply the distortion prior.
    #[arg(long)]
    dist: bool,
    /// Apply the corpus-level null filter.
    #[arg(long)]
    null: bool,
    #[arg(long, default_value_t = 95.0)]
    null_percentile: f64,
    /// Extraction level; output is always word level.
    #[arg(long, default_value = "word")]
    level: Level,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Arithmetic precision for similarities.
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
}

impl ExtractArgs {
    fn options(&self) -> Result<RunOptions> {
        let cfg = ExtractionConfig {
            method: self.method,
            n_max: self.n_max,
            alpha: self.alpha,
            kappa: self.kappa,
            dist_enabled: self.dist,
            null_enabled: self.null,
            null_percentile: self.null_percentile,
        };
        cfg.validate()?;
        Ok(RunOptions {
            cfg,
            level: self.level,
            workers: self.workers,
        })
    }
}

#[derive(Args)]
struct GoldArgs {
    /// Gold file, one line per pair; `i-j` sure, `ipj` possible.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    gold_base: usize,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[command(flatten)]
    extract: ExtractArgs,
    #[command(flatten)]
    gold: GoldArgs,
    /// Alignment output; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Score CSV output when gold is given; stderr if omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = 0)]
    pred_base: usize,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value_t = 1)]
    gold_base: usize,
    /// Row label in the CSV.
    #[arg(long, default_value = "pred")]
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymMode {
    Intersect,
    Union,
    Gdfa,
}

#[derive(Args)]
struct SymmetrizeArgs {
    #[arg(long)]
    fwd: PathBuf,
    #[arg(long)]
    bwd: PathBuf,
    #[arg(long, value_enum, default_value_t = SymMode::Gdfa)]
    mode: SymMode,
    /// Index base of both inputs.
    #[arg(long, default_value_t = 0)]
    base: usize,
    /// The backward file lists target-source pairs.
    #[arg(long)]
    transpose_bwd: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, required_unless_present = "layer")]
    src: Option<PathBuf>,
    #[arg(long, required_unless_present = "layer")]
    tgt: Option<PathBuf>,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value_t = 1)]
    gold_base: usize,
    #[command(flatten)]
    extract: ExtractArgs,
    /// method, n-max, alpha, kappa, null-percentile, dist, null or level.
    #[arg(long, requires = "values", conflicts_with = "layer")]
    axis: Option<SweepAxis>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<String>,
    /// `label:src:tgt`, repeatable; one row per layer.
    #[arg(long)]
    layer: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinMode {
    Freq,
    Tag,
}

#[derive(Args)]
struct BinsArgs {
    #[arg(long, value_enum)]
    mode: BinMode,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = 0)]
    pred_base: usize,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value_t = 1)]
    gold_base: usize,
    /// Tokenized source text, one sentence per line.
    #[arg(long)]
    src_text: Option<PathBuf>,
    #[arg(long)]
    tgt_text: Option<PathBuf>,
    /// `word count` lines; counted from the text files if omitted.
    #[arg(long)]
    freq_src: Option<PathBuf>,
    #[arg(long)]
    freq_tgt: Option<PathBuf>,
    /// Comma-separated, strictly increasing bin boundaries.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,1,5,10,50,100,500,1000"
    )]
    bounds: Vec<u64>,
    /// Tag sequences, one line per sentence.
    #[arg(long)]
    src_tags: Option<PathBuf>,
    #[arg(long)]
    tgt_tags: Option<PathBuf>,
    /// Restrict to these tags, in this order.
    #[arg(long, value_delimiter = ',')]
    tags: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Binary,
    Text,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = EncodingArg::Binary)]
    encoding: EncodingArg,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Align(a) => align(a),
        Command::Score(a) => score(a),
        Command::Symmetrize(a) => symmetrize(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Bins(a) => bins(a),
        Command::Convert(a) => convert(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<EmbeddingCorpus> {
    EmbeddingCorpus::load(path).with_context(|| format!("reading {}", path.display()))
}

fn read_gold(path: &Path, base: usize) -> Result<Vec<embalign::GoldAlignment>> {
    pharaoh::read_gold_path(path, base).with_context(|| format!("reading {}", path.display()))
}

fn read_pred(path: &Path, base: usize) -> Result<Vec<AlignmentSet>> {
    pharaoh::read_alignments_path(path, base).with_context(|| format!("reading {}", path.display()))
}

fn run(
    src: &EmbeddingCorpus,
    tgt: &EmbeddingCorpus,
    opts: &RunOptions,
    precision: Precision,
) -> Result<WordAlignments> {
    Ok(match precision {
        Precision::F32 => run_corpus::<f32>(src, tgt, opts)?,
        Precision::F64 => run_corpus::<f64>(src, tgt, opts)?,
    })
}

fn align(a: AlignArgs) -> Result<()> {
    let opts = a.extract.options()?;
    let golds = a
        .gold
        .gold
        .as_deref()
        .map(|p| read_gold(p, a.gold.gold_base))
        .transpose()?;
    let (src, tgt) = (load(&a.src)?, load(&a.tgt)?);
    let aligned = run(&src, &tgt, &opts, a.extract.precision)?;
    log::info!("aligned {} pairs", aligned.len());

    let mut out = output(a.out.as_deref())?;
    pharaoh::write_alignments(&mut out, aligned.iter().map(|(_, s)| s))?;
    out.flush()?;

    if let Some(golds) = golds {
        let rep = score_run(&aligned, &golds)?;
        let rows = [(opts.cfg.method.to_string(), rep)];
        match &a.report {
            Some(p) => report::write_scores(output(Some(p))?, &rows)?,
            None => report::write_scores(io::stderr().lock(), &rows)?,
        }
    }
    Ok(())
}

/// Pairs line `k` of a prediction file with line `k` of a gold file.
fn keyed(
    preds: Vec<AlignmentSet>,
    golds: Vec<embalign::GoldAlignment>,
) -> Result<(WordAlignments, GoldSet)> {
    ensure!(
        preds.len() == golds.len(),
        "{} predicted lines but {} gold lines",
        preds.len(),
        golds.len()
    );
    let ids: Vec<String> = (0..preds.len()).map(|k| k.to_string()).collect();
    let golds = gold_set(ids.iter().cloned(), golds);
    Ok((ids.into_iter().zip(preds).collect(), golds))
}

fn score(a: ScoreArgs) -> Result<()> {
    let (preds, golds) = keyed(
        read_pred(&a.pred, a.pred_base)?,
        read_gold(&a.gold, a.gold_base)?,
    )?;
    let rep = corpus_score(&preds, &golds)?;
    let mut out = output(a.out.as_deref())?;
    report::write_scores(&mut out, &[(a.name, rep)])?;
    Ok(())
}

fn symmetrize(a: SymmetrizeArgs) -> Result<()> {
    let fwd = read_pred(&a.fwd, a.base)?;
    let bwd = read_pred(&a.bwd, a.base)?;
    ensure!(
        fwd.len() == bwd.len(),
        "{} forward lines but {} backward lines",
        fwd.len(),
        bwd.len()
    );
    let combined = fwd
        .into_iter()
        .zip(bwd)
        .map(|(f, b)| {
            let b = if a.transpose_bwd { b.transpose() } else { b };
            let (le, lf) = (f.src_len().max(b.src_len()), f.tgt_len().max(b.tgt_len()));
            let (f, b) = (f.resized(le, lf)?, b.resized(le, lf)?);
            Ok(match a.mode {
                SymMode::Intersect => intersect(&f, &b)?,
                SymMode::Union => f.union(&b)?,
                SymMode::Gdfa => grow_diag_final_and(&f, &b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = output(a.out.as_deref())?;
    pharaoh::write_alignments(&mut out, &combined)?;
    out.flush()?;
    Ok(())
}

fn parse_layer(arg: &str) -> Result<(String, PathBuf, PathBuf)> {
    let mut parts = arg.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(label), Some(src), Some(tgt)) if !label.is_empty() => {
            Ok((label.to_string(), PathBuf::from(src), PathBuf::from(tgt)))
        }
        _ => bail!("layer `{arg}` is not label:src:tgt"),
    }
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let base = a.extract.options()?;
    let golds = read_gold(&a.gold, a.gold_base)?;
    let rows = if !a.layer.is_empty() {
        let layers = a
            .layer
            .iter()
            .map(|arg| {
                let (label, src, tgt) = parse_layer(arg)?;
                Ok(LayerInput {
                    label,
                    src: load(&src)?,
                    tgt: load(&tgt)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match a.extract.precision {
            Precision::F32 => sweep_layers::<f32>(&layers, &golds, &base)?,
            Precision::F64 => sweep_layers::<f64>(&layers, &golds, &base)?,
        }
    } else {
        let Some(axis) = a.axis else {
            bail!("give --axis with --values, or --layer");
        };
        let (src, tgt) = match (&a.src, &a.tgt) {
            (Some(s), Some(t)) => (load(s)?, load(t)?),
            _ => bail!("--src and --tgt are required for an axis sweep"),
        };
        match a.extract.precision {
            Precision::F32 => sweep::<f32>(&src, &tgt, &golds, &base, axis, &a.values)?,
            Precision::F64 => sweep::<f64>(&src, &tgt, &golds, &base, axis, &a.values)?,
        }
    };
    let mut out = output(a.out.as_deref())?;
    report::write_sweep(&mut out, &rows)?;
    Ok(())
}

fn read_lines(path: &Option<PathBuf>, flag: &str) -> Result<Vec<Vec<String>>> {
    let Some(p) = path else {
        bail!("{flag} is required in this mode");
    };
    text::read_tokenized_path(p).with_context(|| format!("reading {}", p.display()))
}

fn count_words(lines: &[Vec<String>]) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for w in lines.iter().flatten() {
        *counts.entry(w.clone()).or_insert(0) += 1;
    }
    counts
}

fn frequencies(path: &Option<PathBuf>, fallback: &[Vec<String>]) -> Result<HashMap<String, u64>> {
    match path {
        Some(p) => {
            text::read_frequencies_path(p).with_context(|| format!("reading {}", p.display()))
        }
        None => Ok(count_words(fallback)),
    }
}

fn bins(a: BinsArgs) -> Result<()> {
    let (preds, golds) = keyed(
        read_pred(&a.pred, a.pred_base)?,
        read_gold(&a.gold, a.gold_base)?,
    )?;
    let check_len = |what: &str, n: usize| {
        ensure!(
            n == preds.len(),
            "{what} has {n} lines, expected {}",
            preds.len()
        );
        Ok(())
    };
    let rows = match a.mode {
        BinMode::Freq => {
            let src = read_lines(&a.src_text, "--src-text")?;
            let tgt = read_lines(&a.tgt_text, "--tgt-text")?;
            check_len("--src-text", src.len())?;
            check_len("--tgt-text", tgt.len())?;
            let freqs = FrequencyTable {
                src: frequencies(&a.freq_src, &src)?,
                tgt: frequencies(&a.freq_tgt, &tgt)?,
            };
            let words: Vec<PairWords<'_>> = preds
                .iter()
                .zip(src.iter().zip(&tgt))
                .map(|((id, _), (s, t))| PairWords {
                    pair_id: id,
                    src: s,
                    tgt: t,
                })
                .collect();
            let bins = FrequencyBins::new(a.bounds)?;
            frequency_bin_scores(&preds, &golds, &words, &freqs, &bins)?
        }
        BinMode::Tag => {
            let src = read_lines(&a.src_tags, "--src-tags")?;
            let tgt = read_lines(&a.tgt_tags, "--tgt-tags")?;
            check_len("--src-tags", src.len())?;
            check_len("--tgt-tags", tgt.len())?;
            // Predicted files only know the largest aligned index; widen to
            // the tagged sentence lengths.
            let preds: WordAlignments = preds
                .into_iter()
                .zip(src.iter().zip(&tgt))
                .map(|((id, p), (s, t))| Ok((id, p.resized(s.len(), t.len())?)))
                .collect::<Result<_>>()?;
            let tags: Vec<PairTags<'_>> = preds
                .iter()
                .zip(src.iter().zip(&tgt))
                .map(|((id, _), (s, t))| PairTags {
                    pair_id: id,
                    src: s,
                    tgt: t,
                })
                .collect();
            if a.tags.is_empty() {
                tag_bin_scores(&preds, &golds, &tags)?
            } else {
                let wanted: Vec<&str> = a.tags.iter().map(String::as_str).collect();
                tag_scores_for(&preds, &golds, &tags, &wanted)?
            }
        }
    };
    let mut out = output(a.out.as_deref())?;
    report::write_bins(&mut out, &rows)?;
    Ok(())
}

fn convert(a: ConvertArgs) -> Result<()> {
    let corpus = load(&a.input)?;
    let encoding = match a.encoding {
        EncodingArg::Binary => Encoding::Binary,
        EncodingArg::Text => Encoding::Text,
    };
    corpus
        .save(&a.output, encoding)
        .with_context(|| format!("writing {}", a.output.display()))?;
    log::info!("wrote {} sentences", corpus.sentences.len());
    Ok(())
}
