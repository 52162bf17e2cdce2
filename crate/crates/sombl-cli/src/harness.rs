//! Experiment harness: trains a system on one corpus, scores it on
//! another, and sweeps whole grids of configurations into report tables
//! and machine-readable records.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use sombl::classify::{self, CostModel};
use sombl::corpus::{chunk_sentences, tag_set, tag_windows};
use sombl::encoding::{build_lexical, build_orthogonal, LexicalParams, DEFAULT_LEXICAL_DIM};
use sombl::eval::score;
use sombl::lsom;
use sombl::mbl::classify_exact;
use sombl::som::{self, data_bounds, default_schedule, encode_base, Schedule, SomMap};
use sombl::{ChunkScore, Sentence, WeightScheme, WindowSpec};

use crate::config::SweepConfig;
use crate::formats::{self, Model};

/// Which classifier runs at query time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// Exact nearest neighbour over the full base, weighted overlap.
    Mbl,
    /// Map-edited search: nearest map units, then their item lists.
    Sommbl,
    /// Label-constrained map editing: one winning unit per class.
    Lsommbl,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::Mbl, SystemKind::Sommbl, SystemKind::Lsommbl];

    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Mbl => "mbl",
            SystemKind::Sommbl => "sommbl",
            SystemKind::Lsommbl => "lsommbl",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<SystemKind, String> {
        match s {
            "mbl" => Ok(SystemKind::Mbl),
            "sommbl" => Ok(SystemKind::Sommbl),
            "lsommbl" => Ok(SystemKind::Lsommbl),
            other => Err(format!("unknown system {other:?} (expected mbl, sommbl or lsommbl)")),
        }
    }
}

/// How windows become vectors for the map-edited systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncoderSpec {
    /// One basis axis per tag.
    Orthogonal,
    /// Axes from frequent context words, tag vectors from usage counts.
    Lexical,
    /// Vectors read from a tag-vector file.
    File(PathBuf),
}

impl EncoderSpec {
    /// The report's `features` column: what the classifier actually
    /// compares. The plain system always compares raw tags.
    pub fn features_label(&self, system: SystemKind) -> &'static str {
        if system == SystemKind::Mbl {
            return "tags";
        }
        match self {
            EncoderSpec::Orthogonal => "orth",
            EncoderSpec::Lexical => "lex",
            EncoderSpec::File(_) => "file",
        }
    }
}

impl FromStr for EncoderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<EncoderSpec, String> {
        match s {
            "orth" => Ok(EncoderSpec::Orthogonal),
            "lex" => Ok(EncoderSpec::Lexical),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(EncoderSpec::File(PathBuf::from(path))),
                _ => Err(format!(
                    "unknown encoder {other:?} (expected orth, lex or file:<path>)"
                )),
            },
        }
    }
}

/// One experiment: a system, its data shape and its training knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub system: SystemKind,
    pub window: WindowSpec,
    pub encoder: EncoderSpec,
    pub weights: WeightScheme,
    /// Map size; `None` means the square root of the instance count,
    /// rounded up.
    pub map_size: Option<usize>,
    pub winners: usize,
    pub seed: u64,
    /// `None` means the size-matched default schedule.
    pub schedule: Option<Schedule>,
}

/// Smallest `n` with `n * n >= value`.
pub fn ceil_sqrt(value: usize) -> usize {
    let mut r = (value as f64).sqrt() as usize;
    while r * r < value {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= value {
        r -= 1;
    }
    r
}

/// Builds the encoder an experiment asks for, from the training corpus
/// (or the named file).
pub fn build_encoder(train: &[Sentence], spec: &EncoderSpec) -> Result<sombl::Encoder> {
    match spec {
        EncoderSpec::Orthogonal => {
            let tags = tag_set(train);
            Ok(build_orthogonal(tags.iter())?)
        }
        EncoderSpec::Lexical => Ok(build_lexical(
            train,
            DEFAULT_LEXICAL_DIM,
            LexicalParams::default(),
        )?),
        EncoderSpec::File(path) => formats::read_tag_vectors(path),
    }
}

/// Trains one system on a corpus and returns the resulting model.
pub fn train_system(train: &[Sentence], spec: &ExperimentSpec) -> Result<Model> {
    let chunked = chunk_sentences(train)?;
    let base = sombl::MemoryBase::build(&chunked, spec.window, spec.weights)?;
    if spec.system == SystemKind::Mbl {
        return Ok(Model { system: spec.system, base, encoder: None, map: None });
    }
    if base.is_empty() {
        bail!("cannot train a map over an empty memory base");
    }
    let enc = build_encoder(train, &spec.encoder)?;
    let units = spec.map_size.unwrap_or_else(|| ceil_sqrt(base.len()));
    if units == 0 {
        bail!("map size must be at least 1");
    }
    let vectors = encode_base(&base, &enc)?;
    let bounds = data_bounds(&vectors);
    let mut map = SomMap::new(units, &bounds, spec.seed);
    let schedule = spec.schedule.unwrap_or_else(|| default_schedule(map.len()));
    let map = match spec.system {
        SystemKind::Mbl => unreachable!(),
        SystemKind::Sommbl => {
            som::train(&mut map, &vectors, &schedule, spec.seed);
            som::assign_and_prune(map, &base, &enc)?
        }
        SystemKind::Lsommbl => {
            let items = lsom::labelled_items(&base, &enc)?;
            lsom::train(&mut map, &items, &schedule, spec.seed)?;
            lsom::assign_and_prune(map, &base, &enc)?
        }
    };
    Ok(Model { system: spec.system, base, encoder: Some(enc), map: Some(map) })
}

/// Scores plus the comparison counts actually measured over the queries.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub score: ChunkScore,
    /// Cost-formula inputs, for the mapped systems.
    pub cost: Option<CostModel>,
    pub queries: usize,
    /// Largest per-query comparison count seen (units plus items).
    pub measured_max: usize,
    pub measured_mean: f64,
}

/// Runs every token of the test corpus through the model and scores the
/// predictions.
pub fn evaluate(model: &Model, test: &[Sentence], winners: usize) -> Result<EvalOutcome> {
    let chunked = chunk_sentences(test)?;
    let base = &model.base;
    let spec = base.spec();
    let mut gold = Vec::with_capacity(chunked.len());
    let mut pred = Vec::with_capacity(chunked.len());
    let mut queries = 0usize;
    let mut measured_max = 0usize;
    let mut total_comparisons = 0u64;
    for cs in &chunked {
        let windows = tag_windows(&cs.tags, spec);
        let mut p = Vec::with_capacity(windows.len());
        for w in &windows {
            let (class, comparisons) = match model.system {
                SystemKind::Mbl => (classify_exact(base, w)?, base.len()),
                SystemKind::Sommbl => {
                    let map = model.map.as_ref().context("model has no map")?;
                    let enc = model.encoder.as_ref().context("model has no encoder")?;
                    let (c, t) = classify::sommbl_classify(map, base, enc, w, winners)?;
                    (c, t.total())
                }
                SystemKind::Lsommbl => {
                    let map = model.map.as_ref().context("model has no map")?;
                    let enc = model.encoder.as_ref().context("model has no encoder")?;
                    let (c, t) = classify::lsommbl_classify(map, base, enc, w)?;
                    (c, t.total())
                }
            };
            p.push(class);
            queries += 1;
            measured_max = measured_max.max(comparisons);
            total_comparisons += comparisons as u64;
        }
        gold.push(cs.classes.clone());
        pred.push(p);
    }
    let score = score(&gold, &pred)?;
    let cost = match (&model.map, model.system) {
        (Some(map), SystemKind::Sommbl | SystemKind::Lsommbl) => {
            Some(CostModel::of(map, base))
        }
        _ => None,
    };
    let measured_mean = if queries == 0 {
        0.0
    } else {
        total_comparisons as f64 / queries as f64
    };
    Ok(EvalOutcome { score, cost, queries, measured_max, measured_mean })
}

/// The numbers behind one report row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    pub fscore: f64,
    pub tag_accuracy: f64,
    /// Worst-case comparisons by the cost formula: the full base for the
    /// plain system, `C(N + X)` for the mapped ones.
    pub max_comparisons: u64,
    pub percent_of_items: f64,
    pub items: usize,
    pub units: Option<usize>,
    pub max_items: Option<usize>,
    pub cost_avg: Option<f64>,
    pub queries: usize,
    pub measured_max: usize,
    pub measured_mean: f64,
}

/// One sweep row: its coordinates plus either numbers or an error.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub system: String,
    pub features: String,
    pub window: String,
    pub seed: u64,
    pub outcome: Result<RowData, String>,
}

/// A trained-and-scored experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub model: Model,
    pub eval: EvalOutcome,
    pub data: RowData,
}

/// Trains and scores one experiment end to end.
pub fn run_experiment(
    train: &[Sentence],
    test: &[Sentence],
    spec: &ExperimentSpec,
) -> Result<ExperimentOutcome> {
    let model = train_system(train, spec)?;
    let eval = evaluate(&model, test, spec.winners)?;
    let items = model.base.len();
    let (max_comparisons, percent, units, max_items, cost_avg) = match &eval.cost {
        Some(cost) => (
            cost.max() as u64,
            cost.max_percent_of_items(),
            Some(cost.units),
            Some(cost.max_items_per_unit),
            Some(cost.avg()),
        ),
        None => {
            let pct = if items == 0 { 0.0 } else { 100.0 };
            (items as u64, pct, None, None, None)
        }
    };
    let data = RowData {
        fscore: eval.score.fscore,
        tag_accuracy: eval.score.tag_accuracy,
        max_comparisons,
        percent_of_items: percent,
        items,
        units,
        max_items,
        cost_avg,
        queries: eval.queries,
        measured_max: eval.measured_max,
        measured_mean: eval.measured_mean,
    };
    Ok(ExperimentOutcome { model, eval, data })
}

/// Runs a whole sweep. Rows come out windows-outermost, then systems,
/// then one row per repeat seed (`seed`, `seed + 1`, ...). A failing row
/// is recorded and the sweep keeps going. When `models_dir` is set, each
/// successful row's model is written there.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let train = formats::read_corpus(&cfg.train)?;
    let test = formats::read_corpus(&cfg.test)?;
    if let Some(dir) = &cfg.models_dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating models dir {}", dir.display()))?;
    }
    let mut rows = Vec::new();
    for window in &cfg.windows {
        for &system in &cfg.systems {
            for rep in 0..cfg.repeats {
                let seed = cfg.seed + rep;
                let spec = ExperimentSpec {
                    system,
                    window: *window,
                    encoder: cfg.encoder.clone(),
                    weights: cfg.weights,
                    map_size: cfg.map_size,
                    winners: cfg.winners,
                    seed,
                    schedule: cfg.schedule,
                };
                let outcome = match run_experiment(&train, &test, &spec) {
                    Ok(out) => {
                        if let Some(dir) = &cfg.models_dir {
                            let name = format!("{}-{}-s{}.model", system.as_str(), window, seed);
                            formats::write_model(&dir.join(name), &out.model)?;
                        }
                        Ok(out.data)
                    }
                    Err(e) => Err(format!("{e:#}")),
                };
                rows.push(SweepRow {
                    system: system.as_str().to_string(),
                    features: cfg.encoder.features_label(system).to_string(),
                    window: window.to_string(),
                    seed,
                    outcome,
                });
            }
        }
    }
    Ok(rows)
}

/// The human-readable report: a fixed-width table, one line per row.
pub fn format_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:<9} {:<7} {:>7} {:>8}  {:>16}",
        "system", "features", "window", "fscore", "tag acc", "max comparisons"
    );
    for row in rows {
        match &row.outcome {
            Ok(data) => {
                let max = format!("{} ({:.1}%)", data.max_comparisons, data.percent_of_items);
                let _ = writeln!(
                    out,
                    "{:<8} {:<9} {:<7} {:>7.2} {:>8.2}  {:>16}",
                    row.system, row.features, row.window, data.fscore, data.tag_accuracy, max
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "{:<8} {:<9} {:<7} failed: {}",
                    row.system, row.features, row.window, e
                );
            }
        }
    }
    out
}

/// The machine-readable report: one `row` record per line, named fields,
/// errors recorded in place.
pub fn format_records(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let _ = write!(
            out,
            "row system={} features={} window={} seed={}",
            row.system, row.features, row.window, row.seed
        );
        match &row.outcome {
            Ok(d) => {
                let _ = write!(
                    out,
                    " status=ok fscore={:.2} tag_accuracy={:.2} items={} max_comparisons={} \
                     percent_of_items={:.1} queries={} measured_max={} measured_mean={:.2}",
                    d.fscore,
                    d.tag_accuracy,
                    d.items,
                    d.max_comparisons,
                    d.percent_of_items,
                    d.queries,
                    d.measured_max,
                    d.measured_mean
                );
                if let (Some(units), Some(max_items), Some(avg)) =
                    (d.units, d.max_items, d.cost_avg)
                {
                    let _ = write!(
                        out,
                        " units={units} max_items={max_items} cost_avg={avg:.2}"
                    );
                }
                out.push('\n');
            }
            Err(e) => {
                let _ = writeln!(out, " status=failed error={e}");
            }
        }
    }
    out
}

/// A short description of a model, for inspection.
pub fn describe_model(model: &Model) -> String {
    let mut out = String::new();
    let base = &model.base;
    let _ = writeln!(out, "system     {}", model.system.as_str());
    let _ = writeln!(out, "window     {}", base.spec());
    let _ = writeln!(out, "weights    {}", base.scheme().as_str());
    match &model.encoder {
        Some(enc) => {
            let _ = writeln!(
                out,
                "features   {} ({} tags, dim {})",
                enc.kind().as_str(),
                enc.len(),
                enc.dim()
            );
        }
        None => {
            let _ = writeln!(out, "features   tags");
        }
    }
    let _ = writeln!(out, "instances  {} ({} occurrences)", base.len(), base.occurrences());
    match &model.map {
        Some(map) => {
            let (rows, cols) = map.shape();
            let _ = writeln!(out, "map        {rows}x{cols}, {} occupied units", map.len());
            let ([b, i, o], unlabelled) = map.label_census();
            let _ = writeln!(out, "labels     B:{b} I:{i} O:{o} unlabelled:{unlabelled}");
            let cost = CostModel::of(map, base);
            let _ = writeln!(out, "largest    {} items in one unit", cost.max_items_per_unit);
            let _ = writeln!(
                out,
                "cost       max {} ({:.1}% of items), avg {:.2}, min {:.2}",
                cost.max(),
                cost.max_percent_of_items(),
                cost.avg(),
                cost.min()
            );
        }
        None => {
            let _ = writeln!(out, "map        none (every query scans all {} items)", base.len());
        }
    }
    out
}

/// A short description of a corpus slice under one window shape.
pub fn describe_corpus(sentences: &[Sentence], window: WindowSpec) -> Result<String> {
    use sombl::ChunkClass;

    let chunked = chunk_sentences(sentences)?;
    let base = sombl::MemoryBase::build(&chunked, window, WeightScheme::Uniform)?;
    let tokens: usize = sentences.iter().map(|s| s.tokens.len()).sum();
    let tags = tag_set(sentences);
    let mut class_totals = [0u64; 3];
    for inst in base.instances() {
        for class in ChunkClass::ALL {
            class_totals[class.index()] += inst.freqs.get(class);
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "sentences  {}", sentences.len());
    let _ = writeln!(out, "tokens     {tokens}");
    let _ = writeln!(out, "tags       {}", tags.len());
    let _ = writeln!(out, "window     {window}");
    let _ = writeln!(out, "instances  {}", base.len());
    let _ = writeln!(
        out,
        "classes    B:{} I:{} O:{}",
        class_totals[0], class_totals[1], class_totals[2]
    );
    Ok(out)
}
