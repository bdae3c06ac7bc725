//! The `knowref` command line: one subcommand per pipeline stage, composed
//! through files.

pub mod args;
pub mod config;
pub mod io;
pub mod manifest;

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use knowref_core::annotation::{AggregationPolicy, AnnotationStore};
use knowref_core::evaluation::{
    consistency, corpus_stats, evaluate, fleiss_kappa, majority_accuracy, qc_report, AgreementMatrix,
    AnnotationLabel,
};
use knowref_core::ingest::{apply_initial_filter, split_document, CleanupConfig, SourceStyle};
use knowref_core::labeling::{label_instance, LabelOutcome};
use knowref_core::mining::{ConnectiveConfig, Miner, PersonTest};
use knowref_core::model::{format_sentence_line, parse_instance, parse_sentence_line};
use knowref_core::resolvers::{ExternalPredictions, NGramModel, ResolverHandle, DEFAULT_K, DEFAULT_ORDER};
use knowref_core::resources::person_nouns;
use knowref_core::switching::{augment_corpus, pair_corpus, SwitchedPair};
use knowref_core::tagging::{parse_tagged_corpus, PerceptronTagger, PreTaggedStream, TagSet, TaggerHandle, TrainConfig};
use knowref_core::text::tokenize;
use knowref_core::{AntecedentId, Error as CoreError, GenderLexicon, ProblemInstance, Stage, Verdict};

use crate::args::*;
use crate::config::{resolve_seed, FileConfig};
use crate::io::{atomic_write, read_instances, read_predictions, read_text, write_instances, write_lines};
use crate::manifest::{PipelineRunManifest, StageReport};

/// A problem with how the tool was invoked rather than with the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn as_usage(e: CoreError) -> UsageError {
    UsageError(e.to_string())
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Process exit status for an error: 2 for usage, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        2
    } else {
        1
    }
}

struct Ctx {
    seed: u64,
    jobs: Option<usize>,
    config: FileConfig,
    manifest: Option<PathBuf>,
}

impl Ctx {
    /// Maps `f` over `items` on the worker pool, keeping input order.
    fn par_map<T, U, F>(&self, items: &[T], f: F) -> Result<Vec<U>>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self.jobs {
            Some(0) => usage("--jobs must be at least 1"),
            Some(1) => Ok(items.iter().map(f).collect()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
                Ok(pool.install(|| items.par_iter().map(f).collect()))
            }
            None => Ok(items.par_iter().map(f).collect()),
        }
    }

    fn lexicon(&self, flag: &Option<PathBuf>) -> Result<Arc<GenderLexicon>> {
        match flag.as_ref().or(self.config.lexicon.as_ref()) {
            Some(path) => {
                let data = read_text(path)?;
                let lex = GenderLexicon::from_tsv(&data).with_context(|| format!("lexicon {}", path.display()))?;
                Ok(Arc::new(lex))
            }
            None => Ok(GenderLexicon::bundled()),
        }
    }

    /// Writes the manifest to `--manifest`, or next to `primary` if given.
    fn finish(&self, command: &str, primary: Option<&Path>, settings: serde_json::Value, stages: Vec<StageReport>) -> Result<()> {
        let path = match (&self.manifest, primary) {
            (Some(p), _) => p.clone(),
            (None, Some(out)) => {
                let mut name = out.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
            (None, None) => return Ok(()),
        };
        PipelineRunManifest::new(command, self.seed, settings, stages).write(&path)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.global.config {
        Some(p) => FileConfig::load(p).map_err(|e| UsageError(format!("{e:#}")))?,
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        seed: resolve_seed(cli.global.seed, &config).map_err(|e| UsageError(format!("{e:#}")))?,
        jobs: cli.global.jobs.or(config.jobs),
        manifest: cli.global.manifest.clone(),
        config,
    };
    match &cli.command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Mine(a) => mine(&ctx, a),
        Command::Label(a) => label(&ctx, a),
        Command::Augment(a) => augment(&ctx, a),
        Command::Pair(a) => pair(&ctx, a),
        Command::Resolve(a) => resolve(&ctx, a),
        Command::Evaluate(a) => evaluate_cmd(&ctx, a),
        Command::Consistency(a) => consistency_cmd(&ctx, a),
        Command::Stats(a) => stats(a),
        Command::Kappa(a) => kappa(a),
        Command::Qc(a) => qc(a),
        Command::Serve(a) => serve(&ctx, a),
        Command::Validate(a) => validate(a),
        Command::TrainTagger(a) => train_tagger(&ctx, a),
        Command::TrainLm(a) => train_lm(&ctx, a),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn report<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(path) = out {
        atomic_write(path, text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

fn cleanup_config(ctx: &Ctx, style: Option<Style>, min: Option<usize>, max: Option<usize>) -> Result<CleanupConfig> {
    let style = match style {
        Some(Style::Plain) => SourceStyle::Plain,
        Some(Style::WikiExtract) => SourceStyle::WikiExtract,
        Some(Style::Subtitles) => SourceStyle::Subtitles,
        None => match &ctx.config.style {
            Some(s) => s.parse().map_err(UsageError)?,
            None => SourceStyle::Plain,
        },
    };
    let mut cfg = CleanupConfig::for_style(style);
    if let Some(n) = min.or(ctx.config.min_tokens) {
        cfg.min_tokens = n;
    }
    if let Some(n) = max.or(ctx.config.max_tokens) {
        cfg.max_tokens = n;
    }
    cfg.validate().map_err(as_usage)?;
    Ok(cfg)
}

fn ingest(ctx: &Ctx, a: &IngestArgs) -> Result<()> {
    let cfg = cleanup_config(ctx, a.style, a.min_tokens, a.max_tokens)?;
    let files: Vec<PathBuf> = if a.input.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(&a.input)
            .with_context(|| format!("listing {}", a.input.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        v.sort();
        v
    } else {
        vec![a.input.clone()]
    };

    let mut sentences = Vec::new();
    for file in &files {
        let doc_id = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let raw = read_text(file)?;
        sentences.extend(split_document(&doc_id, &doc_id, &raw, &cfg));
    }
    let split_count = sentences.len();
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for mut r in sentences {
        if apply_initial_filter(&mut r, &cfg) {
            kept.push(format_sentence_line(&r));
        } else {
            rejected.push(Miner::rejection(&r).expect("rejected record has a reason"));
        }
    }
    write_lines(&a.out, &kept)?;
    if let Some(path) = &a.rejections {
        write_lines(path, rejected.iter().map(|r| r.to_line()))?;
    }

    let inputs: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    let stages = vec![
        StageReport::new("split", files.len(), split_count).inputs(&inputs),
        StageReport::new("initial", split_count, kept.len())
            .outputs(&[&a.out])
            .rejections(rejected.iter().map(|r| r.reason.to_string())),
    ];
    let settings = json!({ "cleanup": cfg });
    ctx.finish("ingest", Some(&a.out), settings, stages)
}

fn tagger(ctx: &Ctx, a: &MineArgs) -> Result<TaggerHandle> {
    if let Some(path) = &a.tagged {
        let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let stream = PreTaggedStream::from_reader(std::io::BufReader::new(file), &TagSet::penn())?;
        return Ok(TaggerHandle::PreTagged(Arc::new(stream)));
    }
    match a.tagger_model.as_ref().or(ctx.config.tagger_model.as_ref()) {
        Some(path) => {
            let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let model = PerceptronTagger::load(std::io::BufReader::new(file))
                .with_context(|| format!("loading tagger {}", path.display()))?;
            Ok(TaggerHandle::Perceptron(Arc::new(model)))
        }
        None => Ok(TaggerHandle::bundled()),
    }
}

fn mine(ctx: &Ctx, a: &MineArgs) -> Result<()> {
    let source = a.source.clone().unwrap_or_else(|| {
        a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    let data = read_text(&a.input)?;
    let records = io::lines(&data)
        .map(|(n, l)| parse_sentence_line(l, &source).with_context(|| format!("{}:{n}", a.input.display())))
        .collect::<Result<Vec<_>>>()?;

    let mut miner = Miner::new(tagger(ctx, a)?);
    miner.cleanup = cleanup_config(ctx, None, a.min_tokens, a.max_tokens)?;
    if let Some(list) = a.connectives.as_ref().or(ctx.config.connectives.as_ref()) {
        miner.connectives = ConnectiveConfig {
            connectives: list.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            ..ConnectiveConfig::default()
        };
    }
    miner.connectives.validate().map_err(as_usage)?;
    miner.person = PersonTest::new(ctx.lexicon(&a.lexicon)?, person_nouns().clone());

    let results = ctx.par_map(&records, |r| {
        let mut r = r.clone();
        miner.mine(&mut r).map(|inst| (inst, r))
    })?;
    let mut instances = Vec::new();
    let mut done = Vec::new();
    for res in results {
        let (inst, record) = res?;
        instances.extend(inst);
        done.push(record);
    }
    write_instances(&a.out, &instances)?;
    let rejections: Vec<_> = done.iter().filter_map(Miner::rejection).collect();
    if let Some(path) = &a.rejections {
        write_lines(path, rejections.iter().map(|r| r.to_line()))?;
    }

    let passed = |stage: Stage| {
        done.iter()
            .filter(|r| r.verdicts.iter().any(|(s, v)| *s == stage && *v == Verdict::Accept))
            .count()
    };
    let reasons = |stage: Stage| {
        rejections
            .iter()
            .filter(move |r| r.stage == stage)
            .map(|r| r.reason.to_string())
    };
    let after_initial = passed(Stage::Initial);
    let after_connective = passed(Stage::Connective);
    let stages = vec![
        StageReport::new("initial", records.len(), after_initial)
            .inputs(&[&a.input])
            .rejections(reasons(Stage::Initial)),
        StageReport::new("connective", after_initial, after_connective).rejections(reasons(Stage::Connective)),
        StageReport::new("antecedent", after_connective, instances.len())
            .outputs(&[&a.out])
            .rejections(reasons(Stage::Antecedent)),
    ];
    let settings = json!({
        "source": source,
        "cleanup": miner.cleanup,
        "connectives": miner.connectives.connectives,
        "min_content_words_before": miner.connectives.min_content_words_before,
        "tagged": a.tagged.as_deref().map(io::display),
        "tagger_model": a.tagger_model.as_ref().or(ctx.config.tagger_model.as_ref()).map(|p| io::display(p)),
        "lexicon": a.lexicon.as_ref().or(ctx.config.lexicon.as_ref()).map(|p| io::display(p)),
    });
    ctx.finish("mine", Some(&a.out), settings, stages)
}

fn label(ctx: &Ctx, a: &LabelArgs) -> Result<()> {
    let corpus = read_instances(&a.input)?;
    let lexicon = ctx.lexicon(&a.lexicon)?;
    let neutralize = a.neutralize || ctx.config.neutralize.unwrap_or(false);
    let outcomes = ctx.par_map(&corpus, |inst| label_instance(inst, &lexicon, neutralize, ctx.seed))?;
    let mut labeled = Vec::new();
    let mut abstained = Vec::new();
    for o in outcomes {
        match o? {
            LabelOutcome::Labeled(inst) => labeled.push(inst),
            LabelOutcome::Abstained { id, reason } => abstained.push((id, reason)),
        }
    }
    write_instances(&a.out, &labeled)?;
    if let Some(path) = &a.abstentions {
        write_lines(path, abstained.iter().map(|(id, r)| format!("{id}\t{r}")))?;
    }
    let stages = vec![StageReport::new("label", corpus.len(), labeled.len())
        .inputs(&[&a.input])
        .outputs(&[&a.out])
        .rejections(abstained.iter().map(|(_, r)| r.to_string()))];
    let settings = json!({
        "neutralize": neutralize,
        "lexicon": a.lexicon.as_ref().or(ctx.config.lexicon.as_ref()).map(|p| io::display(p)),
    });
    ctx.finish("label", Some(&a.out), settings, stages)
}

fn augment(ctx: &Ctx, a: &AugmentArgs) -> Result<()> {
    let corpus = read_instances(&a.input)?;
    let n = corpus.len();
    let (out, skipped) = augment_corpus(corpus);
    write_instances(&a.out, &out)?;
    if let Some(path) = &a.skipped {
        write_lines(path, skipped.iter().map(|s| format!("{}\t{}", s.id, s.reason)))?;
    }
    let stages = vec![StageReport::new("augment", n, out.len())
        .inputs(&[&a.input])
        .outputs(&[&a.out])
        .rejections(skipped.iter().map(|s| s.reason.clone()))];
    ctx.finish("augment", Some(&a.out), json!({}), stages)
}

fn pair(ctx: &Ctx, a: &PairArgs) -> Result<()> {
    let corpus = read_instances(&a.input)?;
    let n = corpus.len();
    let (pairs, skipped) = pair_corpus(corpus);
    let originals: Vec<ProblemInstance> = pairs.iter().map(|p| p.original.clone()).collect();
    let switched: Vec<ProblemInstance> = pairs.into_iter().map(|p| p.switched).collect();
    write_instances(&a.out_original, &originals)?;
    write_instances(&a.out_switched, &switched)?;
    if let Some(path) = &a.skipped {
        write_lines(path, skipped.iter().map(|s| format!("{}\t{}", s.id, s.reason)))?;
    }
    let stages = vec![StageReport::new("pair", n, originals.len())
        .inputs(&[&a.input])
        .outputs(&[&a.out_original, &a.out_switched])
        .rejections(skipped.iter().map(|s| s.reason.clone()))];
    ctx.finish("pair", Some(&a.out_original), json!({}), stages)
}

fn resolve(ctx: &Ctx, a: &ResolveArgs) -> Result<()> {
    let corpus = read_instances(&a.input)?;
    let (handle, settings) = match a.resolver {
        ResolverKind::Random => (ResolverHandle::Random { seed: ctx.seed }, json!({ "resolver": "random" })),
        ResolverKind::First => (ResolverHandle::AlwaysFirst, json!({ "resolver": "first" })),
        ResolverKind::Second => (ResolverHandle::AlwaysSecond, json!({ "resolver": "second" })),
        ResolverKind::GenderRule => (
            ResolverHandle::GenderRule(ctx.lexicon(&a.lexicon)?),
            json!({
                "resolver": "gender-rule",
                "lexicon": a.lexicon.as_ref().or(ctx.config.lexicon.as_ref()).map(|p| io::display(p)),
            }),
        ),
        ResolverKind::Ngram => {
            let Some(path) = &a.model else {
                return usage("--resolver ngram needs --model (see `train-lm`)");
            };
            let model = NGramModel::load(path).with_context(|| format!("loading {}", path.display()))?;
            (
                ResolverHandle::NGramSubstitution(Arc::new(model)),
                json!({ "resolver": "ngram", "model": io::display(path) }),
            )
        }
        ResolverKind::External => {
            let preds = match (&a.predictions, &a.command) {
                (Some(path), None) => {
                    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    ExternalPredictions::from_reader(std::io::BufReader::new(file))?
                }
                (None, Some(cmd)) if !cmd.is_empty() => ExternalPredictions::from_command(&cmd[0], &cmd[1..], &corpus)?,
                _ => return usage("--resolver external needs exactly one of --predictions or --command"),
            };
            (
                ResolverHandle::External(Arc::new(preds)),
                json!({
                    "resolver": "external",
                    "predictions": a.predictions.as_deref().map(io::display),
                    "command": a.command,
                }),
            )
        }
    };
    let predictions = ctx
        .par_map(&corpus, |inst| handle.resolve(inst))?
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    write_lines(&a.out, predictions.iter().map(|p| p.to_line()))?;
    let stages = vec![StageReport::new("resolve", corpus.len(), predictions.len())
        .inputs(&[&a.input])
        .outputs(&[&a.out])];
    ctx.finish("resolve", Some(&a.out), settings, stages)
}

fn evaluate_cmd(ctx: &Ctx, a: &EvaluateArgs) -> Result<()> {
    let corpus = read_instances(&a.corpus)?;
    let predictions = read_predictions(&a.predictions)?;
    let r = evaluate(&corpus, &predictions, a.strict)?;
    report(&r, &a.out)?;
    if a.out.is_some() || ctx.manifest.is_some() {
        let stages = vec![StageReport::new("evaluate", corpus.len(), r.n)
            .inputs(&[&a.corpus, &a.predictions])
            .rejections(r.missing.iter().map(|_| "MissingPrediction".to_string()))];
        ctx.finish("evaluate", a.out.as_deref(), json!({ "strict": a.strict }), stages)?;
    }
    Ok(())
}

fn consistency_cmd(ctx: &Ctx, a: &ConsistencyArgs) -> Result<()> {
    let originals = read_instances(&a.original)?;
    let switched = read_instances(&a.switched)?;
    if originals.len() != switched.len() {
        bail!(
            "{} has {} records but {} has {}",
            a.original.display(),
            originals.len(),
            a.switched.display(),
            switched.len()
        );
    }
    let pairs: Vec<SwitchedPair> = originals
        .into_iter()
        .zip(switched)
        .map(|(original, switched)| SwitchedPair { original, switched })
        .collect();
    let po = read_predictions(&a.pred_original)?;
    let ps = read_predictions(&a.pred_switched)?;
    let r = consistency(&pairs, &po, &ps)?;
    report(&r, &a.out)?;
    if a.out.is_some() || ctx.manifest.is_some() {
        let stages = vec![StageReport::new("consistency", r.pairs, r.counted)
            .inputs(&[&a.original, &a.switched, &a.pred_original, &a.pred_switched])
            .rejections((0..r.excluded).map(|_| "NoDecision".to_string()))];
        ctx.finish("consistency", a.out.as_deref(), json!({}), stages)?;
    }
    Ok(())
}

fn stats(a: &CorpusArgs) -> Result<()> {
    let corpus = read_instances(&a.corpus)?;
    let s = corpus_stats(&corpus)?;
    print_json(&s)
}

fn validate(a: &CorpusArgs) -> Result<()> {
    let data = read_text(&a.corpus)?;
    let mut bad = 0;
    let mut n = 0;
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line_no, line) in io::lines(&data) {
        n += 1;
        match parse_instance(line) {
            Ok(inst) => {
                if let Some(prev) = seen.insert(inst.id.clone(), line_no) {
                    eprintln!("{}:{line_no}: duplicate id `{}` (first on line {prev})", a.corpus.display(), inst.id);
                    bad += 1;
                }
            }
            Err(e) => {
                eprintln!("{}:{line_no}: {e}", a.corpus.display());
                bad += 1;
            }
        }
    }
    if bad > 0 {
        bail!("{bad} of {n} records invalid");
    }
    println!("{n} records valid");
    Ok(())
}

fn parse_matrix(text: &str, raters: Option<u32>) -> Result<AgreementMatrix> {
    if text.trim_start().starts_with('{') {
        let m: AgreementMatrix = serde_json::from_str(text)?;
        return Ok(AgreementMatrix::new(m.raters, m.rows)?);
    }
    let mut rows = Vec::new();
    for (n, line) in io::lines(text) {
        let cols: Vec<u32> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {n}: counts must be unsigned integers"))?;
        let row: [u32; 4] = cols
            .try_into()
            .map_err(|c: Vec<u32>| anyhow::anyhow!("line {n}: expected 4 counts, found {}", c.len()))?;
        rows.push(row);
    }
    let raters = raters.or_else(|| rows.first().map(|r| r.iter().sum())).unwrap_or(0);
    Ok(AgreementMatrix::new(raters, rows)?)
}

fn kappa(a: &KappaArgs) -> Result<()> {
    let matrix = parse_matrix(&read_text(&a.matrix)?, a.raters)?;
    let kappa = fleiss_kappa(&matrix)?;
    let majority = match &a.gold {
        Some(path) => {
            let text = read_text(path)?;
            let gold = io::lines(&text)
                .map(|(n, l)| match l.trim() {
                    "1" => Ok(AntecedentId::First),
                    "2" => Ok(AntecedentId::Second),
                    other => bail!("{}:{n}: gold label must be 1 or 2, got `{other}`", path.display()),
                })
                .collect::<Result<Vec<_>>>()?;
            Some(majority_accuracy(&matrix, &gold)?)
        }
        None => None,
    };
    print_json(&json!({
        "items": matrix.len(),
        "raters": matrix.raters,
        "kappa": kappa,
        "majority": majority,
    }))
}

fn qc(a: &QcArgs) -> Result<()> {
    let corpus = read_instances(&a.corpus)?;
    let by_id: HashMap<&str, &ProblemInstance> = corpus.iter().map(|i| (i.id.as_str(), i)).collect();
    let text = read_text(&a.annotations)?;
    let mut heuristic = Vec::new();
    let mut annotations = Vec::new();
    for (n, line) in io::lines(&text) {
        let Some((id, label)) = line.split_once('\t') else {
            bail!("{}:{n}: expected `id<TAB>label`", a.annotations.display());
        };
        let inst = by_id
            .get(id)
            .ok_or_else(|| CoreError::UnknownInstanceId(id.to_string()))
            .with_context(|| format!("{}:{n}", a.annotations.display()))?;
        let h = inst.label.ok_or_else(|| anyhow::anyhow!("instance `{id}` has no heuristic label"))?;
        let label: AnnotationLabel = label.trim().parse().with_context(|| format!("{}:{n}", a.annotations.display()))?;
        heuristic.push(h);
        annotations.push(label);
    }
    print_json(&qc_report(&heuristic, &annotations)?)
}

fn serve(ctx: &Ctx, a: &ServeArgs) -> Result<()> {
    let policy = AggregationPolicy::new(
        a.annotators.or(ctx.config.annotators).unwrap_or(6),
        a.threshold.or(ctx.config.threshold).unwrap_or(5),
    )
    .map_err(as_usage)?;
    let corpus = read_instances(&a.corpus)?;
    let store = AnnotationStore::open(&a.store, corpus).with_context(|| format!("opening store {}", a.store.display()))?;
    let host = a.host.clone().or_else(|| ctx.config.host.clone()).unwrap_or_else(|| "127.0.0.1".into());
    let port = a.port.or(ctx.config.port).unwrap_or(8080);
    let addr: std::net::SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|_| UsageError(format!("bad listen address `{host}:{port}`")))?;
    let state = knowref_service::AppState::new(store, policy)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(knowref_service::serve(addr, state))?;
    Ok(())
}

fn train_tagger(ctx: &Ctx, a: &TrainTaggerArgs) -> Result<()> {
    let corpus = parse_tagged_corpus(&read_text(&a.input)?)?;
    let config = TrainConfig {
        epochs: a.epochs.or(ctx.config.epochs).unwrap_or(TrainConfig::default().epochs),
        seed: ctx.seed,
        ..TrainConfig::default()
    };
    let model = PerceptronTagger::train(&corpus, &config)?;
    atomic_write(&a.out, &model.to_bytes())?;
    let stages = vec![StageReport::new("train-tagger", corpus.len(), 1)
        .inputs(&[&a.input])
        .outputs(&[&a.out])];
    ctx.finish("train-tagger", Some(&a.out), json!({ "epochs": config.epochs }), stages)
}

fn train_lm(ctx: &Ctx, a: &TrainLmArgs) -> Result<()> {
    let text = read_text(&a.input)?;
    let sentences: Vec<Vec<String>> = io::lines(&text)
        .map(|(_, l)| tokenize(l.split_once('\t').map_or(l, |(_, t)| t)))
        .collect();
    let order = a.order.or(ctx.config.order).unwrap_or(DEFAULT_ORDER);
    let k = a.k.or(ctx.config.k).unwrap_or(DEFAULT_K);
    let model = NGramModel::train(&sentences, order, k)?;
    atomic_write(&a.out, &model.to_bytes()?)?;
    let stages = vec![StageReport::new("train-lm", sentences.len(), 1)
        .inputs(&[&a.input])
        .outputs(&[&a.out])];
    ctx.finish("train-lm", Some(&a.out), json!({ "order": order, "k": k }), stages)
}
