use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use affect_core::lexicons::{bundled_lexicons, load_lexicon_file, load_osgood_file, Lexicon, LexiconFormat};
use affect_core::normalize::NormalizationPlan;
use affect_core::personality::persist::{load_classifier, save_classifier};
use affect_core::personality::{
    evaluate, evaluate_seeds, train_classifier, DecisionRule, EvalResult, FitConfig, SplitProtocol,
};
use affect_core::scoring::{osgood_profile, osgood_report, score_matrix, tsv_cell, Direction, OsgoodAxis, ScoredDoc};
use affect_core::textprep::{
    build_matrix, build_vocabulary, read_csv, read_plain_text, remove_rare_words, Corpus, CsvColumns, DocWordMatrix,
};
use affect_core::Error;
use serde::Serialize;

use crate::config::{
    AxisArg, Command, CorpusArgs, DirectionArg, EvaluateArgs, InputFormat, ModelArgs, OsgoodArgs, OutputArgs,
    OutputFormat, PredictArgs, RankArgs, RankingArgs, RuleArg, RunConfig, ScoreArgs, TrainArgs,
};
use crate::error::CliError;
use crate::output::{emit, hash_input, sidecar, write_atomic, InputHash, Manifest, RUN_MANIFEST};

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    match &config.command {
        Command::Score(a) => score(config, a),
        Command::Rank(a) => rank(config, a),
        Command::Osgood(a) => osgood(config, a),
        Command::Train(a) => train(config, a),
        Command::Predict(a) => predict(config, a),
        Command::Evaluate(a) => evaluate_cmd(config, a),
    }
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus, CliError> {
    let csv = match args.input_format {
        InputFormat::Csv => true,
        InputFormat::Text => false,
        InputFormat::Auto => args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    };
    let corpus = if csv {
        let columns = CsvColumns {
            id: args.id_column.clone(),
            text: args.text_column.clone(),
        };
        read_csv(&args.input, &columns)?
    } else {
        read_plain_text(&args.input)?
    };
    if corpus.is_empty() {
        return Err(CliError::Validation(format!(
            "{} contains no documents",
            args.input.display()
        )));
    }
    log::info!(
        "read {} documents ({} tokens) from {}",
        corpus.len(),
        corpus.token_count(),
        args.input.display()
    );
    Ok(corpus)
}

fn prune(corpus: &Corpus, min_doc_freq: usize) -> Result<Corpus, CliError> {
    if min_doc_freq <= 1 {
        return Ok(corpus.clone());
    }
    let (pruned, report) = remove_rare_words(corpus, min_doc_freq)?;
    log::info!(
        "removed {} rare word types ({} tokens) below document frequency {min_doc_freq}",
        report.removed_types,
        report.removed_tokens
    );
    Ok(pruned)
}

/// Normalized matrix over the full corpus vocabulary, plus the plan used.
fn prepare(corpus: &Corpus, ranking: &RankingArgs) -> Result<(DocWordMatrix, NormalizationPlan), CliError> {
    let corpus = prune(corpus, ranking.min_doc_freq)?;
    let vocabulary = build_vocabulary(&corpus, usize::MAX)?;
    let plan = NormalizationPlan::parse(&ranking.pipeline)?;
    let (matrix, _) = plan.apply(&build_matrix(&corpus, &vocabulary))?;
    Ok((matrix, plan))
}

fn direction(d: DirectionArg) -> Direction {
    match d {
        DirectionArg::Highest => Direction::Highest,
        DirectionArg::Lowest => Direction::Lowest,
    }
}

fn rule(r: RuleArg) -> DecisionRule {
    match r {
        RuleArg::Larger => DecisionRule::LargerDelta,
        RuleArg::Smaller => DecisionRule::SmallerDelta,
    }
}

fn fit_config(m: &ModelArgs) -> FitConfig {
    FitConfig {
        sample_size: m.sample_size,
        k: m.k,
        vocab_size: m.vocab_size,
        seed: m.seed,
    }
}

fn texts(corpus: &Corpus) -> BTreeMap<&str, &str> {
    corpus
        .documents()
        .iter()
        .map(|d| (d.id.as_str(), d.raw_text.as_str()))
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// Writes the rendered output and, when it goes to a file or `--manifest`
/// is given, the run manifest.
fn finish(config: &RunConfig, out: &OutputArgs, inputs: &[&Path], contents: &str) -> Result<(), CliError> {
    emit(out.output.as_deref(), contents)?;
    let manifest_path = match (&out.manifest, &out.output) {
        (Some(m), _) => m.clone(),
        (None, Some(o)) => sidecar(o),
        (None, None) => return Ok(()),
    };
    let hashes = inputs
        .iter()
        .map(|p| hash_input(p))
        .collect::<Result<Vec<InputHash>, _>>()?;
    let outputs = out.output.iter().cloned().collect();
    write_atomic(
        &manifest_path,
        Manifest::new(config, hashes, outputs).to_json().as_bytes(),
    )
}

fn select(
    ranked: Vec<ScoredDoc>,
    top: Option<usize>,
    dir: DirectionArg,
    report: &affect_core::scoring::ScoreReport,
) -> Result<Vec<ScoredDoc>, CliError> {
    match (top, dir) {
        (None, DirectionArg::Highest) => Ok(ranked),
        (k, d) => Ok(report.top_k(k.unwrap_or(ranked.len().max(1)), direction(d))?),
    }
}

fn resolve_lexicon(a: &ScoreArgs) -> Result<Lexicon, CliError> {
    if let Ok(lex) = bundled_lexicons().get(&a.lexicon) {
        return Ok(lex.clone());
    }
    let path = Path::new(&a.lexicon);
    let lex = match &a.category {
        Some(category) => load_lexicon_file(
            path,
            &LexiconFormat::CategoryFlag {
                category: category.clone(),
            },
            category,
        )?,
        None => {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            load_lexicon_file(path, &LexiconFormat::WordWeight, &name)?
        }
    };
    Ok(lex)
}

fn score(config: &RunConfig, a: &ScoreArgs) -> Result<(), CliError> {
    let lexicon = resolve_lexicon(a)?;
    let corpus = load_corpus(&a.corpus)?;
    let (matrix, plan) = prepare(&corpus, &a.ranking)?;
    let report = score_matrix(&matrix, &lexicon, &plan)?;
    let rows = select(report.ranked(), a.ranking.top, a.ranking.direction, &report)?;
    let text = texts(&corpus);
    let rendered = match a.out.format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("doc_id,score\n");
            for r in &rows {
                let _ = writeln!(s, "{},{}", csv_field(&r.id), r.score);
            }
            s
        }
        OutputFormat::Tsv => {
            let mut s = String::from("rank\tdoc_id\tscore\ttext\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}",
                    r.rank,
                    tsv_cell(&r.id),
                    r.score,
                    tsv_cell(text[r.id.as_str()])
                );
            }
            s
        }
    };
    let lexicon_path = Path::new(&a.lexicon);
    let mut inputs = vec![a.corpus.input.as_path()];
    if lexicon_path.exists() {
        inputs.push(lexicon_path);
    }
    finish(config, &a.out, &inputs, &rendered)
}

#[derive(Serialize)]
struct GroupRanking {
    lexicon: String,
    documents: Vec<ScoredDoc>,
}

fn rank(config: &RunConfig, a: &RankArgs) -> Result<(), CliError> {
    let mut registry = bundled_lexicons();
    if let Some(f) = &a.lexicon_file {
        registry.load_category_file(f)?;
    }
    let members = registry.group(&a.group)?;
    let corpus = load_corpus(&a.corpus)?;
    let (matrix, plan) = prepare(&corpus, &a.ranking)?;
    let mut rankings = Vec::with_capacity(members.len());
    for lex in members {
        let report = score_matrix(&matrix, lex, &plan)?;
        let documents = select(report.ranked(), a.ranking.top, a.ranking.direction, &report)?;
        rankings.push(GroupRanking {
            lexicon: lex.name().to_string(),
            documents,
        });
    }
    let text = texts(&corpus);
    let rendered = match a.out.format {
        OutputFormat::Json => json(&rankings),
        OutputFormat::Csv => {
            let mut s = String::from("lexicon,rank,doc_id,score\n");
            for g in &rankings {
                for r in &g.documents {
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        csv_field(&g.lexicon),
                        r.rank,
                        csv_field(&r.id),
                        r.score
                    );
                }
            }
            s
        }
        OutputFormat::Tsv => {
            let mut s = String::from("lexicon\trank\tdoc_id\tscore\ttext\n");
            for g in &rankings {
                for r in &g.documents {
                    let _ = writeln!(
                        s,
                        "{}\t{}\t{}\t{}\t{}",
                        g.lexicon,
                        r.rank,
                        tsv_cell(&r.id),
                        r.score,
                        tsv_cell(text[r.id.as_str()])
                    );
                }
            }
            s
        }
    };
    let mut inputs = vec![a.corpus.input.as_path()];
    inputs.extend(a.lexicon_file.as_deref());
    finish(config, &a.out, &inputs, &rendered)
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    id: &'a str,
    rank: usize,
    evaluation: f64,
    activity: f64,
    potency: f64,
}

fn osgood(config: &RunConfig, a: &OsgoodArgs) -> Result<(), CliError> {
    let [e, ac, p] = load_osgood_file(&a.dims)?;
    let corpus = load_corpus(&a.corpus)?;
    let (matrix, plan) = prepare(&corpus, &a.ranking)?;
    let profiles = osgood_profile(&matrix, &e, &ac, &p)?;
    let axis = match a.axis {
        AxisArg::Evaluation => OsgoodAxis::Evaluation,
        AxisArg::Activity => OsgoodAxis::Activity,
        AxisArg::Potency => OsgoodAxis::Potency,
    };
    let report = osgood_report(&matrix, &profiles, axis, &plan)?;
    let ordered = select(report.ranked(), a.ranking.top, a.ranking.direction, &report)?;
    let rows: Vec<ProfileRow> = ordered
        .iter()
        .map(|d| {
            let prof = &profiles[&d.id];
            ProfileRow {
                id: &d.id,
                rank: d.rank,
                evaluation: prof.evaluation,
                activity: prof.activity,
                potency: prof.potency,
            }
        })
        .collect();
    let text = texts(&corpus);
    let rendered = match a.out.format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("doc_id,evaluation,activity,potency\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", csv_field(r.id), r.evaluation, r.activity, r.potency);
            }
            s
        }
        OutputFormat::Tsv => {
            let mut s = String::from("rank\tdoc_id\tevaluation\tactivity\tpotency\ttext\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.rank,
                    tsv_cell(r.id),
                    r.evaluation,
                    r.activity,
                    r.potency,
                    tsv_cell(text[r.id])
                );
            }
            s
        }
    };
    finish(config, &a.out, &[a.corpus.input.as_path(), a.dims.as_path()], &rendered)
}

fn train(config: &RunConfig, a: &TrainArgs) -> Result<(), CliError> {
    let corpus = prune(&load_corpus(&a.corpus)?, a.model.min_doc_freq)?;
    let cfg = fit_config(&a.model);
    let classifier = train_classifier(&corpus, &a.trait_name, &cfg)?.with_rule(rule(a.model.rule));
    save_classifier(&a.model_dir, &classifier, &cfg).map_err(|e| match e {
        Error::Io { .. } => CliError::Output(e.to_string()),
        other => other.into(),
    })?;
    let manifest = Manifest::new(config, vec![hash_input(&a.corpus.input)?], vec![a.model_dir.clone()]);
    write_atomic(&a.model_dir.join(RUN_MANIFEST), manifest.to_json().as_bytes())?;
    log::info!("saved `{}` classifier to {}", a.trait_name, a.model_dir.display());
    Ok(())
}

#[derive(Serialize)]
struct PredictionRow<'a> {
    id: &'a str,
    /// `None` when the document shares no word with either model.
    pole: Option<String>,
    delta_a: Option<f64>,
    delta_b: Option<f64>,
    tie: bool,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn predict(config: &RunConfig, a: &PredictArgs) -> Result<(), CliError> {
    let classifier = load_classifier(&a.model_dir)?;
    let corpus = load_corpus(&a.corpus)?;
    let mut rows = Vec::with_capacity(corpus.len());
    for doc in corpus.documents() {
        let row = match classifier.classify(doc) {
            Ok(p) => PredictionRow {
                id: &doc.id,
                pole: Some(p.pole),
                delta_a: Some(p.delta_a),
                delta_b: Some(p.delta_b),
                tie: p.tie,
            },
            Err(Error::NoSignal) => {
                log::warn!("document `{}` has no tokens in either model vocabulary", doc.id);
                PredictionRow {
                    id: &doc.id,
                    pole: None,
                    delta_a: None,
                    delta_b: None,
                    tie: false,
                }
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    let rendered = match a.out.format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv | OutputFormat::Tsv => {
            let sep = if a.out.format == OutputFormat::Csv { ',' } else { '\t' };
            let cell = |s: &str| if sep == ',' { csv_field(s) } else { tsv_cell(s) };
            let mut s = ["doc_id", "pole", "delta_a", "delta_b", "tie"].join(&sep.to_string()) + "\n";
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{}{sep}{}{sep}{}{sep}{}{sep}{}",
                    cell(r.id),
                    cell(r.pole.as_deref().unwrap_or("")),
                    opt(r.delta_a),
                    opt(r.delta_b),
                    r.tie
                );
            }
            s
        }
    };
    finish(
        config,
        &a.out,
        &[a.corpus.input.as_path(), a.model_dir.as_path()],
        &rendered,
    )
}

#[derive(Serialize)]
struct TraitEvaluation {
    #[serde(flatten)]
    result: EvalResult,
    seed: u64,
    /// Present when extra seeds were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_f1: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    runs: Vec<SeedRun>,
}

#[derive(Serialize)]
struct SeedRun {
    seed: u64,
    accuracy: f64,
    f1: f64,
}

fn evaluate_cmd(config: &RunConfig, a: &EvaluateArgs) -> Result<(), CliError> {
    let corpus = prune(&load_corpus(&a.corpus)?, a.model.min_doc_freq)?;
    let traits = if a.traits.is_empty() {
        corpus.traits()
    } else {
        a.traits.clone()
    };
    if traits.is_empty() {
        return Err(CliError::Validation("corpus has no label columns to evaluate".into()));
    }
    let cfg = fit_config(&a.model);
    let protocol = SplitProtocol::Holdout {
        test_fraction: a.test_fraction,
    };
    let decision = rule(a.model.rule);
    let mut results = Vec::with_capacity(traits.len());
    for t in &traits {
        let result = evaluate(&corpus, t, &protocol, &cfg, decision)?;
        log::info!("{t}: accuracy {:.4}, F1 {:.4}", result.accuracy, result.f1);
        let mut entry = TraitEvaluation {
            result,
            seed: cfg.seed,
            mean_accuracy: None,
            mean_f1: None,
            runs: Vec::new(),
        };
        if !a.seeds.is_empty() {
            let mut seeds = vec![cfg.seed];
            seeds.extend(a.seeds.iter().filter(|s| **s != cfg.seed));
            let summary = evaluate_seeds(&corpus, t, &protocol, &cfg, decision, &seeds)?;
            entry.mean_accuracy = Some(summary.mean_accuracy);
            entry.mean_f1 = Some(summary.mean_f1);
            entry.runs = summary
                .runs
                .iter()
                .map(|(seed, r)| SeedRun {
                    seed: *seed,
                    accuracy: r.accuracy,
                    f1: r.f1,
                })
                .collect();
        }
        results.push(entry);
    }
    let rendered = match a.out.format {
        OutputFormat::Json => json(&results),
        OutputFormat::Csv | OutputFormat::Tsv => {
            let sep = if a.out.format == OutputFormat::Csv { "," } else { "\t" };
            let header = [
                "trait",
                "positive",
                "negative",
                "accuracy",
                "f1",
                "tp",
                "fn",
                "fp",
                "tn",
                "test_size",
                "no_signal",
            ];
            let mut s = header.join(sep) + "\n";
            for e in &results {
                let r = &e.result;
                let cells = [
                    r.trait_name.clone(),
                    r.poles[0].clone(),
                    r.poles[1].clone(),
                    r.accuracy.to_string(),
                    r.f1.to_string(),
                    r.confusion[0][0].to_string(),
                    r.confusion[0][1].to_string(),
                    r.confusion[1][0].to_string(),
                    r.confusion[1][1].to_string(),
                    r.test_size.to_string(),
                    r.no_signal.to_string(),
                ];
                s += &cells.join(sep);
                s.push('\n');
            }
            s
        }
    };
    finish(config, &a.out, &[a.corpus.input.as_path()], &rendered)
}
