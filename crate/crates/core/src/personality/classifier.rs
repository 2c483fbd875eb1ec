use std::collections::HashSet;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{fit_pole_model, norm_delta, FitConfig, SvdModel};
use crate::error::{Error, Result};
use crate::textprep::{Corpus, Document};

/// Deltas closer than this are treated as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Which norm change claims a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    /// The pole whose word factors move most wins.
    #[default]
    LargerDelta,
    /// Inverted comparison, for ablation.
    SmallerDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionClassifier {
    pub trait_name: String,
    pub model_a: SvdModel,
    pub model_b: SvdModel,
    pub rule: DecisionRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub pole: String,
    pub delta_a: f64,
    pub delta_b: f64,
    pub tie: bool,
}

impl DimensionClassifier {
    pub fn new(trait_name: impl Into<String>, model_a: SvdModel, model_b: SvdModel) -> Result<Self> {
        if model_a.pole_name == model_b.pole_name {
            return Err(Error::Validation(format!(
                "both models are for pole `{}`",
                model_a.pole_name
            )));
        }
        if model_a.k() != model_b.k() {
            return Err(Error::Validation(format!(
                "pole models have different ranks ({} vs {})",
                model_a.k(),
                model_b.k()
            )));
        }
        if model_a.pipeline.steps() != model_b.pipeline.steps() {
            return Err(Error::Validation("pole models use different pipelines".into()));
        }
        Ok(DimensionClassifier {
            trait_name: trait_name.into(),
            model_a,
            model_b,
            rule: DecisionRule::default(),
        })
    }

    pub fn with_rule(mut self, rule: DecisionRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn poles(&self) -> [&str; 2] {
        [&self.model_a.pole_name, &self.model_b.pole_name]
    }

    /// Norm deltas of a prepared row pair; exposed so callers can reuse rows.
    pub fn decide(&self, delta_a: f64, delta_b: f64) -> Prediction {
        let tie = (delta_a - delta_b).abs() <= TIE_TOLERANCE;
        let a_wins = tie
            || match self.rule {
                DecisionRule::LargerDelta => delta_a > delta_b,
                DecisionRule::SmallerDelta => delta_a < delta_b,
            };
        if tie {
            warn!(
                "{}: norm deltas tie ({delta_a:e} vs {delta_b:e}); assigning `{}`",
                self.trait_name, self.model_a.pole_name
            );
        }
        let winner = if a_wins { &self.model_a } else { &self.model_b };
        Prediction {
            pole: winner.pole_name.clone(),
            delta_a,
            delta_b,
            tie,
        }
    }

    /// Assigns `document` to the pole model that claims it more strongly.
    pub fn classify(&self, document: &Document) -> Result<Prediction> {
        if document.tokens.is_empty()
            || (self.model_a.in_vocabulary(document) == 0 && self.model_b.in_vocabulary(document) == 0)
        {
            return Err(Error::NoSignal);
        }
        let delta_a = norm_delta(&self.model_a, &self.model_a.prepare_row(document)?)?;
        let delta_b = norm_delta(&self.model_b, &self.model_b.prepare_row(document)?)?;
        Ok(self.decide(delta_a, delta_b))
    }
}

/// How labeled documents are divided into training and test sets.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitProtocol {
    /// Per pole, a seeded shuffle holds out this fraction for testing.
    Holdout { test_fraction: f64 },
    /// Documents with these ids form the test set.
    TestIds(HashSet<String>),
}

impl Default for SplitProtocol {
    fn default() -> Self {
        SplitProtocol::Holdout { test_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(rename = "trait")]
    pub trait_name: String,
    /// `[positive, negative]`; the positive pole sorts first.
    pub poles: [String; 2],
    pub accuracy: f64,
    pub f1: f64,
    /// Rows are actual `[positive, negative]`, columns predicted.
    pub confusion: [[usize; 2]; 2],
    pub test_size: usize,
    /// Test documents without any in-vocabulary token, counted as
    /// predictions of the positive pole.
    pub no_signal: usize,
}

impl EvalResult {
    /// Scores `(actual, predicted)` pole pairs; `poles[0]` is the positive
    /// class.
    pub fn from_predictions<'a, I>(trait_name: &str, poles: [String; 2], pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let idx = |p: &str| {
            poles
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| Error::Validation(format!("unknown pole `{p}` for {trait_name}")))
        };
        let mut confusion = [[0usize; 2]; 2];
        for (actual, predicted) in pairs {
            confusion[idx(actual)?][idx(predicted)?] += 1;
        }
        let total: usize = confusion.iter().flatten().sum();
        let [[tp, fn_], [fp, _tn]] = confusion;
        let accuracy = if total == 0 {
            0.0
        } else {
            (confusion[0][0] + confusion[1][1]) as f64 / total as f64
        };
        let denom = 2 * tp + fp + fn_;
        let f1 = if denom == 0 {
            0.0
        } else {
            (2 * tp) as f64 / denom as f64
        };
        Ok(EvalResult {
            trait_name: trait_name.to_string(),
            poles,
            accuracy,
            f1,
            confusion,
            test_size: total,
            no_signal: 0,
        })
    }
}

fn split_corpus(
    corpus: &Corpus,
    trait_name: &str,
    poles: &[String; 2],
    protocol: &SplitProtocol,
    seed: u64,
) -> Result<(Corpus, Corpus)> {
    let mut test_ids: HashSet<&str> = HashSet::new();
    match protocol {
        SplitProtocol::Holdout { test_fraction } => {
            if !(0.0..1.0).contains(test_fraction) || *test_fraction <= 0.0 {
                return Err(Error::Validation(format!(
                    "test fraction must lie in (0, 1), got {test_fraction}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for pole in poles {
                let mut ids: Vec<&str> = corpus
                    .documents()
                    .iter()
                    .filter(|d| d.label(trait_name) == Some(pole.as_str()))
                    .map(|d| d.id.as_str())
                    .collect();
                ids.shuffle(&mut rng);
                let n_test = ((ids.len() as f64) * test_fraction).round() as usize;
                test_ids.extend(ids.into_iter().take(n_test));
            }
        }
        SplitProtocol::TestIds(ids) => test_ids.extend(ids.iter().map(String::as_str)),
    }
    let labeled = |d: &Document| d.label(trait_name).is_some();
    let train = corpus.filter(|d| labeled(d) && !test_ids.contains(d.id.as_str()));
    let test = corpus.filter(|d| labeled(d) && test_ids.contains(d.id.as_str()));
    Ok((train, test))
}

/// Stream seeds derived from the run seed; the split and each pole sample
/// draw from separate generators.
fn derived_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream)
}

/// Fits both pole models of `trait_name` on `corpus` (all of it is training
/// data) and builds the classifier.
pub fn train_classifier(corpus: &Corpus, trait_name: &str, config: &FitConfig) -> Result<DimensionClassifier> {
    let poles = two_poles(corpus, trait_name)?;
    build_classifier(corpus, trait_name, &poles, config)
}

fn build_classifier(
    corpus: &Corpus,
    trait_name: &str,
    poles: &[String; 2],
    config: &FitConfig,
) -> Result<DimensionClassifier> {
    let fit = |i: usize| {
        let cfg = FitConfig {
            seed: derived_seed(config.seed, 1 + i as u64),
            ..*config
        };
        fit_pole_model(corpus, trait_name, &poles[i], &cfg)
    };
    DimensionClassifier::new(trait_name, fit(0)?, fit(1)?)
}

fn two_poles(corpus: &Corpus, trait_name: &str) -> Result<[String; 2]> {
    let poles = corpus.poles(trait_name);
    match <[String; 2]>::try_from(poles) {
        Ok(p) => Ok(p),
        Err(p) if p.len() < 2 => Err(Error::Validation(format!(
            "trait `{trait_name}` needs two poles in the training data, found {}",
            p.len()
        ))),
        Err(p) => Err(Error::Validation(format!(
            "trait `{trait_name}` has {} poles; expected exactly two",
            p.len()
        ))),
    }
}

/// Train/test evaluation of one trait. Poles are the trait's two label
/// values; the alphabetically first is model A and the positive class.
pub fn evaluate(
    corpus: &Corpus,
    trait_name: &str,
    protocol: &SplitProtocol,
    config: &FitConfig,
    rule: DecisionRule,
) -> Result<EvalResult> {
    let poles = two_poles(corpus, trait_name)?;
    let (train, test) = split_corpus(corpus, trait_name, &poles, protocol, derived_seed(config.seed, 0))?;
    let train_poles = train.poles(trait_name);
    if let Some(missing) = poles.iter().find(|p| !train_poles.contains(p)) {
        return Err(Error::Validation(format!(
            "pole `{missing}` of `{trait_name}` is absent from the training split"
        )));
    }
    let classifier = build_classifier(&train, trait_name, &poles, config)?.with_rule(rule);
    let mut pairs = Vec::with_capacity(test.len());
    let mut no_signal = 0;
    for doc in test.documents() {
        let predicted = match classifier.classify(doc) {
            Ok(p) => p.pole,
            Err(Error::NoSignal) => {
                no_signal += 1;
                poles[0].clone()
            }
            Err(e) => return Err(e),
        };
        pairs.push((
            doc.label(trait_name).expect("test docs are labeled").to_string(),
            predicted,
        ));
    }
    let mut result = EvalResult::from_predictions(
        trait_name,
        poles.clone(),
        pairs.iter().map(|(a, p)| (a.as_str(), p.as_str())),
    )?;
    result.no_signal = no_signal;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiSeedEval {
    pub runs: Vec<(u64, EvalResult)>,
    pub mean_accuracy: f64,
    pub mean_f1: f64,
}

/// Repeats [`evaluate`] once per seed and averages accuracy and F1.
pub fn evaluate_seeds(
    corpus: &Corpus,
    trait_name: &str,
    protocol: &SplitProtocol,
    config: &FitConfig,
    rule: DecisionRule,
    seeds: &[u64],
) -> Result<MultiSeedEval> {
    if seeds.is_empty() {
        return Err(Error::Validation("at least one seed is required".into()));
    }
    let runs = seeds
        .iter()
        .map(|&seed| {
            let cfg = FitConfig { seed, ..*config };
            evaluate(corpus, trait_name, protocol, &cfg, rule).map(|r| (seed, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = runs.len() as f64;
    Ok(MultiSeedEval {
        mean_accuracy: runs.iter().map(|(_, r)| r.accuracy).sum::<f64>() / n,
        mean_f1: runs.iter().map(|(_, r)| r.f1).sum::<f64>() / n,
        runs,
    })
}
