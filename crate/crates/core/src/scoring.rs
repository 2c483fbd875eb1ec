//! Lexicon scoring of document-word matrices and ranked reports.
//!
//! A document's score under a lexicon is the sum over vocabulary words of the
//! (normalized) cell value times the word's lexicon weight. Lexicons are
//! scored independently; no report is ever combined with another.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lexicons::{Lexicon, LexiconKind, LexiconRegistry};
use crate::normalize::NormalizationPlan;
use crate::textprep::{DocWordMatrix, Vocabulary};

/// Sum of `row[w] * weight(w)` over the vocabulary.
pub fn score_document(row: &[f64], vocabulary: &Vocabulary, lexicon: &Lexicon) -> f64 {
    debug_assert_eq!(row.len(), vocabulary.len());
    row.iter()
        .zip(vocabulary.words())
        .filter(|(v, _)| **v != 0.0)
        .map(|(v, w)| v * lexicon.weight(w))
        .fold(0.0, |acc, x| acc + x)
}

/// Column weights of `lexicon` over `vocabulary`.
fn weight_vector(vocabulary: &Vocabulary, lexicon: &Lexicon) -> Vec<f64> {
    vocabulary.words().iter().map(|w| lexicon.weight(w)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Highest,
    Lowest,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "highest" => Ok(Direction::Highest),
            "lowest" => Ok(Direction::Lowest),
            other => Err(Error::Validation(format!("unknown direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredDoc {
    pub id: String,
    pub score: f64,
    /// 1-based position in the descending ranking.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    lexicon_name: String,
    ids: Vec<String>,
    scores: Vec<f64>,
    /// Row indices sorted by score descending, ties by id ascending.
    ranking: Vec<usize>,
    pipeline: NormalizationPlan,
}

fn rank_order(ids: &[String], scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    order
}

impl ScoreReport {
    pub fn new(
        lexicon_name: impl Into<String>,
        ids: Vec<String>,
        scores: Vec<f64>,
        pipeline: NormalizationPlan,
    ) -> Result<Self> {
        if ids.len() != scores.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                found: scores.len(),
            });
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("scores"));
        }
        let ranking = rank_order(&ids, &scores);
        Ok(ScoreReport {
            lexicon_name: lexicon_name.into(),
            ids,
            scores,
            ranking,
            pipeline,
        })
    }

    pub fn lexicon_name(&self) -> &str {
        &self.lexicon_name
    }

    pub fn pipeline(&self) -> &NormalizationPlan {
        &self.pipeline
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Scores in matrix row order.
    pub fn scores(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids.iter().map(String::as_str).zip(self.scores.iter().copied())
    }

    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.ids.iter().position(|i| i == id).map(|i| self.scores[i])
    }

    pub fn score_map(&self) -> BTreeMap<&str, f64> {
        self.scores().collect()
    }

    /// Document ids, highest score first.
    pub fn ranking(&self) -> Vec<&str> {
        self.ranking.iter().map(|&i| self.ids[i].as_str()).collect()
    }

    pub fn ranked(&self) -> Vec<ScoredDoc> {
        self.ranking
            .iter()
            .enumerate()
            .map(|(r, &i)| ScoredDoc {
                id: self.ids[i].clone(),
                score: self.scores[i],
                rank: r + 1,
            })
            .collect()
    }

    /// First `k` entries of the ranking, or of its reverse for
    /// [`Direction::Lowest`]. Ties keep id order in both directions.
    pub fn top_k(&self, k: usize, direction: Direction) -> Result<Vec<ScoredDoc>> {
        if k == 0 {
            return Err(Error::Validation("k must be at least 1".into()));
        }
        let mut ranked = self.ranked();
        if direction == Direction::Lowest {
            ranked.sort_by(|a, b| {
                a.score
                    .partial_cmp(&b.score)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| a.id.cmp(&b.id))
            });
        }
        ranked.truncate(k);
        Ok(ranked)
    }

    /// `doc_id,score` lines in ranking order, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("doc_id,score\n");
        for d in self.ranked() {
            let _ = writeln!(out, "{},{}", csv_field(&d.id), d.score);
        }
        out
    }

    /// JSON array of `{id, score, rank}` in ranking order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.ranked()).expect("serializable") + "\n"
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Replaces tabs and line breaks so a value fits in one TSV cell.
pub fn tsv_cell(s: &str) -> String {
    s.chars()
        .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
        .collect()
}

/// Scores every row of `matrix` against `lexicon`.
pub fn score_matrix(matrix: &DocWordMatrix, lexicon: &Lexicon, pipeline: &NormalizationPlan) -> Result<ScoreReport> {
    let weights = weight_vector(matrix.vocabulary(), lexicon);
    let scores = matrix
        .iter_rows()
        .map(|row| {
            row.iter()
                .zip(&weights)
                .filter(|(_, w)| **w != 0.0)
                .map(|(v, w)| v * w)
                .fold(0.0, |acc: f64, x| acc + x)
        })
        .collect();
    ScoreReport::new(
        lexicon.name(),
        matrix.rows().to_vec(),
        scores,
        pipeline.without_params(),
    )
}

/// One report per member of `group`, in group order. `matrix` must already be
/// normalized by `pipeline`; the plan is recorded on each report.
pub fn score_corpus(
    matrix: &DocWordMatrix,
    registry: &LexiconRegistry,
    group: &str,
    pipeline: &NormalizationPlan,
) -> Result<Vec<ScoreReport>> {
    registry
        .group(group)?
        .into_iter()
        .map(|lex| score_matrix(matrix, lex, pipeline))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsgoodProfile {
    pub evaluation: f64,
    pub activity: f64,
    pub potency: f64,
}

impl OsgoodProfile {
    pub fn axis(&self, axis: OsgoodAxis) -> f64 {
        match axis {
            OsgoodAxis::Evaluation => self.evaluation,
            OsgoodAxis::Activity => self.activity,
            OsgoodAxis::Potency => self.potency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OsgoodAxis {
    Evaluation,
    Activity,
    Potency,
}

impl std::str::FromStr for OsgoodAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evaluation" | "e" => Ok(OsgoodAxis::Evaluation),
            "activity" | "a" => Ok(OsgoodAxis::Activity),
            "potency" | "p" => Ok(OsgoodAxis::Potency),
            other => Err(Error::Validation(format!("unknown Osgood axis `{other}`"))),
        }
    }
}

/// Evaluation / activity / potency scores per document, keyed by id, over
/// three weighted lexicons.
pub fn osgood_profile(
    matrix: &DocWordMatrix,
    evaluation: &Lexicon,
    activity: &Lexicon,
    potency: &Lexicon,
) -> Result<BTreeMap<String, OsgoodProfile>> {
    for lex in [evaluation, activity, potency] {
        if lex.kind() != LexiconKind::Weighted {
            return Err(Error::Validation(format!(
                "Osgood axis lexicon `{}` must be weighted",
                lex.name()
            )));
        }
    }
    let vocab = matrix.vocabulary();
    Ok(matrix
        .rows()
        .iter()
        .zip(matrix.iter_rows())
        .map(|(id, row)| {
            (
                id.clone(),
                OsgoodProfile {
                    evaluation: score_document(row, vocab, evaluation),
                    activity: score_document(row, vocab, activity),
                    potency: score_document(row, vocab, potency),
                },
            )
        })
        .collect())
}

/// Report over one axis of a set of profiles, in `matrix` row order.
pub fn osgood_report(
    matrix: &DocWordMatrix,
    profiles: &BTreeMap<String, OsgoodProfile>,
    axis: OsgoodAxis,
    pipeline: &NormalizationPlan,
) -> Result<ScoreReport> {
    let ids = matrix.rows().to_vec();
    let scores = ids
        .iter()
        .map(|id| {
            profiles
                .get(id)
                .map(|p| p.axis(axis))
                .ok_or_else(|| Error::Validation(format!("no profile for `{id}`")))
        })
        .collect::<Result<_>>()?;
    let name = match axis {
        OsgoodAxis::Evaluation => "osgood.evaluation",
        OsgoodAxis::Activity => "osgood.activity",
        OsgoodAxis::Potency => "osgood.potency",
    };
    ScoreReport::new(name, ids, scores, pipeline.without_params())
}
