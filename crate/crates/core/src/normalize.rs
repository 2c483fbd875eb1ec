//! Normalization kernels for document-word matrices.
//!
//! The fixed pipeline order is: repetition damping (`ln(1 + c)`), then one
//! length step (digamma or plain), then column z-scores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::DocWordMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    LogDamp,
    DigammaLength,
    PlainLength,
    Zscore,
}

impl Step {
    pub fn tag(self) -> &'static str {
        match self {
            Step::LogDamp => "log_damp",
            Step::DigammaLength => "digamma_length",
            Step::PlainLength => "plain_length",
            Step::Zscore => "zscore",
        }
    }

    fn rank(self) -> u8 {
        match self {
            Step::LogDamp => 0,
            Step::DigammaLength | Step::PlainLength => 1,
            Step::Zscore => 2,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "log_damp" | "log" => Ok(Step::LogDamp),
            "digamma_length" | "digamma" => Ok(Step::DigammaLength),
            "plain_length" | "plain" => Ok(Step::PlainLength),
            "zscore" | "z" => Ok(Step::Zscore),
            other => Err(Error::InvalidPlan(format!("unknown step `{other}`"))),
        }
    }
}

/// Below this argument the digamma recurrence is used to shift upward.
const ASYMPTOTIC_THRESHOLD: f64 = 20.0;

/// The digamma function ψ(x) for x > 0.
///
/// Shifts the argument with ψ(x) = ψ(x + 1) − 1/x until it is at least 20,
/// then evaluates the asymptotic series
/// ln x − 1/(2x) − 1/(12x²) + 1/(120x⁴) − 1/(252x⁶). Absolute error is below
/// 1e-12 for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires a finite x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
    Ok(x.ln() - 0.5 * inv - series - shift)
}

/// Divisor applied to a row of length `len` in digamma mode: ψ(max(len, 2)).
pub fn digamma_divisor(len: usize) -> f64 {
    digamma(len.max(2) as f64).expect("argument is at least 2")
}

/// Divisor applied to a row of length `len` in plain mode: max(len, 1).
pub fn plain_divisor(len: usize) -> f64 {
    len.max(1) as f64
}

fn ensure_absent(matrix: &DocWordMatrix, steps: &[Step], adding: Step) -> Result<()> {
    let state = matrix.normalization_state();
    if let Some(&s) = state.iter().find(|s| steps.contains(s)) {
        return Err(Error::StepReapplied(s));
    }
    if let Some(&last) = state.last() {
        if last.rank() > adding.rank() {
            return Err(Error::InvalidPlan(format!("`{adding}` cannot follow `{last}`")));
        }
    }
    Ok(())
}

/// Replaces each count c by ln(1 + c).
pub fn log_damp(matrix: &DocWordMatrix) -> Result<DocWordMatrix> {
    ensure_absent(matrix, &[Step::LogDamp], Step::LogDamp)?;
    if let Some(v) = matrix.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Validation(format!(
            "log damping needs nonnegative entries, found {v}"
        )));
    }
    Ok(matrix.map_rows(Step::LogDamp, |_, row| {
        for v in row {
            *v = v.ln_1p();
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthMode {
    Digamma,
    Plain,
}

/// Divides every row by a function of its document length; empty documents
/// stay zero rows.
pub fn length_normalize(matrix: &DocWordMatrix, mode: LengthMode) -> Result<DocWordMatrix> {
    let step = match mode {
        LengthMode::Digamma => Step::DigammaLength,
        LengthMode::Plain => Step::PlainLength,
    };
    ensure_absent(matrix, &[Step::DigammaLength, Step::PlainLength], step)?;
    let lengths = matrix.doc_lengths().to_vec();
    Ok(matrix.map_rows(step, |i, row| {
        let len = lengths[i];
        if len == 0 {
            return;
        }
        let d = match mode {
            LengthMode::Digamma => digamma_divisor(len),
            LengthMode::Plain => plain_divisor(len),
        };
        for v in row {
            *v /= d;
        }
    }))
}

/// Column means and standard deviations recorded on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScoreParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Columns whose sample variance was zero; their std is the substitute 1.0.
    pub degenerate: Vec<bool>,
    pub vocabulary_fingerprint: String,
}

const ZSCORE_HEADER: &str = "zscore-params v1";

impl ZScoreParams {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Maps one raw row in place.
    pub fn apply_row(&self, row: &mut [f64]) -> Result<()> {
        if row.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: row.len(),
            });
        }
        for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.stds) {
            *v = (*v - m) / s;
        }
        Ok(())
    }

    /// Text sidecar form; every real is written with 17 significant digits
    /// so that parsing reproduces it bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{ZSCORE_HEADER}\nfingerprint\t{}\ncolumns\t{}\n",
            self.vocabulary_fingerprint,
            self.len()
        );
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:.16e}\t{:.16e}\t{}\n",
                self.means[i],
                self.stds[i],
                u8::from(self.degenerate[i])
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Model(format!("zscore sidecar: {msg}"));
        let mut lines = text.lines();
        if lines.next() != Some(ZSCORE_HEADER) {
            return Err(bad("missing or unsupported header"));
        }
        let fingerprint = lines
            .next()
            .and_then(|l| l.strip_prefix("fingerprint\t"))
            .ok_or_else(|| bad("missing fingerprint"))?
            .to_string();
        let columns: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("columns\t"))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| bad("missing column count"))?;
        let mut params = ZScoreParams {
            means: Vec::with_capacity(columns),
            stds: Vec::with_capacity(columns),
            degenerate: Vec::with_capacity(columns),
            vocabulary_fingerprint: fingerprint,
        };
        for line in lines.by_ref().take(columns) {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(bad("malformed column line"));
            }
            let mean: f64 = f[0].parse().map_err(|_| bad("bad mean"))?;
            let std: f64 = f[1].parse().map_err(|_| bad("bad std"))?;
            if !(std > 0.0) {
                return Err(bad("std must be positive"));
            }
            params.means.push(mean);
            params.stds.push(std);
            params.degenerate.push(f[2] == "1");
        }
        if params.len() != columns || lines.next().is_some() {
            return Err(bad("column count does not match body"));
        }
        Ok(params)
    }
}

/// Fits per-column sample mean and (n − 1) standard deviation.
pub fn zscore_fit(matrix: &DocWordMatrix) -> Result<ZScoreParams> {
    let n = matrix.n_rows();
    if n < 2 {
        return Err(Error::Validation(format!("z-score fit needs at least 2 rows, got {n}")));
    }
    let m = matrix.n_cols();
    let mut means = vec![0.0; m];
    for row in matrix.iter_rows() {
        for (acc, v) in means.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut means {
        *v /= n as f64;
    }
    let mut sq = vec![0.0; m];
    for row in matrix.iter_rows() {
        for ((acc, v), mean) in sq.iter_mut().zip(row).zip(&means) {
            let d = v - mean;
            *acc += d * d;
        }
    }
    let mut degenerate = vec![false; m];
    let stds = sq
        .iter()
        .zip(degenerate.iter_mut())
        .map(|(s, flag)| {
            let sd = (s / (n - 1) as f64).sqrt();
            if sd > 0.0 && sd.is_finite() {
                sd
            } else {
                *flag = true;
                1.0
            }
        })
        .collect();
    Ok(ZScoreParams {
        means,
        stds,
        degenerate,
        vocabulary_fingerprint: matrix.vocabulary().fingerprint(),
    })
}

pub fn zscore_apply(matrix: &DocWordMatrix, params: &ZScoreParams) -> Result<DocWordMatrix> {
    if params.vocabulary_fingerprint != matrix.vocabulary().fingerprint() || params.len() != matrix.n_cols() {
        return Err(Error::VocabularyMismatch);
    }
    ensure_absent(matrix, &[Step::Zscore], Step::Zscore)?;
    Ok(matrix.map_rows(Step::Zscore, |_, row| {
        params.apply_row(row).expect("row length checked against params");
    }))
}

/// Ordered selection of normalization steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalizationPlan {
    steps: Vec<Step>,
    zscore_params: Option<ZScoreParams>,
}

impl NormalizationPlan {
    /// Validates step uniqueness, exclusivity of the length steps and the
    /// fixed order.
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if steps[..i].contains(s) {
                return Err(Error::InvalidPlan(format!("step `{s}` listed twice")));
            }
        }
        if steps.contains(&Step::DigammaLength) && steps.contains(&Step::PlainLength) {
            return Err(Error::InvalidPlan(
                "digamma and plain length steps are exclusive".into(),
            ));
        }
        if steps.windows(2).any(|w| w[0].rank() >= w[1].rank()) {
            return Err(Error::InvalidPlan(
                "steps must follow the order log_damp, length, zscore".into(),
            ));
        }
        Ok(NormalizationPlan {
            steps,
            zscore_params: None,
        })
    }

    /// Raw counts, no transform.
    pub fn raw() -> Self {
        NormalizationPlan::default()
    }

    /// `ln(1 + c) / ψ(L)` pseudo-rates.
    pub fn log_digamma() -> Self {
        NormalizationPlan::new(vec![Step::LogDamp, Step::DigammaLength]).expect("valid")
    }

    /// Pseudo-rates followed by z-scores.
    pub fn log_digamma_zscore() -> Self {
        NormalizationPlan::new(vec![Step::LogDamp, Step::DigammaLength, Step::Zscore]).expect("valid")
    }

    pub fn with_zscore_params(mut self, params: ZScoreParams) -> Result<Self> {
        if !self.steps.contains(&Step::Zscore) {
            return Err(Error::InvalidPlan("plan has no zscore step".into()));
        }
        self.zscore_params = Some(params);
        Ok(self)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn zscore_params(&self) -> Option<&ZScoreParams> {
        self.zscore_params.as_ref()
    }

    pub fn tags(&self) -> Vec<&'static str> {
        self.steps.iter().map(|s| s.tag()).collect()
    }

    /// The plan without its z-score parameters.
    pub fn without_params(&self) -> Self {
        NormalizationPlan {
            steps: self.steps.clone(),
            zscore_params: None,
        }
    }

    /// Parses `raw` or a comma-separated step list such as `log,digamma,zscore`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() || spec == "raw" {
            return Ok(NormalizationPlan::raw());
        }
        NormalizationPlan::new(spec.split(',').map(str::parse).collect::<Result<_>>()?)
    }

    /// Applies the steps in order. A z-score step uses the stored parameters
    /// when present and otherwise fits them on `matrix`; the parameters used
    /// are returned.
    pub fn apply(&self, matrix: &DocWordMatrix) -> Result<(DocWordMatrix, Option<ZScoreParams>)> {
        let mut current = matrix.clone();
        let mut used = None;
        for step in &self.steps {
            current = match step {
                Step::LogDamp => log_damp(&current)?,
                Step::DigammaLength => length_normalize(&current, LengthMode::Digamma)?,
                Step::PlainLength => length_normalize(&current, LengthMode::Plain)?,
                Step::Zscore => {
                    let params = match &self.zscore_params {
                        Some(p) => p.clone(),
                        None => zscore_fit(&current)?,
                    };
                    let out = zscore_apply(&current, &params)?;
                    used = Some(params);
                    out
                }
            };
        }
        Ok((current, used))
    }
}

impl fmt::Display for NormalizationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            f.write_str("raw")
        } else {
            f.write_str(&self.tags().join(","))
        }
    }
}
