use nalgebra::{linalg::Cholesky, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::svd::{apply_sign_convention, truncated_svd};
use crate::error::{Error, Result};
use crate::normalize::{NormalizationPlan, ZScoreParams};
use crate::textprep::{build_matrix, build_matrix_from_docs, build_vocabulary, Corpus, Document, Vocabulary};

pub const DEFAULT_SAMPLE_SIZE: usize = 100;
pub const DEFAULT_VOCAB_SIZE: usize = 1000;
pub const DEFAULT_RANK: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitConfig {
    pub sample_size: usize,
    pub k: usize,
    pub vocab_size: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            sample_size: DEFAULT_SAMPLE_SIZE,
            k: DEFAULT_RANK,
            vocab_size: DEFAULT_VOCAB_SIZE,
            seed: 0,
        }
    }
}

/// SVD of one pole's z-scored pseudo-rate matrix.
///
/// `training` is the z-scored matrix `A` itself (documents × words); fold-in
/// appends test rows to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdModel {
    pub pole_name: String,
    pub training: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
    pub vocabulary: Vocabulary,
    /// Always carries the fitted z-score parameters.
    pub pipeline: NormalizationPlan,
}

impl SvdModel {
    /// Factorizes an already normalized matrix.
    pub fn from_matrix(
        pole_name: impl Into<String>,
        training: DMatrix<f64>,
        k: usize,
        vocabulary: Vocabulary,
        pipeline: NormalizationPlan,
    ) -> Result<Self> {
        if training.ncols() != vocabulary.len() {
            return Err(Error::DimensionMismatch {
                expected: vocabulary.len(),
                found: training.ncols(),
            });
        }
        let svd = truncated_svd(&training, k)?;
        Ok(SvdModel {
            pole_name: pole_name.into(),
            training,
            u: svd.u,
            s: svd.s.iter().copied().collect(),
            v: svd.v,
            vocabulary,
            pipeline,
        })
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn n_docs(&self) -> usize {
        self.u.nrows()
    }

    pub fn n_words(&self) -> usize {
        self.v.nrows()
    }

    pub fn zscore_params(&self) -> Option<&ZScoreParams> {
        self.pipeline.zscore_params()
    }

    /// Re-applies the sign convention; a fitted model is already normalized,
    /// so this is a no-op on it.
    pub fn normalize_signs(&mut self) {
        apply_sign_convention(&mut self.u, &mut self.v);
    }

    /// Maps a document onto this model's vocabulary and scale. Unseen words
    /// are dropped; document length still counts them.
    pub fn prepare_row(&self, document: &Document) -> Result<Vec<f64>> {
        let m = build_matrix_from_docs(std::slice::from_ref(document), &self.vocabulary);
        let (prepared, _) = self.pipeline.apply(&m)?;
        Ok(prepared.row(0).to_vec())
    }

    /// Number of the document's tokens found in this model's vocabulary.
    pub fn in_vocabulary(&self, document: &Document) -> usize {
        document
            .tokens
            .iter()
            .filter(|t| self.vocabulary.position(t).is_some())
            .count()
    }
}

/// Documents of `corpus` labeled `trait_name = pole`, sampled down to
/// `sample_size` with a seeded generator, keeping corpus order.
pub fn sample_pole_documents(
    corpus: &Corpus,
    trait_name: &str,
    pole: &str,
    sample_size: usize,
    seed: u64,
) -> Result<Vec<Document>> {
    let labeled: Vec<&Document> = corpus
        .documents()
        .iter()
        .filter(|d| d.label(trait_name) == Some(pole))
        .collect();
    if labeled.len() < sample_size {
        return Err(Error::InsufficientDocuments {
            trait_name: trait_name.to_string(),
            pole: pole.to_string(),
            needed: sample_size,
            found: labeled.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, labeled.len(), sample_size).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| labeled[i].clone()).collect())
}

/// Fits one pole model: sample, build the top-`vocab_size` vocabulary of the
/// sample, apply log damping, digamma length normalization and column
/// z-scores, then take the rank-`k` SVD.
pub fn fit_pole_model(corpus: &Corpus, trait_name: &str, pole: &str, config: &FitConfig) -> Result<SvdModel> {
    if config.sample_size < 2 {
        return Err(Error::Validation("sample_size must be at least 2".into()));
    }
    if config.k == 0 || config.vocab_size == 0 {
        return Err(Error::Validation("k and vocab_size must be positive".into()));
    }
    let max = config.sample_size.min(config.vocab_size);
    if config.k > max {
        return Err(Error::RankTooLarge { k: config.k, max });
    }
    let docs = sample_pole_documents(corpus, trait_name, pole, config.sample_size, config.seed)?;
    let sample = Corpus::new(corpus.source_name(), docs)?;
    let vocabulary = build_vocabulary(&sample, config.vocab_size)?;
    if config.k > vocabulary.len() {
        return Err(Error::RankTooLarge {
            k: config.k,
            max: vocabulary.len(),
        });
    }
    let counts = build_matrix(&sample, &vocabulary);
    let plan = NormalizationPlan::log_digamma_zscore();
    let (normalized, params) = plan.apply(&counts)?;
    let pipeline = plan.with_zscore_params(params.expect("plan contains zscore"))?;
    let a = DMatrix::from_row_slice(normalized.n_rows(), normalized.n_cols(), normalized.values());
    SvdModel::from_matrix(pole, a, config.k, vocabulary, pipeline)
}

/// Word factors after appending `test_rows` (q × m, already on the model's
/// scale) to the training matrix, without refactorizing:
///
/// `V̂ = Â' (U⁺)' S⁻¹`, where `Â` is the training matrix with the test rows
/// appended and `U⁺ = (U_aug' U_aug)⁻¹ U_aug'` is the Moore-Penrose inverse
/// of `U` extended by the test rows' projections `a V S⁻¹`.
///
/// With q = 0 this reproduces `V`.
pub fn fold_in_v(model: &SvdModel, test_rows: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = model.n_words();
    if test_rows.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: test_rows.ncols(),
        });
    }
    if test_rows.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("test rows"));
    }
    let n = model.n_docs();
    let q = test_rows.nrows();
    let k = model.k();
    let s_inv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, model.s.iter().map(|s| 1.0 / s)));

    let projected = test_rows * &model.v * &s_inv;
    let mut u_aug = DMatrix::zeros(n + q, k);
    u_aug.rows_mut(0, n).copy_from(&model.u);
    u_aug.rows_mut(n, q).copy_from(&projected);

    let mut a_hat = DMatrix::zeros(n + q, m);
    a_hat.rows_mut(0, n).copy_from(&model.training);
    a_hat.rows_mut(n, q).copy_from(test_rows);

    let gram = u_aug.transpose() * &u_aug;
    let chol = Cholesky::new(gram).ok_or(Error::NonFinite("U'U is not positive definite"))?;
    // (U⁺)' = U_aug (U_aug'U_aug)⁻¹, computed as the transpose of a solve.
    let pinv = chol.solve(&u_aug.transpose());
    Ok(a_hat.transpose() * pinv.transpose() * s_inv)
}

/// `‖V − V̂‖_F` for a single appended row.
pub fn norm_delta(model: &SvdModel, test_row: &[f64]) -> Result<f64> {
    if test_row.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("test row"));
    }
    let row = DMatrix::from_row_slice(1, test_row.len(), test_row);
    let v_hat = fold_in_v(model, &row)?;
    Ok((&model.v - v_hat).norm())
}
