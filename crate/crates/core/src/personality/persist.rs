//! On-disk layout of a trained classifier.
//!
//! ```text
//! <dir>/manifest.json
//! <dir>/pole_a/{u,s,v,a}.bin  zscore.txt  vocabulary.txt
//! <dir>/pole_b/...
//! ```
//!
//! Matrix files: magic `AFMX`, little-endian `u32` version, `u64` rows,
//! `u64` cols, then row-major little-endian `f64` values. `a.bin` is the
//! z-scored training matrix, which fold-in needs.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::classifier::{DecisionRule, DimensionClassifier};
use super::model::{FitConfig, SvdModel};
use super::svd::orthonormality_error;
use crate::error::{Error, Result};
use crate::normalize::{NormalizationPlan, Step, ZScoreParams};
use crate::textprep::Vocabulary;

const MAGIC: &[u8; 4] = b"AFMX";
const MATRIX_VERSION: u32 = 1;
pub const MODEL_FORMAT_VERSION: u32 = 1;
const POLE_DIRS: [&str; 2] = ["pole_a", "pole_b"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub format_version: u32,
    #[serde(rename = "trait")]
    pub trait_name: String,
    pub poles: [String; 2],
    pub k: usize,
    pub pipeline: Vec<Step>,
    pub seed: u64,
    pub sample_size: usize,
    pub vocab_size: usize,
    pub decision_rule: DecisionRule,
}

pub fn encode_matrix(m: &DMatrix<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 8 * m.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&MATRIX_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    out
}

pub fn decode_matrix(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let bad = |msg: &str| Error::Model(format!("matrix file: {msg}"));
    if bytes.len() < 24 || &bytes[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != MATRIX_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes")) as usize;
    let body = &bytes[24..];
    if rows.checked_mul(cols).and_then(|n| n.checked_mul(8)) != Some(body.len()) {
        return Err(bad("body length does not match header"));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn save_pole(dir: &Path, model: &SvdModel) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let params = model
        .zscore_params()
        .ok_or_else(|| Error::Model("model has no z-score parameters".into()))?;
    write(&dir.join("u.bin"), &encode_matrix(&model.u))?;
    write(
        &dir.join("s.bin"),
        &encode_matrix(&DMatrix::from_row_slice(1, model.k(), &model.s)),
    )?;
    write(&dir.join("v.bin"), &encode_matrix(&model.v))?;
    write(&dir.join("a.bin"), &encode_matrix(&model.training))?;
    write(&dir.join("zscore.txt"), params.to_text().as_bytes())?;
    write(
        &dir.join("vocabulary.txt"),
        model.vocabulary.to_file_string().as_bytes(),
    )
}

fn load_pole(dir: &Path, pole: &str, manifest: &ModelManifest) -> Result<SvdModel> {
    let u = decode_matrix(&read(&dir.join("u.bin"))?)?;
    let s_mat = decode_matrix(&read(&dir.join("s.bin"))?)?;
    let v = decode_matrix(&read(&dir.join("v.bin"))?)?;
    let training = decode_matrix(&read(&dir.join("a.bin"))?)?;
    let zs_path = dir.join("zscore.txt");
    let zs_text = fs::read_to_string(&zs_path).map_err(|e| Error::io(&zs_path, e))?;
    let params = ZScoreParams::from_text(&zs_text)?;
    let vocab_path = dir.join("vocabulary.txt");
    let vocabulary = Vocabulary::parse(&fs::read_to_string(&vocab_path).map_err(|e| Error::io(&vocab_path, e))?)?;

    let k = manifest.k;
    let (n, m) = training.shape();
    let s: Vec<f64> = s_mat.iter().copied().collect();
    if s.len() != k || u.shape() != (n, k) || v.shape() != (m, k) || vocabulary.len() != m || params.len() != m {
        return Err(Error::Model(format!(
            "inconsistent factor dimensions for pole `{pole}`"
        )));
    }
    if params.vocabulary_fingerprint != vocabulary.fingerprint() {
        return Err(Error::VocabularyMismatch);
    }
    if s.iter().any(|x| !(*x > 0.0)) || s.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Model(format!(
            "singular values of `{pole}` are not positive and sorted"
        )));
    }
    if orthonormality_error(&u) > 1e-8 || orthonormality_error(&v) > 1e-8 {
        return Err(Error::Model(format!("factors of `{pole}` are not orthonormal")));
    }
    let pipeline = NormalizationPlan::new(manifest.pipeline.clone())?.with_zscore_params(params)?;
    Ok(SvdModel {
        pole_name: pole.to_string(),
        training,
        u,
        s,
        v,
        vocabulary,
        pipeline,
    })
}

/// Writes the classifier into `dir`, replacing any previous content. Files
/// are staged in a sibling directory and moved into place.
pub fn save_classifier(dir: impl AsRef<Path>, classifier: &DimensionClassifier, config: &FitConfig) -> Result<()> {
    let dir = dir.as_ref();
    let parent = dir
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let name = dir
        .file_name()
        .ok_or_else(|| Error::Validation(format!("invalid model directory {}", dir.display())))?;
    let staging: PathBuf = parent.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;

    let manifest = ModelManifest {
        format_version: MODEL_FORMAT_VERSION,
        trait_name: classifier.trait_name.clone(),
        poles: [
            classifier.model_a.pole_name.clone(),
            classifier.model_b.pole_name.clone(),
        ],
        k: classifier.model_a.k(),
        pipeline: classifier.model_a.pipeline.steps().to_vec(),
        seed: config.seed,
        sample_size: config.sample_size,
        vocab_size: config.vocab_size,
        decision_rule: classifier.rule,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
    write(&staging.join("manifest.json"), json.as_bytes())?;
    save_pole(&staging.join(POLE_DIRS[0]), &classifier.model_a)?;
    save_pole(&staging.join(POLE_DIRS[1]), &classifier.model_b)?;

    if dir.exists() {
        fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::rename(&staging, dir).map_err(|e| Error::io(dir, e))
}

pub fn load_manifest(dir: impl AsRef<Path>) -> Result<ModelManifest> {
    let path = dir.as_ref().join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: ModelManifest = serde_json::from_str(&text).map_err(|e| Error::Model(format!("manifest: {e}")))?;
    if manifest.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Model(format!(
            "unsupported model format version {}",
            manifest.format_version
        )));
    }
    Ok(manifest)
}

pub fn load_classifier(dir: impl AsRef<Path>) -> Result<DimensionClassifier> {
    let dir = dir.as_ref();
    let manifest = load_manifest(dir)?;
    let a = load_pole(&dir.join(POLE_DIRS[0]), &manifest.poles[0], &manifest)?;
    let b = load_pole(&dir.join(POLE_DIRS[1]), &manifest.poles[1], &manifest)?;
    Ok(DimensionClassifier::new(manifest.trait_name.clone(), a, b)?.with_rule(manifest.decision_rule))
}
