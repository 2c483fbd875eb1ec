//! Tokenization, corpora and document-word count matrices.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::Step;

pub const URL_TOKEN: &str = "-url-";
pub const MENTION_TOKEN: &str = "-mention-";

/// Document-frequency threshold used when rare-word removal is requested
/// without an explicit value.
pub const DEFAULT_MIN_DOC_FREQ: usize = 5;

fn is_mention(token: &str) -> bool {
    if let Some(rest) = token.strip_prefix('@') {
        return !rest.is_empty() && rest.chars().all(|c| c.is_alphanumeric() || c == '_');
    }
    if let Some(digits) = token.strip_prefix("user") {
        return !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit());
    }
    false
}

/// Splits raw text into lowercase tokens.
///
/// Tokens are whitespace-separated; leading and trailing non-alphanumeric
/// characters are stripped while interior ones (apostrophes, hyphens) stay.
/// URLs become [`URL_TOKEN`] and `@name` / `user<digits>` handles become
/// [`MENTION_TOKEN`]. The placeholders themselves pass through unchanged.
pub fn tokenize(raw_text: &str) -> Vec<String> {
    raw_text
        .split_whitespace()
        .filter_map(|chunk| {
            let lower = chunk.to_lowercase();
            if lower == URL_TOKEN || lower == MENTION_TOKEN {
                return Some(lower);
            }
            let tail = lower.trim_end_matches(|c: char| !c.is_alphanumeric());
            let handle = tail.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '@');
            if is_mention(handle) {
                return Some(MENTION_TOKEN.to_string());
            }
            let core = handle.trim_start_matches(|c: char| !c.is_alphanumeric());
            if core.is_empty() {
                None
            } else if core.starts_with("http") || core.starts_with("www") {
                Some(URL_TOKEN.to_string())
            } else {
                Some(core.to_string())
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    pub tokens: Vec<String>,
    /// Trait name → pole name, e.g. `extraversion` → `y`.
    pub labels: BTreeMap<String, String>,
}

impl Document {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let tokens = tokenize(&raw_text);
        Document {
            id: id.into(),
            raw_text,
            tokens,
            labels: BTreeMap::new(),
        }
    }

    /// Builds a document from already tokenized text; `raw_text` is the
    /// tokens joined by spaces.
    pub fn from_tokens<I, S>(id: impl Into<String>, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        Document {
            id: id.into(),
            raw_text: tokens.join(" "),
            tokens,
            labels: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, trait_name: impl Into<String>, pole: impl Into<String>) -> Self {
        self.labels.insert(trait_name.into(), pole.into());
        self
    }

    pub fn label(&self, trait_name: &str) -> Option<&str> {
        self.labels.get(trait_name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    source_name: String,
    documents: Vec<Document>,
}

impl Corpus {
    /// Fails if two documents share an id.
    pub fn new(source_name: impl Into<String>, documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::Validation(format!("duplicate document id `{}`", d.id)));
            }
            if d.tokens
                .iter()
                .any(|t| t.is_empty() || t.chars().any(char::is_whitespace))
            {
                return Err(Error::Validation(format!(
                    "document `{}` has an empty or whitespace-bearing token",
                    d.id
                )));
            }
        }
        Ok(Corpus {
            source_name: source_name.into(),
            documents,
        })
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    pub fn mean_tokens(&self) -> f64 {
        if self.documents.is_empty() {
            0.0
        } else {
            self.token_count() as f64 / self.documents.len() as f64
        }
    }

    /// Documents matching `keep`, in original order.
    pub fn filter(&self, keep: impl Fn(&Document) -> bool) -> Corpus {
        Corpus {
            source_name: self.source_name.clone(),
            documents: self.documents.iter().filter(|d| keep(d)).cloned().collect(),
        }
    }

    /// Label values present for `trait_name`, sorted.
    pub fn poles(&self, trait_name: &str) -> Vec<String> {
        let set: std::collections::BTreeSet<&str> = self.documents.iter().filter_map(|d| d.label(trait_name)).collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Trait names appearing on any document, sorted.
    pub fn traits(&self) -> Vec<String> {
        let set: std::collections::BTreeSet<&str> = self
            .documents
            .iter()
            .flat_map(|d| d.labels.keys().map(String::as_str))
            .collect();
        set.into_iter().map(str::to_string).collect()
    }
}

/// Reads one document per line; the 1-based line number is the id.
pub fn read_plain_text(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_plain_text(&text, &path.display().to_string()))
}

pub fn parse_plain_text(text: &str, source_name: &str) -> Corpus {
    let documents = text
        .lines()
        .enumerate()
        .map(|(i, line)| Document::new((i + 1).to_string(), line.strip_suffix('\r').unwrap_or(line)))
        .collect();
    Corpus {
        source_name: source_name.to_string(),
        documents,
    }
}

/// Which CSV columns hold the id and the text. Every other column is read as
/// a trait label; empty cells mean "unlabeled".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvColumns {
    pub id: String,
    pub text: String,
}

impl Default for CsvColumns {
    fn default() -> Self {
        CsvColumns {
            id: "id".into(),
            text: "text".into(),
        }
    }
}

pub fn read_csv(path: impl AsRef<Path>, columns: &CsvColumns) -> Result<Corpus> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, columns, &path.display().to_string())
}

pub fn parse_csv<R: std::io::Read>(reader: R, columns: &CsvColumns, source_name: &str) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Validation(format!("{source_name}: missing required column `{name}`")))
    };
    let id_col = find(&columns.id)?;
    let text_col = find(&columns.text)?;
    let mut documents = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let mut doc = Document::new(&record[id_col], &record[text_col]);
        for (i, header) in headers.iter().enumerate() {
            if i == id_col || i == text_col {
                continue;
            }
            let value = record.get(i).unwrap_or("").trim();
            if !value.is_empty() {
                doc.labels.insert(header.to_string(), value.to_string());
            }
        }
        documents.push(doc);
    }
    Corpus::new(source_name, documents)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RareWordReport {
    pub removed_types: usize,
    pub removed_tokens: usize,
}

/// Deletes every token whose document frequency is below `min_doc_freq`.
pub fn remove_rare_words(corpus: &Corpus, min_doc_freq: usize) -> Result<(Corpus, RareWordReport)> {
    if min_doc_freq == 0 {
        return Err(Error::Validation("min_doc_freq must be at least 1".into()));
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in &corpus.documents {
        let distinct: HashSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    let rare: HashSet<&str> = df.iter().filter(|(_, &n)| n < min_doc_freq).map(|(&t, _)| t).collect();
    let mut report = RareWordReport {
        removed_types: rare.len(),
        removed_tokens: 0,
    };
    let documents = corpus
        .documents
        .iter()
        .map(|doc| {
            let tokens: Vec<String> = doc
                .tokens
                .iter()
                .filter(|t| !rare.contains(t.as_str()))
                .cloned()
                .collect();
            report.removed_tokens += doc.tokens.len() - tokens.len();
            Document { tokens, ..doc.clone() }
        })
        .collect();
    Ok((
        Corpus {
            source_name: corpus.source_name.clone(),
            documents,
        },
        report,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Fails on an empty list or duplicate words.
    pub fn new(words: Vec<String>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate vocabulary word `{w}`")));
            }
        }
        Ok(Vocabulary { words, index })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn position(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// SHA-256 over the newline-joined word list, hex encoded.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for w in &self.words {
            hasher.update(w.as_bytes());
            hasher.update(b"\n");
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// One word per line.
    pub fn to_file_string(&self) -> String {
        let mut s = self.words.join("\n");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        Vocabulary::new(text.lines().filter(|l| !l.is_empty()).map(str::to_string).collect())
    }
}

/// Most frequent words of the corpus, by total count descending and then
/// lexicographically, truncated to `max_size`.
pub fn build_vocabulary(corpus: &Corpus, max_size: usize) -> Result<Vocabulary> {
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for t in corpus.documents.iter().flat_map(|d| d.tokens.iter()) {
        *freq.entry(t.as_str()).or_default() += 1;
    }
    if freq.is_empty() || max_size == 0 {
        return Err(Error::EmptyVocabulary);
    }
    let mut ranked: Vec<(&str, usize)> = freq.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_size);
    Vocabulary::new(ranked.into_iter().map(|(w, _)| w.to_string()).collect())
}

/// Dense documents × vocabulary matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DocWordMatrix {
    rows: Vec<String>,
    vocabulary: Vocabulary,
    values: Vec<f64>,
    doc_lengths: Vec<usize>,
    normalization_state: Vec<Step>,
}

impl DocWordMatrix {
    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn doc_lengths(&self) -> &[usize] {
        &self.doc_lengths
    }

    pub fn normalization_state(&self) -> &[Step] {
        &self.normalization_state
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.n_cols();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols())
    }

    /// Returns a copy whose entries are transformed row by row. `f` receives
    /// the row index and the mutable row.
    pub(crate) fn map_rows(&self, step: Step, mut f: impl FnMut(usize, &mut [f64])) -> Self {
        let mut out = self.clone();
        let m = out.n_cols();
        for (i, row) in out.values.chunks_exact_mut(m).enumerate() {
            f(i, row);
        }
        out.normalization_state.push(step);
        out
    }

    /// Builds a matrix directly from row values, for callers that already
    /// hold numeric data. `values` is row-major.
    pub fn from_parts(
        rows: Vec<String>,
        vocabulary: Vocabulary,
        values: Vec<f64>,
        doc_lengths: Vec<usize>,
        normalization_state: Vec<Step>,
    ) -> Result<Self> {
        let expected = rows.len() * vocabulary.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        if doc_lengths.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: doc_lengths.len(),
            });
        }
        Ok(DocWordMatrix {
            rows,
            vocabulary,
            values,
            doc_lengths,
            normalization_state,
        })
    }
}

/// Counts vocabulary words per document. Document length counts every token,
/// including those outside the vocabulary.
pub fn build_matrix(corpus: &Corpus, vocabulary: &Vocabulary) -> DocWordMatrix {
    build_matrix_from_docs(&corpus.documents, vocabulary)
}

pub fn build_matrix_from_docs(documents: &[Document], vocabulary: &Vocabulary) -> DocWordMatrix {
    let m = vocabulary.len();
    let mut values = vec![0.0; documents.len() * m];
    for (i, doc) in documents.iter().enumerate() {
        let row = &mut values[i * m..(i + 1) * m];
        for t in &doc.tokens {
            if let Some(j) = vocabulary.position(t) {
                row[j] += 1.0;
            }
        }
    }
    DocWordMatrix {
        rows: documents.iter().map(|d| d.id.clone()).collect(),
        vocabulary: vocabulary.clone(),
        values,
        doc_lengths: documents.iter().map(|d| d.tokens.len()).collect(),
        normalization_state: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn tokenize_strips_punctuation_and_folds_case() {
        assert_eq!(
            tokenize("I'm happy, happy, HAPPY!"),
            toks(&["i'm", "happy", "happy", "happy"])
        );
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \t\n ").is_empty());
        assert!(tokenize(":) !!! ...").is_empty());
    }

    #[test]
    fn tokenize_keeps_placeholders() {
        assert_eq!(tokenize("see -URL- now"), toks(&["see", "-url-", "now"]));
    }

    #[test]
    fn tokenize_urls_and_mentions() {
        assert_eq!(
            tokenize("@bob: look http://x.co/a (www.example.com) user11735 man"),
            toks(&["-mention-", "look", "-url-", "-url-", "-mention-", "man"])
        );
        assert_eq!(tokenize("re-do it's"), toks(&["re-do", "it's"]));
        // "user" alone and "users" are ordinary words
        assert_eq!(tokenize("user users"), toks(&["user", "users"]));
    }

    #[test]
    fn rare_word_removal() {
        let corpus = Corpus::new(
            "t",
            vec![
                Document::from_tokens("1", ["a", "b"]),
                Document::from_tokens("2", ["a", "c"]),
            ],
        )
        .unwrap();
        let (same, report) = remove_rare_words(&corpus, 1).unwrap();
        assert_eq!(same, corpus);
        assert_eq!(report.removed_types, 0);

        let (pruned, report) = remove_rare_words(&corpus, 2).unwrap();
        assert_eq!(pruned.documents()[0].tokens, toks(&["a"]));
        assert_eq!(pruned.documents()[1].tokens, toks(&["a"]));
        assert_eq!(pruned.documents()[0].raw_text, "a b");
        assert_eq!(report.removed_types, 2);
        assert_eq!(report.removed_tokens, 2);
        assert!(remove_rare_words(&corpus, 0).is_err());
    }

    #[test]
    fn vocabulary_ranking_and_ties() {
        let corpus = Corpus::new("t", vec![Document::from_tokens("1", ["c", "a", "b", "a", "c", "a"])]).unwrap();
        assert_eq!(build_vocabulary(&corpus, 2).unwrap().words(), toks(&["a", "c"]));
        assert_eq!(build_vocabulary(&corpus, 10).unwrap().words(), toks(&["a", "c", "b"]));
        let tied = Corpus::new("t", vec![Document::from_tokens("1", ["z", "y", "x"])]).unwrap();
        assert_eq!(build_vocabulary(&tied, 3).unwrap().words(), toks(&["x", "y", "z"]));
    }

    #[test]
    fn empty_vocabulary_error() {
        let corpus = Corpus::new("t", vec![Document::new("1", "")]).unwrap();
        assert!(matches!(build_vocabulary(&corpus, 5), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn matrix_counts() {
        let vocab = Vocabulary::new(toks(&["happy", "joy", "sad"])).unwrap();
        let corpus = Corpus::new(
            "t",
            vec![
                Document::from_tokens("1", ["happy", "happy", "joy"]),
                Document::from_tokens("2", Vec::<String>::new()),
                Document::from_tokens("3", ["x", "y"]),
            ],
        )
        .unwrap();
        let m = build_matrix(&corpus, &vocab);
        assert_eq!(m.row(0), &[2.0, 1.0, 0.0]);
        assert_eq!(m.row(1), &[0.0, 0.0, 0.0]);
        assert_eq!(m.row(2), &[0.0, 0.0, 0.0]);
        assert_eq!(m.doc_lengths(), &[3, 0, 2]);
        assert!(m.normalization_state().is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let docs = vec![Document::new("1", "a"), Document::new("1", "b")];
        assert!(Corpus::new("t", docs).is_err());
    }

    #[test]
    fn csv_reader_labels() {
        let data = "id,text,extraversion,openness\n\
                    a,\"Hello, world\",y,\n\
                    b,bye now,n,y\n";
        let corpus = parse_csv(data.as_bytes(), &CsvColumns::default(), "mem").unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.documents()[0].tokens, toks(&["hello", "world"]));
        assert_eq!(corpus.documents()[0].label("extraversion"), Some("y"));
        assert_eq!(corpus.documents()[0].label("openness"), None);
        assert_eq!(corpus.poles("extraversion"), toks(&["n", "y"]));
        assert_eq!(corpus.traits(), toks(&["extraversion", "openness"]));
        let missing = parse_csv("id,body\n1,x\n".as_bytes(), &CsvColumns::default(), "mem");
        assert!(missing.is_err());
    }

    #[test]
    fn plain_text_ids_are_line_numbers() {
        let corpus = parse_plain_text("first line\n\nthird\n", "mem");
        let ids: Vec<&str> = corpus.documents().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["1", "2", "3"]);
        assert!(corpus.documents()[1].tokens.is_empty());
    }

    fn arb_corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
        prop::collection::vec(prop::collection::vec("[a-f]{1,2}", 0..15), 1..10)
    }

    proptest! {
        #[test]
        fn tokenize_idempotent(text in "[ a-zA-Z0-9,.!?'@:/-]{0,60}") {
            let once = tokenize(&text);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn rare_removal_never_grows_documents(docs in arb_corpus(), min_df in 1usize..4) {
            let corpus = Corpus::new(
                "p",
                docs.iter().enumerate().map(|(i, t)| Document::from_tokens(i.to_string(), t.clone())).collect(),
            ).unwrap();
            let (pruned, _) = remove_rare_words(&corpus, min_df).unwrap();
            prop_assert!(pruned.mean_tokens() <= corpus.mean_tokens());
            for (a, b) in pruned.documents().iter().zip(corpus.documents()) {
                prop_assert_eq!(&a.id, &b.id);
                prop_assert!(a.tokens.len() <= b.tokens.len());
            }
        }

        #[test]
        fn row_sums_equal_in_vocabulary_tokens(docs in arb_corpus(), max in 1usize..20) {
            let corpus = Corpus::new(
                "p",
                docs.iter().enumerate().map(|(i, t)| Document::from_tokens(i.to_string(), t.clone())).collect(),
            ).unwrap();
            prop_assume!(corpus.token_count() > 0);
            let vocab = build_vocabulary(&corpus, max).unwrap();
            let m = build_matrix(&corpus, &vocab);
            for (i, doc) in corpus.documents().iter().enumerate() {
                let in_vocab = doc.tokens.iter().filter(|t| vocab.position(t).is_some()).count();
                let sum: f64 = m.row(i).iter().sum();
                prop_assert_eq!(sum, in_vocab as f64);
                prop_assert!(sum <= m.doc_lengths()[i] as f64);
            }
        }

        #[test]
        fn vocabulary_independent_of_document_order(docs in arb_corpus(), max in 1usize..20) {
            let make = |order: &[usize]| Corpus::new(
                "p",
                order.iter().map(|&i| Document::from_tokens(i.to_string(), docs[i].clone())).collect(),
            ).unwrap();
            let forward: Vec<usize> = (0..docs.len()).collect();
            let backward: Vec<usize> = forward.iter().rev().copied().collect();
            let (a, b) = (make(&forward), make(&backward));
            prop_assume!(a.token_count() > 0);
            let va = build_vocabulary(&a, max).unwrap();
            prop_assert_eq!(&va, &build_vocabulary(&b, max).unwrap());
            let (ma, mb) = (build_matrix(&a, &va), build_matrix(&b, &va));
            for i in 0..docs.len() {
                prop_assert_eq!(ma.row(i), mb.row(docs.len() - 1 - i));
            }
        }
    }
}
