//! Lexicons of three kinds: unipolar category lists, bipolar pairs (two
//! unipolar lexicons linked through `polarity_partner`) and weighted
//! semantic-differential dimensions.
//!
//! Two on-disk formats are supported, both UTF-8, TAB-separated, without a
//! header, with `#` comment lines:
//!
//! - word-category-flag: `word\tcategory\t{0|1}` (NRC word-emotion layout)
//! - word-weight: `word\tweight`, weight a decimal in [-1, 1]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WISH_DATA: &str = include_str!("../data/wish.txt");
const PREFERENCE_DATA: &str = include_str!("../data/preference.txt");

/// NRC categories forming the bundled `emotions` group, in reporting order.
pub const EMOTION_CATEGORIES: [&str; 7] = ["anger", "disgust", "fear", "sadness", "anticipation", "joy", "surprise"];

/// Prefix given to lexicons loaded from an NRC-style category file.
pub const NRC_PREFIX: &str = "nrc.";

/// Osgood semantic-differential axes.
pub const OSGOOD_AXES: [&str; 3] = ["evaluation", "activity", "potency"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconKind {
    /// Membership list; every weight is exactly 1.0.
    Unipolar,
    /// Signed per-word loadings in [-1, 1].
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconFormat {
    /// Three columns; rows whose category equals `category` and whose flag is
    /// 1 become entries.
    CategoryFlag { category: String },
    /// Two columns, word and weight.
    WordWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    name: String,
    kind: LexiconKind,
    entries: BTreeMap<String, f64>,
    polarity_partner: Option<String>,
}

fn check_word(word: &str) -> Result<String> {
    let folded = word.to_lowercase();
    if folded.is_empty() {
        return Err(Error::Validation("empty lexicon word".into()));
    }
    if folded.chars().any(char::is_whitespace) {
        return Err(Error::Validation(format!("lexicon word `{word}` contains whitespace")));
    }
    Ok(folded)
}

impl Lexicon {
    /// Builds a unipolar lexicon from a word list. Duplicates after case
    /// folding collapse to one entry.
    pub fn unipolar<I, S>(name: impl Into<String>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries = BTreeMap::new();
        for w in words {
            entries.insert(check_word(w.as_ref())?, 1.0);
        }
        Self::validated(name.into(), LexiconKind::Unipolar, entries)
    }

    /// Builds a weighted lexicon. Duplicate words are an error.
    pub fn weighted<I, S>(name: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut map = BTreeMap::new();
        for (w, weight) in entries {
            let word = check_word(w.as_ref())?;
            if map.insert(word.clone(), weight).is_some() {
                return Err(Error::Validation(format!("duplicate word `{word}`")));
            }
        }
        Self::validated(name.into(), LexiconKind::Weighted, map)
    }

    fn validated(name: String, kind: LexiconKind, entries: BTreeMap<String, f64>) -> Result<Self> {
        if name.is_empty() {
            return Err(Error::Validation("lexicon name is empty".into()));
        }
        if entries.is_empty() {
            return Err(Error::Validation(format!("lexicon `{name}` is empty")));
        }
        for (word, &w) in &entries {
            if !w.is_finite() {
                return Err(Error::Validation(format!("weight of `{word}` is not finite")));
            }
            match kind {
                LexiconKind::Unipolar if w != 1.0 => {
                    return Err(Error::Validation(format!(
                        "unipolar lexicon `{name}` has weight {w} for `{word}`"
                    )))
                }
                LexiconKind::Weighted if w.abs() > 1.0 => {
                    return Err(Error::Validation(format!("weight {w} of `{word}` outside [-1, 1]")))
                }
                _ => {}
            }
        }
        Ok(Lexicon {
            name,
            kind,
            entries,
            polarity_partner: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LexiconKind {
        self.kind
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// Weight of `word`, 0 when absent.
    pub fn weight(&self, word: &str) -> f64 {
        self.entries.get(word).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = LexiconEntry> + '_ {
        self.entries.iter().map(|(w, &weight)| LexiconEntry {
            word: w.clone(),
            weight,
        })
    }

    pub fn polarity_partner(&self) -> Option<&str> {
        self.polarity_partner.as_deref()
    }

    /// Same entries with every weight negated. Only meaningful for weighted
    /// lexicons.
    pub fn negated(&self) -> Result<Lexicon> {
        if self.kind != LexiconKind::Weighted {
            return Err(Error::Validation(format!(
                "cannot negate unipolar lexicon `{}`",
                self.name
            )));
        }
        Lexicon::weighted(self.name.clone(), self.entries.iter().map(|(w, &v)| (w.as_str(), -v)))
    }

    /// Serializes in the file format matching the lexicon's kind; the
    /// category column of a unipolar lexicon is its name.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (word, weight) in &self.entries {
            match self.kind {
                LexiconKind::Unipolar => writeln!(out, "{word}\t{}\t1", self.name),
                LexiconKind::Weighted => writeln!(out, "{word}\t{weight}"),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// The format that [`Lexicon::to_file_string`] produces.
    pub fn file_format(&self) -> LexiconFormat {
        match self.kind {
            LexiconKind::Unipolar => LexiconFormat::CategoryFlag {
                category: self.name.clone(),
            },
            LexiconKind::Weighted => LexiconFormat::WordWeight,
        }
    }
}

/// Splits `text` into numbered, non-comment, non-blank lines.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_flag(path: &Path, line: usize, flag: &str) -> Result<bool> {
    match flag.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(parse_error(path, line, format!("flag must be 0 or 1, found `{other}`"))),
    }
}

/// Parses lexicon text. `path` is only used in error messages.
pub fn parse_lexicon(text: &str, path: &Path, format: &LexiconFormat, name: &str) -> Result<Lexicon> {
    match format {
        LexiconFormat::CategoryFlag { category } => {
            let mut seen = HashSet::new();
            let mut words = Vec::new();
            for (line, content) in data_lines(text) {
                let fields: Vec<&str> = content.split('\t').collect();
                if fields.len() != 3 {
                    return Err(parse_error(
                        path,
                        line,
                        format!("expected 3 tab-separated fields, found {}", fields.len()),
                    ));
                }
                let flag = parse_flag(path, line, fields[2])?;
                if fields[1] != category {
                    continue;
                }
                let word = check_word(fields[0]).map_err(|e| parse_error(path, line, e.to_string()))?;
                if !seen.insert(word.clone()) {
                    return Err(parse_error(path, line, format!("duplicate word `{word}`")));
                }
                if flag {
                    words.push(word);
                }
            }
            Lexicon::unipolar(name, words)
        }
        LexiconFormat::WordWeight => {
            let mut entries: BTreeMap<String, f64> = BTreeMap::new();
            for (line, content) in data_lines(text) {
                let fields: Vec<&str> = content.split('\t').collect();
                if fields.len() != 2 {
                    return Err(parse_error(
                        path,
                        line,
                        format!("expected 2 tab-separated fields, found {}", fields.len()),
                    ));
                }
                let word = check_word(fields[0]).map_err(|e| parse_error(path, line, e.to_string()))?;
                let weight: f64 = fields[1]
                    .trim()
                    .parse()
                    .map_err(|_| parse_error(path, line, format!("invalid weight `{}`", fields[1])))?;
                if !weight.is_finite() || weight.abs() > 1.0 {
                    return Err(Error::Validation(format!(
                        "{}:{line}: weight {weight} of `{word}` outside [-1, 1]",
                        path.display()
                    )));
                }
                if entries.insert(word.clone(), weight).is_some() {
                    return Err(parse_error(path, line, format!("duplicate word `{word}`")));
                }
            }
            Lexicon::validated(name.to_string(), LexiconKind::Weighted, entries)
        }
    }
}

pub fn load_lexicon_file(path: impl AsRef<Path>, format: &LexiconFormat, name: &str) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text, path, format, name)
}

/// Parses every category of a word-category-flag file in one pass. Lexicon
/// names are `prefix` + category. Categories with no flagged word are
/// omitted.
pub fn parse_category_file(text: &str, path: &Path, prefix: &str) -> Result<Vec<Lexicon>> {
    let mut by_category: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_error(
                path,
                line,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let flag = parse_flag(path, line, fields[2])?;
        let word = check_word(fields[0]).map_err(|e| parse_error(path, line, e.to_string()))?;
        let category = fields[1].trim().to_string();
        if !seen.insert((word.clone(), category.clone())) {
            return Err(parse_error(
                path,
                line,
                format!("duplicate row for `{word}` / `{category}`"),
            ));
        }
        let slot = by_category.entry(category).or_default();
        if flag {
            slot.push(word);
        }
    }
    by_category
        .into_iter()
        .filter(|(_, words)| !words.is_empty())
        .map(|(cat, words)| Lexicon::unipolar(format!("{prefix}{cat}"), words))
        .collect()
}

/// Parses a four-column Osgood dimension file, `word\tevaluation\tactivity\tpotency`,
/// into three weighted lexicons named `osgood.<axis>`.
pub fn parse_osgood_file(text: &str, path: &Path) -> Result<[Lexicon; 3]> {
    let mut columns: [Vec<(String, f64)>; 3] = Default::default();
    let mut seen = HashSet::new();
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_error(
                path,
                line,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let word = check_word(fields[0]).map_err(|e| parse_error(path, line, e.to_string()))?;
        if !seen.insert(word.clone()) {
            return Err(parse_error(path, line, format!("duplicate word `{word}`")));
        }
        for (axis, raw) in fields[1..].iter().enumerate() {
            let weight: f64 = raw
                .trim()
                .parse()
                .map_err(|_| parse_error(path, line, format!("invalid weight `{raw}`")))?;
            if !weight.is_finite() || weight.abs() > 1.0 {
                return Err(Error::Validation(format!(
                    "{}:{line}: weight {weight} of `{word}` outside [-1, 1]",
                    path.display()
                )));
            }
            columns[axis].push((word.clone(), weight));
        }
    }
    let [e, a, p] = columns;
    Ok([
        Lexicon::weighted("osgood.evaluation", e)?,
        Lexicon::weighted("osgood.activity", a)?,
        Lexicon::weighted("osgood.potency", p)?,
    ])
}

pub fn load_osgood_file(path: impl AsRef<Path>) -> Result<[Lexicon; 3]> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_osgood_file(&text, path)
}

/// Named lexicons plus ordered groups of them. Immutable once shared.
#[derive(Debug, Clone, Default)]
pub struct LexiconRegistry {
    lexicons: BTreeMap<String, Lexicon>,
    groups: BTreeMap<String, Vec<String>>,
}

impl LexiconRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lexicon: Lexicon) -> Result<()> {
        if self.lexicons.contains_key(lexicon.name()) {
            return Err(Error::Validation(format!(
                "lexicon `{}` already registered",
                lexicon.name()
            )));
        }
        self.lexicons.insert(lexicon.name.clone(), lexicon);
        Ok(())
    }

    /// Marks two loaded unipolar lexicons as the opposing poles of one
    /// dimension. The relation is stored on both sides.
    pub fn link_polarity(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::Validation(format!("lexicon `{a}` cannot be its own partner")));
        }
        for name in [a, b] {
            let lex = self.get(name)?;
            if lex.kind != LexiconKind::Unipolar {
                return Err(Error::Validation(format!(
                    "polarity partners must be unipolar; `{name}` is weighted"
                )));
            }
            if let Some(existing) = lex.polarity_partner() {
                if existing != a && existing != b {
                    return Err(Error::Validation(format!(
                        "`{name}` is already partnered with `{existing}`"
                    )));
                }
            }
        }
        self.lexicons.get_mut(a).expect("checked").polarity_partner = Some(b.to_string());
        self.lexicons.get_mut(b).expect("checked").polarity_partner = Some(a.to_string());
        Ok(())
    }

    pub fn define_group<I, S>(&mut self, group: &str, members: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let members: Vec<String> = members.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return Err(Error::Validation(format!("group `{group}` is empty")));
        }
        let mut seen = HashSet::new();
        for m in &members {
            self.get(m)?;
            if !seen.insert(m) {
                return Err(Error::Validation(format!("group `{group}` lists `{m}` twice")));
            }
        }
        self.groups.insert(group.to_string(), members);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Lexicon> {
        self.lexicons
            .get(name)
            .ok_or_else(|| Error::UnknownLexicon(name.to_string()))
    }

    pub fn lexicons(&self) -> &BTreeMap<String, Lexicon> {
        &self.lexicons
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<String>> {
        &self.groups
    }

    /// Members of `group`, in group order.
    pub fn group(&self, group: &str) -> Result<Vec<&Lexicon>> {
        let names = self
            .groups
            .get(group)
            .ok_or_else(|| Error::UnknownGroup(group.to_string()))?;
        names.iter().map(|n| self.get(n)).collect()
    }

    /// Adds every category of an NRC-style word-category-flag file under the
    /// `nrc.` prefix. Defines the `emotions` group when all seven emotion
    /// categories are present, and the `mood` group (positive/negative,
    /// linked as polarity partners) when both sentiment categories are.
    /// Other categories, such as trust, are loaded but left ungrouped.
    pub fn add_category_file(&mut self, text: &str, path: &Path) -> Result<()> {
        let lexicons = parse_category_file(text, path, NRC_PREFIX)?;
        for lex in lexicons {
            self.insert(lex)?;
        }
        let nrc = |c: &str| format!("{NRC_PREFIX}{c}");
        if EMOTION_CATEGORIES.iter().all(|c| self.lexicons.contains_key(&nrc(c))) {
            self.define_group("emotions", EMOTION_CATEGORIES.iter().map(|c| nrc(c)))?;
        }
        let (pos, neg) = (nrc("positive"), nrc("negative"));
        if self.lexicons.contains_key(&pos) && self.lexicons.contains_key(&neg) {
            self.link_polarity(&pos, &neg)?;
            self.define_group("mood", [pos, neg])?;
        }
        Ok(())
    }

    pub fn load_category_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.add_category_file(&text, path)
    }

    /// Registers the three Osgood axes and the `osgood` group.
    pub fn add_osgood(&mut self, axes: [Lexicon; 3]) -> Result<()> {
        let names: Vec<String> = axes.iter().map(|l| l.name().to_string()).collect();
        for lex in axes {
            self.insert(lex)?;
        }
        self.define_group("osgood", names)
    }
}

fn bundled(name: &str, data: &str) -> Lexicon {
    let words = data_lines(data).map(|(_, l)| l.trim());
    Lexicon::unipolar(name, words).expect("bundled lexicon data is valid")
}

/// Registry holding the lexicons that ship with the crate: `wish` (28 words)
/// and `preference` (13 words), grouped as `wishes`, `preferences` and
/// `desire` (both).
pub fn bundled_lexicons() -> LexiconRegistry {
    let mut reg = LexiconRegistry::new();
    reg.insert(bundled("wish", WISH_DATA)).expect("unique");
    reg.insert(bundled("preference", PREFERENCE_DATA)).expect("unique");
    reg.define_group("wishes", ["wish"]).expect("resolvable");
    reg.define_group("preferences", ["preference"]).expect("resolvable");
    reg.define_group("desire", ["wish", "preference"]).expect("resolvable");
    reg
}

/// Plain word → weight view, for callers that need a hash map.
pub fn weight_map(lexicon: &Lexicon) -> HashMap<&str, f64> {
    lexicon.entries.iter().map(|(w, &v)| (w.as_str(), v)).collect()
}
