//! Seeded two-pole corpus generator for benchmarking the classifier.
//!
//! Each pole draws words uniformly from its own topic vocabulary; the two
//! vocabularies are disjoint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::textprep::{Corpus, Document};

pub const TRAIT_NAME: &str = "synthetic";
pub const POLES: [&str; 2] = ["pole_a", "pole_b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoPoleSpec {
    pub topic_words: usize,
    pub docs_per_pole: usize,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for TwoPoleSpec {
    fn default() -> Self {
        TwoPoleSpec {
            topic_words: 200,
            docs_per_pole: 150,
            min_len: 50,
            max_len: 200,
        }
    }
}

/// Word `index` of pole `pole`'s topic.
pub fn topic_word(pole: usize, index: usize) -> String {
    format!("p{pole}w{index:03}")
}

/// Generates `2 * docs_per_pole` documents labeled `synthetic = pole_a|pole_b`,
/// pole A first. Ids are `a0`, `a1`, … and `b0`, `b1`, ….
pub fn two_pole_corpus(spec: &TwoPoleSpec, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(2 * spec.docs_per_pole);
    for (p, pole) in POLES.iter().enumerate() {
        let prefix = if p == 0 { 'a' } else { 'b' };
        for i in 0..spec.docs_per_pole {
            let len = rng.random_range(spec.min_len..=spec.max_len);
            let tokens: Vec<String> = (0..len)
                .map(|_| topic_word(p, rng.random_range(0..spec.topic_words)))
                .collect();
            docs.push(Document::from_tokens(format!("{prefix}{i}"), tokens).with_label(TRAIT_NAME, *pole));
        }
    }
    Corpus::new("synthetic-two-pole", docs).expect("generated ids are unique")
}
