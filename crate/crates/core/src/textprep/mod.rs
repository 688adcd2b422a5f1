//! Tweet text normalization: URL/mention stripping, casefolding, alphabetic
//! tokenization, stopword removal and Porter stemming.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryTaxonomy, Tweet};
use crate::error::{Error, Result};

pub mod porter;

pub use porter::stem;

/// Shipped default English stopword list.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// Unicode default case folding.
pub fn casefold(s: &str) -> String {
    caseless::default_case_fold_str(s)
}

/// One casefolded word per line; blank lines and `#` comments ignored.
pub fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(casefold)
        .collect()
}

pub fn load_word_list(path: &Path) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_word_list(&text))
}

#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    pub stopwords: HashSet<String>,
    pub stem: bool,
    pub min_len: usize,
}

impl NormalizationConfig {
    pub fn new(stopwords: HashSet<String>, stem: bool) -> Self {
        NormalizationConfig {
            stopwords,
            stem,
            min_len: 2,
        }
    }

    pub fn with_default_stopwords(stem: bool) -> Self {
        Self::new(parse_word_list(DEFAULT_STOPWORDS), stem)
    }

    fn keep(&self, token: &str) -> bool {
        token.chars().count() >= self.min_len && !self.stopwords.contains(token)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub tweet_id: String,
    pub tokens: Vec<String>,
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z][A-Za-z0-9+.\-]*://\S*").unwrap())
}

fn mention_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").unwrap())
}

/// Runs the fixed pipeline: strip URLs, mentions and `#`; casefold; split on
/// non-alphabetic characters; drop short tokens and stopwords; stem.
///
/// A stem can itself be short or a stopword (`hers -> her`), so the length
/// and stopword filters are applied again after stemming.
pub fn normalize(text: &str, config: &NormalizationConfig) -> Vec<String> {
    let stripped = url_pattern().replace_all(text, " ");
    let stripped = mention_pattern().replace_all(&stripped, " ");
    let stripped = stripped.replace('#', " ");
    let folded = casefold(&stripped);
    folded
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| config.keep(t))
        .map(|t| if config.stem { stem(t) } else { t.to_string() })
        .filter(|t| config.keep(t))
        .collect()
}

pub fn tokenize(tweet: &Tweet, config: &NormalizationConfig) -> TokenizedDoc {
    TokenizedDoc {
        tweet_id: tweet.id.clone(),
        tokens: normalize(&tweet.text, config),
    }
}

pub fn tokenize_corpus(corpus: &[Tweet], config: &NormalizationConfig) -> Vec<TokenizedDoc> {
    corpus.iter().map(|t| tokenize(t, config)).collect()
}

/// Splits a hashtag body at underscores, letter/digit transitions, lower to
/// upper case changes and the end of an upper-case run (`COVIDIdiots` gives
/// `COVID`, `Idiots`). Components are casefolded.
pub fn split_hashtag(raw: &str) -> Vec<String> {
    let chars: Vec<char> = raw.trim_start_matches('#').chars().collect();
    let mut parts = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || !(c.is_alphanumeric()) {
            if !current.is_empty() {
                parts.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|p| chars.get(p)) {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_alphabetic() && c.is_numeric())
                || (prev.is_numeric() && c.is_alphabetic())
                || (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase() && c.is_uppercase() && next.is_some_and(char::is_lowercase));
            if boundary && !current.is_empty() {
                parts.push(std::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        parts.push(current);
    }
    parts.iter().map(|p| casefold(p)).collect()
}

/// Removes tokens that merely echo a taxonomy hashtag, a component of one,
/// or a user-supplied exclusion (places, officials).
///
/// Matching is on stemmed forms. A token is removed when either the token or
/// its stem equals the stem (or the plain form) of an echo, so the filter
/// works on stemmed and unstemmed token streams alike.
#[derive(Debug, Clone, Default)]
pub struct EchoFilter {
    forms: HashSet<String>,
}

impl EchoFilter {
    pub fn new(taxonomy: &CategoryTaxonomy, exclusions: &HashSet<String>) -> Self {
        let mut filter = EchoFilter::default();
        for category in taxonomy.categories() {
            for tag in &category.hashtags {
                filter.add(tag);
            }
            for raw in &category.raw_tags {
                for part in split_hashtag(raw) {
                    filter.add(&part);
                }
            }
        }
        for word in exclusions {
            filter.add(&casefold(word.trim()));
        }
        filter
    }

    fn add(&mut self, form: &str) {
        if form.is_empty() {
            return;
        }
        self.forms.insert(stem(form));
        self.forms.insert(form.to_string());
    }

    pub fn is_echo(&self, token: &str) -> bool {
        self.forms.contains(token) || self.forms.contains(&stem(token))
    }

    pub fn apply(&self, tokens: Vec<String>) -> Vec<String> {
        tokens.into_iter().filter(|t| !self.is_echo(t)).collect()
    }
}

pub fn filter_category_echo(
    tokens: Vec<String>,
    taxonomy: &CategoryTaxonomy,
    exclusions: &HashSet<String>,
) -> Vec<String> {
    EchoFilter::new(taxonomy, exclusions).apply(tokens)
}
