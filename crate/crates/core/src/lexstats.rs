//! Per-category word statistics: common and distinctive unigrams, Pearson
//! chi-squared bigram collocations and group-level TF-IDF.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

pub type Bigram = (String, String);

/// Unigram and adjacent-pair counts for one category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupLexicon {
    pub category: String,
    pub unigram_counts: HashMap<String, u64>,
    pub bigram_counts: HashMap<Bigram, u64>,
    /// c(w, ·): bigram positions whose first token is `w`.
    pub left_counts: HashMap<String, u64>,
    /// c(·, w): bigram positions whose second token is `w`.
    pub right_counts: HashMap<String, u64>,
    pub total_tokens: u64,
    pub total_bigram_positions: u64,
}

impl GroupLexicon {
    pub fn new(category: impl Into<String>) -> Self {
        GroupLexicon {
            category: category.into(),
            ..Default::default()
        }
    }

    /// Adds one document. Bigrams never span document boundaries.
    pub fn add_doc<S: AsRef<str>>(&mut self, tokens: &[S]) {
        for t in tokens {
            *self.unigram_counts.entry(t.as_ref().to_string()).or_default() += 1;
        }
        self.total_tokens += tokens.len() as u64;
        for pair in tokens.windows(2) {
            let (a, b) = (pair[0].as_ref(), pair[1].as_ref());
            *self
                .bigram_counts
                .entry((a.to_string(), b.to_string()))
                .or_default() += 1;
            *self.left_counts.entry(a.to_string()).or_default() += 1;
            *self.right_counts.entry(b.to_string()).or_default() += 1;
            self.total_bigram_positions += 1;
        }
    }

    pub fn count(&self, token: &str) -> u64 {
        self.unigram_counts.get(token).copied().unwrap_or(0)
    }

    /// 2×2 table over bigram positions for `(w1, w2)`.
    pub fn contingency(&self, w1: &str, w2: &str) -> Contingency {
        let o11 = self
            .bigram_counts
            .get(&(w1.to_string(), w2.to_string()))
            .copied()
            .unwrap_or(0);
        let left = self.left_counts.get(w1).copied().unwrap_or(0);
        let right = self.right_counts.get(w2).copied().unwrap_or(0);
        let o12 = left - o11;
        let o21 = right - o11;
        let o22 = self.total_bigram_positions - o11 - o12 - o21;
        Contingency { o11, o12, o21, o22 }
    }
}

pub fn build_lexicon<S: AsRef<str>>(category: impl Into<String>, docs: &[Vec<S>]) -> GroupLexicon {
    let mut lex = GroupLexicon::new(category);
    for doc in docs {
        lex.add_doc(doc);
    }
    lex
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommonWord {
    pub token: String,
    pub group_count: usize,
    pub total_freq: u64,
}

/// Tokens present in at least `min_groups` lexicons, ranked by number of
/// groups, then combined frequency, then token.
pub fn common_words(lexicons: &[GroupLexicon], min_groups: usize, n: usize) -> Result<Vec<CommonWord>> {
    if min_groups < 2 {
        return Err(Error::invalid("common_words needs min_groups >= 2"));
    }
    let mut stats: BTreeMap<&str, (usize, u64)> = BTreeMap::new();
    for lex in lexicons {
        for (token, &count) in &lex.unigram_counts {
            let e = stats.entry(token.as_str()).or_default();
            e.0 += 1;
            e.1 += count;
        }
    }
    let mut words: Vec<CommonWord> = stats
        .into_iter()
        .filter(|(_, (g, _))| *g >= min_groups)
        .map(|(t, (group_count, total_freq))| CommonWord {
            token: t.to_string(),
            group_count,
            total_freq,
        })
        .collect();
    words.sort_by(|a, b| {
        b.group_count
            .cmp(&a.group_count)
            .then(b.total_freq.cmp(&a.total_freq))
            .then_with(|| a.token.cmp(&b.token))
    });
    words.truncate(n);
    Ok(words)
}

/// Most frequent tokens of a group after removing `common`.
pub fn distinctive_words(lexicon: &GroupLexicon, common: &HashSet<String>, n: usize) -> Vec<(String, u64)> {
    let mut words: Vec<(String, u64)> = lexicon
        .unigram_counts
        .iter()
        .filter(|(t, _)| !common.contains(*t))
        .map(|(t, &c)| (t.clone(), c))
        .collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    words.truncate(n);
    words
}

/// Observed counts of a bigram `(w1, w2)` against all other bigram positions.
///
/// ```text
///              second = w2   second != w2
/// first = w1       o11           o12
/// first != w1      o21           o22
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Contingency {
    pub o11: u64,
    pub o12: u64,
    pub o21: u64,
    pub o22: u64,
}

impl Contingency {
    pub fn total(&self) -> u64 {
        self.o11 + self.o12 + self.o21 + self.o22
    }

    /// Row and column margins: (row1, row2, col1, col2).
    pub fn margins(&self) -> (u64, u64, u64, u64) {
        (
            self.o11 + self.o12,
            self.o21 + self.o22,
            self.o11 + self.o21,
            self.o12 + self.o22,
        )
    }

    /// Closed-form Pearson statistic `N (o11 o22 - o12 o21)^2 / (r1 r2 c1 c2)`;
    /// zero when any margin is empty.
    pub fn chi_squared<S: Scalar>(&self) -> S {
        let (r1, r2, c1, c2) = self.margins();
        if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
            return S::zero();
        }
        let c = S::from_count;
        let det = c(self.o11) * c(self.o22) - c(self.o12) * c(self.o21);
        c(self.total()) * det.clone() * det / (c(r1) * c(r2) * c(c1) * c(c2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollocationStat<S> {
    pub bigram: Bigram,
    pub chi2: S,
    pub observed: Contingency,
}

/// Bigrams with at least `min_count` occurrences ranked by chi-squared, then
/// lexicographically.
pub fn bigram_collocations<S: Scalar>(
    lexicon: &GroupLexicon,
    min_count: u64,
    n: usize,
) -> Result<Vec<CollocationStat<S>>> {
    if lexicon.total_bigram_positions == 0 {
        return Err(Error::NoBigrams(lexicon.category.clone()));
    }
    let mut stats: Vec<CollocationStat<S>> = lexicon
        .bigram_counts
        .iter()
        .filter(|(_, &c)| c >= min_count)
        .map(|((w1, w2), _)| {
            let observed = lexicon.contingency(w1, w2);
            debug_assert_eq!(observed.total(), lexicon.total_bigram_positions);
            CollocationStat {
                bigram: (w1.clone(), w2.clone()),
                chi2: observed.chi_squared(),
                observed,
            }
        })
        .collect();
    stats.sort_by(|a, b| {
        b.chi2
            .partial_cmp(&a.chi2)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.bigram.cmp(&b.bigram))
    });
    stats.truncate(n);
    Ok(stats)
}

/// How inverse document frequency treats a single-group collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfRule {
    /// `ln(G / df)`; with one group every weight is zero.
    #[default]
    Plain,
    /// `ln(G / df)`, except `ln((G + 1) / df)` when `G = 1`.
    SingleGroupSmoothed,
}

/// TF-IDF over group-level pseudo-documents.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdf<F> {
    pub groups: Vec<String>,
    pub document_frequency: HashMap<String, usize>,
    /// Per group, `tf(t, g) * idf(t)` for every term occurring in the group.
    pub weights: Vec<HashMap<String, F>>,
}

impl<F: Real> TfIdf<F> {
    pub fn get(&self, group: &str, token: &str) -> F {
        self.groups
            .iter()
            .position(|g| g == group)
            .and_then(|i| self.weights[i].get(token).copied())
            .unwrap_or_else(F::zero)
    }
}

pub fn tfidf<F: Real>(group_docs: &[(String, HashMap<String, u64>)]) -> TfIdf<F> {
    tfidf_with(group_docs, IdfRule::Plain)
}

pub fn tfidf_with<F: Real>(group_docs: &[(String, HashMap<String, u64>)], rule: IdfRule) -> TfIdf<F> {
    let g = group_docs.len();
    let mut document_frequency: HashMap<String, usize> = HashMap::new();
    for (_, terms) in group_docs {
        for (t, &c) in terms {
            if c > 0 {
                *document_frequency.entry(t.clone()).or_default() += 1;
            }
        }
    }
    let numerator = match rule {
        IdfRule::SingleGroupSmoothed if g == 1 => 2,
        _ => g,
    };
    let weights = group_docs
        .iter()
        .map(|(_, terms)| {
            terms
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(t, &c)| {
                    let df = document_frequency[t];
                    let idf = (F::from_count(numerator as u64) / F::from_count(df as u64)).ln();
                    (t.clone(), F::from_count(c) * idf)
                })
                .collect()
        })
        .collect();
    TfIdf {
        groups: group_docs.iter().map(|(name, _)| name.clone()).collect(),
        document_frequency,
        weights,
    }
}
