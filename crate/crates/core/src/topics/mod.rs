//! Seeded LDA with collapsed Gibbs sampling, tweet classification from the
//! document-topic distribution, and evaluation against hashtag groupings.
//!
//! Seeding works through two channels. Each seed word gets extra prior mass
//! `mu` in the topic-word prior of its topic, and seed tokens start out
//! assigned to their seeded topic. A seeded topic is a category; unseeded
//! topics soak up everything else and classify as [`UNASSIGNED`].

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Membership;
use crate::error::{Error, Result};
use crate::ordered::parse_ordered_lists;
use crate::scalar::Real;

mod eval;
mod model;
mod persist;
mod sparse;

pub use eval::{evaluate, Averages, ClassMetrics, EvaluationReport};
pub use model::{gibbs_weight, theta_from_counts, train, SeededLda, Trainer};
pub use persist::{ModelDump, MODEL_FORMAT, MODEL_VERSION};
pub use sparse::{TopicId, WordTopicCounts};

/// Prediction label for documents whose best topic is unseeded.
pub const UNASSIGNED: &str = "unassigned";

/// Default seed of every randomized step.
pub const DEFAULT_RNG_SEED: u64 = 20200314;

/// Seeded categories (in topic order) plus a number of unseeded topics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seeded: Vec<(String, Vec<String>)>,
    pub unseeded: usize,
}

impl SeedSpec {
    pub fn new(seeded: Vec<(String, Vec<String>)>, unseeded: usize) -> Result<Self> {
        for (i, (name, words)) in seeded.iter().enumerate() {
            if words.is_empty() {
                return Err(Error::invalid(format!("seed set for {name:?} is empty")));
            }
            if name == UNASSIGNED {
                return Err(Error::invalid(format!("{UNASSIGNED:?} cannot name a seeded topic")));
            }
            if seeded[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::invalid(format!("duplicate seeded topic {name:?}")));
            }
        }
        if seeded.is_empty() && unseeded == 0 {
            return Err(Error::invalid("model needs at least one topic"));
        }
        Ok(SeedSpec { seeded, unseeded })
    }

    /// Parses `{category: [seed words]}` keeping key order.
    pub fn from_json_str(json: &str, unseeded: usize) -> Result<Self> {
        Self::new(parse_ordered_lists(json, "seed file")?, unseeded)
    }

    pub fn load(path: &Path, unseeded: usize) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&json, unseeded)
    }

    pub fn num_topics(&self) -> usize {
        self.seeded.len() + self.unseeded
    }

    /// Rewrites every seed word (e.g. through the corpus normalizer). A word
    /// may map to several tokens or none; duplicates within a set collapse.
    pub fn map_words<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&str) -> Vec<String>,
    {
        let seeded = self
            .seeded
            .iter()
            .map(|(name, words)| {
                let mut out: Vec<String> = Vec::new();
                for w in words {
                    for token in f(w) {
                        if !out.contains(&token) {
                            out.push(token);
                        }
                    }
                }
                (name.clone(), out)
            })
            .collect();
        Self::new(seeded, self.unseeded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters<F> {
    /// Symmetric document-topic prior.
    pub alpha: F,
    /// Symmetric topic-word prior.
    pub beta: F,
    /// Extra topic-word prior mass on each seed word of its topic.
    pub mu: F,
    pub iterations: usize,
    pub rng_seed: u64,
}

impl<F: Real> Default for Hyperparameters<F> {
    fn default() -> Self {
        Hyperparameters {
            alpha: F::from_f64_lossy(0.01),
            beta: F::from_f64_lossy(0.0001),
            mu: F::from_f64_lossy(0.5),
            iterations: 2000,
            rng_seed: DEFAULT_RNG_SEED,
        }
    }
}

impl<F: Real> Hyperparameters<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > F::zero() && self.alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > F::zero() && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.mu >= F::zero() && self.mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be non-negative, got {}", self.mu)));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be positive"));
        }
        Ok(())
    }
}

/// Token strings in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::invalid(format!("duplicate vocabulary entry {w:?}")));
            }
        }
        Ok(Vocabulary { words, index })
    }

    /// Id of `word`, adding it if new.
    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
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
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prediction {
    Category(String),
    Unassigned,
}

impl Prediction {
    pub fn label(&self) -> &str {
        match self {
            Prediction::Category(c) => c,
            Prediction::Unassigned => UNASSIGNED,
        }
    }
}

/// How a tweet in several categories gets its single gold label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldPolicy {
    /// The member category with the fewest tweets in the corpus; ties go to taxonomy order.
    #[default]
    Rarest,
    /// The first member category in taxonomy order.
    Priority,
    /// Multi-category tweets are left out.
    ExcludeMulti,
}

impl GoldPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            GoldPolicy::Rarest => "rarest",
            GoldPolicy::Priority => "priority",
            GoldPolicy::ExcludeMulti => "exclude_multi",
        }
    }
}

impl FromStr for GoldPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rarest" => Ok(GoldPolicy::Rarest),
            "priority" => Ok(GoldPolicy::Priority),
            "exclude_multi" | "exclude-multi" => Ok(GoldPolicy::ExcludeMulti),
            other => Err(Error::invalid(format!("unknown gold policy {other:?}"))),
        }
    }
}

/// One gold category per tweet. Tweets without any category are omitted.
pub fn derive_gold(membership: &Membership, policy: GoldPolicy) -> BTreeMap<String, String> {
    let sizes = membership.category_sizes();
    membership
        .by_tweet
        .iter()
        .filter_map(|(id, cats)| {
            let pick = match (cats.as_slice(), policy) {
                ([], _) => None,
                ([only], _) => Some(*only),
                (_, GoldPolicy::ExcludeMulti) => None,
                (many, GoldPolicy::Priority) => many.iter().min().copied(),
                (many, GoldPolicy::Rarest) => many.iter().copied().min_by_key(|&c| (sizes[c], c)),
            };
            pick.map(|c| (id.clone(), membership.categories[c].clone()))
        })
        .collect()
}
