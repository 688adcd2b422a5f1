//! Run configuration: one flat JSON object whose keys mirror the long flags
//! (`--seed-file` is `seed_file`). Flags override file values.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use tagscope::corpus::CorpusFormat;
use tagscope::syntax::RelationConfig;
use tagscope::topics::{GoldPolicy, Hyperparameters, DEFAULT_RNG_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RelationScheme {
    /// nsubj / dobj / prep+pobj
    #[default]
    Clear,
    /// nsubj / obj / obl+case
    Universal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub format: Option<CorpusFormat>,
    pub taxonomy: Option<PathBuf>,
    pub out: PathBuf,
    pub stopwords: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub parses: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub seed_file: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub iters: usize,
    pub unseeded: usize,
    pub rng_seed: u64,
    pub top_n: usize,
    pub min_count: u64,
    pub common_top_n: usize,
    pub min_groups: usize,
    pub gold_policy: GoldPolicy,
    pub stem: bool,
    pub verbs: Vec<String>,
    pub relations: RelationScheme,
    pub subtree: bool,
    pub strong: f64,
    pub weak: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let h = Hyperparameters::<f64>::default();
        RunConfig {
            corpus: None,
            format: None,
            taxonomy: None,
            out: PathBuf::from("out"),
            stopwords: None,
            exclusions: None,
            lexicon: None,
            parses: None,
            scores: None,
            seed_file: None,
            model: None,
            predictions: None,
            alpha: h.alpha,
            beta: h.beta,
            mu: h.mu,
            iters: h.iterations,
            unseeded: 2,
            rng_seed: DEFAULT_RNG_SEED,
            top_n: 10,
            min_count: 5,
            common_top_n: 50,
            min_groups: 2,
            gold_policy: GoldPolicy::Rarest,
            stem: true,
            verbs: Vec::new(),
            relations: RelationScheme::Clear,
            subtree: false,
            strong: 0.5,
            weak: 0.05,
        }
    }
}

/// Command-line overrides. Every flag is optional; unset flags keep the
/// config-file (or default) value.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run configuration
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Tweet corpus (JSONL or CSV)
    #[arg(long, global = true, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Corpus format; inferred from the extension when omitted
    #[arg(long, global = true, value_parser = ["jsonl", "csv"])]
    pub format: Option<String>,
    /// Category taxonomy JSON ({category: [hashtags]})
    #[arg(long, global = true, value_name = "FILE")]
    pub taxonomy: Option<PathBuf>,
    /// Output directory (created if absent)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Extra words to drop from word statistics (places, officials)
    #[arg(long, global = true, value_name = "FILE")]
    pub exclusions: Option<PathBuf>,
    /// Valence lexicon CSV (token,valence)
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Dependency parses (CoNLL-U subset)
    #[arg(long, global = true, value_name = "FILE")]
    pub parses: Option<PathBuf>,
    /// Precomputed sentiment labels (JSONL {id, label})
    #[arg(long, global = true, value_name = "FILE")]
    pub scores: Option<PathBuf>,
    /// Seed words JSON ({category: [words]})
    #[arg(long, global = true, value_name = "FILE")]
    pub seed_file: Option<PathBuf>,
    /// Model dump path (default: <out>/model.json)
    #[arg(long, global = true, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Predictions CSV path (default: <out>/predictions.csv)
    #[arg(long, global = true, value_name = "FILE")]
    pub predictions: Option<PathBuf>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Seed-word prior boost
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Gibbs sweeps
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Number of unseeded topics
    #[arg(long, global = true)]
    pub unseeded: Option<usize>,
    #[arg(long, global = true)]
    pub rng_seed: Option<u64>,
    #[arg(long, global = true)]
    pub top_n: Option<usize>,
    /// Minimum bigram count
    #[arg(long, global = true)]
    pub min_count: Option<u64>,
    #[arg(long, global = true)]
    pub common_top_n: Option<usize>,
    #[arg(long, global = true)]
    pub min_groups: Option<usize>,
    #[arg(long, global = true, value_parser = ["rarest", "priority", "exclude_multi"])]
    pub gold_policy: Option<String>,
    /// Disable Porter stemming
    #[arg(long, global = true)]
    pub no_stem: bool,
    /// Verb lemma for pair extraction (repeatable)
    #[arg(long = "verb", global = true, value_name = "LEMMA")]
    pub verbs: Vec<String>,
    #[arg(long, global = true, value_enum)]
    pub relations: Option<RelationScheme>,
    /// Collect every noun under the verb instead of the configured relations
    #[arg(long, global = true)]
    pub subtree: bool,
    #[arg(long, global = true)]
    pub strong: Option<f64>,
    #[arg(long, global = true)]
    pub weak: Option<f64>,
    /// Print the resolved configuration as JSON and exit
    #[arg(long, global = true)]
    pub print_config: bool,
}

impl RunConfig {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn apply(&mut self, f: &Flags) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        set_opt(&mut self.corpus, &f.corpus);
        if let Some(fmt) = &f.format {
            self.format = fmt.parse().ok();
        }
        set_opt(&mut self.taxonomy, &f.taxonomy);
        set(&mut self.out, &f.out);
        set_opt(&mut self.stopwords, &f.stopwords);
        set_opt(&mut self.exclusions, &f.exclusions);
        set_opt(&mut self.lexicon, &f.lexicon);
        set_opt(&mut self.parses, &f.parses);
        set_opt(&mut self.scores, &f.scores);
        set_opt(&mut self.seed_file, &f.seed_file);
        set_opt(&mut self.model, &f.model);
        set_opt(&mut self.predictions, &f.predictions);
        set(&mut self.alpha, &f.alpha);
        set(&mut self.beta, &f.beta);
        set(&mut self.mu, &f.mu);
        set(&mut self.iters, &f.iters);
        set(&mut self.unseeded, &f.unseeded);
        set(&mut self.rng_seed, &f.rng_seed);
        set(&mut self.top_n, &f.top_n);
        set(&mut self.min_count, &f.min_count);
        set(&mut self.common_top_n, &f.common_top_n);
        set(&mut self.min_groups, &f.min_groups);
        if let Some(p) = &f.gold_policy {
            if let Ok(p) = p.parse() {
                self.gold_policy = p;
            }
        }
        if f.no_stem {
            self.stem = false;
        }
        if !f.verbs.is_empty() {
            self.verbs.clone_from(&f.verbs);
        }
        set(&mut self.relations, &f.relations);
        if f.subtree {
            self.subtree = true;
        }
        set(&mut self.strong, &f.strong);
        set(&mut self.weak, &f.weak);
    }

    /// Checks values that do not depend on any input file.
    pub fn validate(&self) -> Result<(), String> {
        self.hyperparameters().validate().map_err(|e| e.to_string())?;
        if self.min_groups < 2 {
            return Err("min_groups must be at least 2".into());
        }
        if self.top_n == 0 {
            return Err("top_n must be positive".into());
        }
        tagscope::sentiment::Thresholds::new(self.strong, self.weak).map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn hyperparameters(&self) -> Hyperparameters<f64> {
        Hyperparameters {
            alpha: self.alpha,
            beta: self.beta,
            mu: self.mu,
            iterations: self.iters,
            rng_seed: self.rng_seed,
        }
    }

    pub fn relation_config(&self) -> RelationConfig {
        let mut rc = match self.relations {
            RelationScheme::Clear => RelationConfig::clear_style(),
            RelationScheme::Universal => RelationConfig::universal(),
        };
        if self.subtree {
            rc.traversal = tagscope::syntax::Traversal::Subtree;
        }
        rc
    }

    pub fn model_path(&self) -> PathBuf {
        self.model.clone().unwrap_or_else(|| self.out.join("model.json"))
    }

    pub fn predictions_path(&self) -> PathBuf {
        self.predictions.clone().unwrap_or_else(|| self.out.join("predictions.csv"))
    }
}
