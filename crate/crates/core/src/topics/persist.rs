//! JSON model dump. Stores everything needed to rebuild the exact state:
//! vocabulary, encoded documents with their assignments, hyperparameters and
//! the count tables, which are checked against the rebuilt ones on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Encoded, SeededLda};
use super::{Hyperparameters, SeedSpec, TopicId, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MODEL_FORMAT: &str = "tagscope-seeded-lda";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentDump {
    pub id: String,
    pub words: Vec<u32>,
    pub topics: Vec<TopicId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub format: String,
    pub version: u32,
    pub hyperparameters: Hyperparameters<f64>,
    pub sweeps: usize,
    pub seeds: SeedSpec,
    pub vocabulary: Vec<String>,
    pub documents: Vec<DocumentDump>,
    pub dropped: Vec<String>,
    pub topic_totals: Vec<u64>,
    /// (topic, word, count) with count > 0, sorted.
    pub word_topic: Vec<(TopicId, u32, u32)>,
}

impl ModelDump {
    pub fn from_model<F: Real>(model: &SeededLda<F>) -> Self {
        let h = model.hyperparameters();
        ModelDump {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            hyperparameters: Hyperparameters {
                alpha: h.alpha.to_f64_lossy(),
                beta: h.beta.to_f64_lossy(),
                mu: h.mu.to_f64_lossy(),
                iterations: h.iterations,
                rng_seed: h.rng_seed,
            },
            sweeps: model.sweeps,
            seeds: model.seeds.clone(),
            vocabulary: model.vocab.words().to_vec(),
            documents: model
                .doc_ids
                .iter()
                .zip(&model.docs)
                .zip(&model.z)
                .map(|((id, words), topics)| DocumentDump {
                    id: id.clone(),
                    words: words.clone(),
                    topics: topics.clone(),
                })
                .collect(),
            dropped: model.dropped.clone(),
            topic_totals: model.topic_totals().to_vec(),
            word_topic: model.word_topic_counts().triples(),
        }
    }

    pub fn into_model<F: Real>(self) -> Result<SeededLda<F>> {
        if self.format != MODEL_FORMAT {
            return Err(Error::invalid(format!("not a model dump (format {:?})", self.format)));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model version {}", self.version)));
        }
        let h = self.hyperparameters;
        let hyper = Hyperparameters {
            alpha: F::from_f64_lossy(h.alpha),
            beta: F::from_f64_lossy(h.beta),
            mu: F::from_f64_lossy(h.mu),
            iterations: h.iterations,
            rng_seed: h.rng_seed,
        };
        let seeds = SeedSpec::new(self.seeds.seeded, self.seeds.unseeded)?;
        let vocab = Vocabulary::from_words(self.vocabulary)?;
        let mut doc_ids = Vec::with_capacity(self.documents.len());
        let mut docs = Vec::with_capacity(self.documents.len());
        let mut z = Vec::with_capacity(self.documents.len());
        for d in self.documents {
            if let Some(&w) = d.words.iter().find(|&&w| w as usize >= vocab.len()) {
                return Err(Error::invalid(format!("document {} references word id {w} outside vocabulary", d.id)));
            }
            doc_ids.push(d.id);
            docs.push(d.words);
            z.push(d.topics);
        }
        let enc = Encoded {
            vocab,
            doc_ids,
            docs,
            dropped: self.dropped,
        };
        let mut model = SeededLda::assemble(enc, seeds, hyper, z)?;
        model.sweeps = self.sweeps;
        if model.topic_totals() != self.topic_totals.as_slice() || model.word_topic_counts().triples() != self.word_topic {
            return Err(Error::Invariant("stored count tables disagree with stored assignments".into()));
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model dump serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Json {
            context: "model dump".into(),
            source: e,
        })
    }
}

impl<F: Real> SeededLda<F> {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = ModelDump::from_model(self).to_json();
        json.push('\n');
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ModelDump::from_json(&json)?.into_model()
    }
}
