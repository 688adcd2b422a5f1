use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Hyperparameters, Prediction, SeedSpec, TopicId, Vocabulary, WordTopicCounts};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::textprep::TokenizedDoc;

/// Unnormalized collapsed-Gibbs weight of one topic for one token, with the
/// token's own assignment already removed from the counts.
pub fn gibbs_weight<F: Real>(n_dt: u32, n_tw: u32, n_t: u64, alpha: F, prior: F, prior_sum: F) -> F {
    (F::from_count(n_dt as u64) + alpha) * (F::from_count(n_tw as u64) + prior)
        / (F::from_count(n_t) + prior_sum)
}

/// θ_t = (n_dt + α) / (N_d + Kα).
pub fn theta_from_counts<F: Real>(counts: &[u32], alpha: F) -> Vec<F> {
    let len: u64 = counts.iter().map(|&c| c as u64).sum();
    let denom = F::from_count(len) + F::from_count(counts.len() as u64) * alpha;
    counts
        .iter()
        .map(|&c| (F::from_count(c as u64) + alpha) / denom)
        .collect()
}

/// Model state: vocabulary, per-token topic assignments and the count tables
/// derived from them.
#[derive(Debug, Clone)]
pub struct SeededLda<F> {
    pub(super) vocab: Vocabulary,
    pub(super) seeds: SeedSpec,
    pub(super) hyper: Hyperparameters<F>,
    pub(super) doc_ids: Vec<String>,
    pub(super) docs: Vec<Vec<u32>>,
    pub(super) dropped: Vec<String>,
    /// (category, seed word) pairs absent from the vocabulary.
    pub(super) missing_seeds: Vec<(String, String)>,
    pub(super) z: Vec<Vec<TopicId>>,
    /// Dense doc×topic counts, row-major.
    n_dt: Vec<u32>,
    n_tw: WordTopicCounts,
    n_t: Vec<u64>,
    /// Seeded topics of each word, sorted.
    seed_topics: Vec<Vec<TopicId>>,
    bsum: Vec<F>,
    pub(super) sweeps: usize,
}

pub(super) struct Encoded {
    pub vocab: Vocabulary,
    pub doc_ids: Vec<String>,
    pub docs: Vec<Vec<u32>>,
    pub dropped: Vec<String>,
}

/// Assigns word ids in order of first appearance; empty documents are set aside.
pub(super) fn encode(docs: &[TokenizedDoc]) -> Encoded {
    let mut vocab = Vocabulary::default();
    let mut doc_ids = Vec::new();
    let mut encoded = Vec::new();
    let mut dropped = Vec::new();
    for doc in docs {
        if doc.tokens.is_empty() {
            dropped.push(doc.tweet_id.clone());
            continue;
        }
        doc_ids.push(doc.tweet_id.clone());
        encoded.push(doc.tokens.iter().map(|t| vocab.intern(t)).collect());
    }
    Encoded {
        vocab,
        doc_ids,
        docs: encoded,
        dropped,
    }
}

impl<F: Real> SeededLda<F> {
    /// Builds the count tables from explicit assignments.
    pub fn from_assignments(
        docs: &[TokenizedDoc],
        seeds: SeedSpec,
        hyper: Hyperparameters<F>,
        z: Vec<Vec<TopicId>>,
    ) -> Result<Self> {
        Self::assemble(encode(docs), seeds, hyper, z)
    }

    pub(super) fn assemble(enc: Encoded, seeds: SeedSpec, hyper: Hyperparameters<F>, z: Vec<Vec<TopicId>>) -> Result<Self> {
        hyper.validate()?;
        let k = seeds.num_topics();
        if k > TopicId::MAX as usize {
            return Err(Error::invalid(format!("too many topics ({k})")));
        }
        if enc.vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if z.len() != enc.docs.len() {
            return Err(Error::invalid(format!(
                "{} assignment rows for {} documents",
                z.len(),
                enc.docs.len()
            )));
        }
        let v = enc.vocab.len();
        let mut seed_topics: Vec<Vec<TopicId>> = vec![Vec::new(); v];
        let mut missing_seeds = Vec::new();
        let mut present = vec![0u64; k];
        for (t, (name, words)) in seeds.seeded.iter().enumerate() {
            for w in words {
                match enc.vocab.id(w) {
                    Some(id) => {
                        let list = &mut seed_topics[id as usize];
                        if !list.contains(&(t as TopicId)) {
                            list.push(t as TopicId);
                            present[t] += 1;
                        }
                    }
                    None => missing_seeds.push((name.clone(), w.clone())),
                }
            }
        }
        let base = F::from_count(v as u64) * hyper.beta;
        let bsum = present.iter().map(|&p| base + F::from_count(p) * hyper.mu).collect();

        let mut model = SeededLda {
            vocab: enc.vocab,
            seeds,
            hyper,
            doc_ids: enc.doc_ids,
            docs: enc.docs,
            dropped: enc.dropped,
            missing_seeds,
            z: Vec::new(),
            n_dt: vec![0; z.len() * k],
            n_tw: WordTopicCounts::new(v),
            n_t: vec![0; k],
            seed_topics,
            bsum,
            sweeps: 0,
        };
        for (d, (doc, zd)) in model.docs.iter().zip(&z).enumerate() {
            if doc.len() != zd.len() {
                return Err(Error::invalid(format!(
                    "document {} has {} tokens but {} assignments",
                    model.doc_ids[d],
                    doc.len(),
                    zd.len()
                )));
            }
            for (&w, &t) in doc.iter().zip(zd) {
                if t as usize >= k {
                    return Err(Error::invalid(format!("topic {t} out of range 0..{k}")));
                }
                model.n_dt[d * k + t as usize] += 1;
                model.n_tw.increment(w, t);
                model.n_t[t as usize] += 1;
            }
        }
        model.z = z;
        Ok(model)
    }

    pub fn num_topics(&self) -> usize {
        self.n_t.len()
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn seeds(&self) -> &SeedSpec {
        &self.seeds
    }

    pub fn hyperparameters(&self) -> &Hyperparameters<F> {
        &self.hyper
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_index(&self, tweet_id: &str) -> Option<usize> {
        self.doc_ids.iter().position(|id| id == tweet_id)
    }

    /// Ids of the zero-length documents left out of training.
    pub fn dropped_docs(&self) -> &[String] {
        &self.dropped
    }

    pub fn missing_seeds(&self) -> &[(String, String)] {
        &self.missing_seeds
    }

    pub fn assignments(&self) -> &[Vec<TopicId>] {
        &self.z
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn doc_topic_counts(&self, d: usize) -> &[u32] {
        let k = self.num_topics();
        &self.n_dt[d * k..(d + 1) * k]
    }

    pub fn topic_word_count(&self, t: TopicId, word: u32) -> u32 {
        self.n_tw.get(word, t)
    }

    pub fn word_topic_counts(&self) -> &WordTopicCounts {
        &self.n_tw
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.n_t
    }

    /// B(t, w): β, plus μ when `word` seeds topic `t`.
    pub fn prior(&self, t: TopicId, word: u32) -> F {
        if self.seed_topics[word as usize].contains(&t) {
            self.hyper.beta + self.hyper.mu
        } else {
            self.hyper.beta
        }
    }

    pub fn prior_sum(&self, t: TopicId) -> F {
        self.bsum[t as usize]
    }

    /// Category name for a topic, or `Unassigned` for unseeded topics.
    pub fn topic_label(&self, t: TopicId) -> Prediction {
        match self.seeds.seeded.get(t as usize) {
            Some((name, _)) => Prediction::Category(name.clone()),
            None => Prediction::Unassigned,
        }
    }

    /// Unnormalized conditional over topics for position `pos` of document
    /// `d`, excluding that token's current assignment. Does not mutate.
    pub fn conditional_weights(&self, d: usize, pos: usize) -> Vec<F> {
        let k = self.num_topics();
        let w = self.docs[d][pos];
        let cur = self.z[d][pos] as usize;
        let mut tw = vec![0u32; k];
        for &(t, c) in self.n_tw.row(w) {
            tw[t as usize] = c;
        }
        tw[cur] -= 1;
        let dt = self.doc_topic_counts(d);
        (0..k)
            .map(|t| {
                let own = u32::from(t == cur);
                gibbs_weight(
                    dt[t] - own,
                    tw[t],
                    self.n_t[t] - own as u64,
                    self.hyper.alpha,
                    self.prior(t as TopicId, w),
                    self.bsum[t],
                )
            })
            .collect()
    }

    pub fn doc_topic_distribution(&self, d: usize) -> Vec<F> {
        theta_from_counts(self.doc_topic_counts(d), self.hyper.alpha)
    }

    /// φ_t over the whole vocabulary: (n_tw + B) / (n_t + Bsum).
    pub fn topic_word_distribution(&self, t: TopicId) -> Vec<F> {
        let denom = F::from_count(self.n_t[t as usize]) + self.bsum[t as usize];
        (0..self.vocab.len() as u32)
            .map(|w| (F::from_count(self.n_tw.get(w, t) as u64) + self.prior(t, w)) / denom)
            .collect()
    }

    /// Highest-probability words of a topic; ties go to the lexically smaller word.
    pub fn top_words(&self, t: TopicId, n: usize) -> Vec<(String, F)> {
        let phi = self.topic_word_distribution(t);
        let mut ranked: Vec<(u32, F)> = phi.into_iter().enumerate().map(|(w, p)| (w as u32, p)).collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| self.vocab.word(a.0).cmp(self.vocab.word(b.0)))
        });
        ranked
            .into_iter()
            .take(n)
            .map(|(w, p)| (self.vocab.word(w).to_string(), p))
            .collect()
    }

    /// Best topic by θ; exact ties are broken uniformly with `rng`.
    pub fn best_topic<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> TopicId {
        let theta = self.doc_topic_distribution(d);
        let max = theta.iter().copied().fold(F::neg_infinity(), F::max);
        let tied: Vec<TopicId> = (0..theta.len())
            .filter(|&t| theta[t] == max)
            .map(|t| t as TopicId)
            .collect();
        if tied.len() == 1 {
            tied[0]
        } else {
            tied[rng.random_range(0..tied.len())]
        }
    }

    pub fn classify<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Prediction {
        self.topic_label(self.best_topic(d, rng))
    }

    /// Classifies every trained document in order, keyed by tweet id.
    pub fn classify_all<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<String, Prediction> {
        (0..self.num_docs())
            .map(|d| (self.doc_ids[d].clone(), self.classify(d, rng)))
            .collect()
    }

    /// Recomputes every count table from `z` and compares.
    pub fn check_invariants(&self) -> Result<()> {
        let k = self.num_topics();
        let v = self.vocab.len();
        let fail = |msg: String| Err(Error::Invariant(msg));
        let mut n_t = vec![0u64; k];
        let mut n_tw = vec![0u32; k * v];
        let mut row = vec![0u32; k];
        for (d, (doc, zd)) in self.docs.iter().zip(&self.z).enumerate() {
            if doc.len() != zd.len() {
                return fail(format!("doc {d}: {} tokens, {} assignments", doc.len(), zd.len()));
            }
            row.fill(0);
            for (&w, &t) in doc.iter().zip(zd) {
                row[t as usize] += 1;
                n_t[t as usize] += 1;
                n_tw[w as usize * k + t as usize] += 1;
            }
            if row != self.doc_topic_counts(d) {
                return fail(format!("doc {d}: doc-topic counts disagree with assignments"));
            }
        }
        if n_t != self.n_t {
            return fail("topic totals disagree with assignments".into());
        }
        if self.n_tw.topic_sums(k) != self.n_t {
            return fail("word-topic counts do not sum to topic totals".into());
        }
        let tokens: u64 = self.docs.iter().map(|d| d.len() as u64).sum();
        if self.n_t.iter().sum::<u64>() != tokens {
            return fail("topic totals do not sum to the token count".into());
        }
        for w in 0..v {
            let stored = self.n_tw.row(w as u32);
            let nonzero = n_tw[w * k..(w + 1) * k].iter().filter(|&&c| c > 0).count();
            if stored.len() != nonzero || stored.iter().any(|&(t, c)| c == 0 || n_tw[w * k + t as usize] != c) {
                return fail(format!("word {w}: word-topic counts disagree with assignments"));
            }
        }
        Ok(())
    }

    fn resample(&mut self, d: usize, pos: usize, rng: &mut ChaCha8Rng, tw: &mut [u32], weights: &mut [F]) {
        let k = self.num_topics();
        let w = self.docs[d][pos];
        let old = self.z[d][pos];
        self.n_dt[d * k + old as usize] -= 1;
        self.n_tw.decrement(w, old);
        self.n_t[old as usize] -= 1;

        tw.fill(0);
        for &(t, c) in self.n_tw.row(w) {
            tw[t as usize] = c;
        }
        let seeds = &self.seed_topics[w as usize];
        let mut total = F::zero();
        for t in 0..k {
            let prior = if seeds.contains(&(t as TopicId)) {
                self.hyper.beta + self.hyper.mu
            } else {
                self.hyper.beta
            };
            let wt = gibbs_weight(self.n_dt[d * k + t], tw[t], self.n_t[t], self.hyper.alpha, prior, self.bsum[t]);
            total = total + wt;
            weights[t] = total;
        }
        assert!(
            total.is_finite() && total > F::zero(),
            "degenerate Gibbs normalizer {total} at doc {d}, position {pos}"
        );
        let u = F::from_f64_lossy(rng.random::<f64>()) * total;
        let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1) as TopicId;

        self.z[d][pos] = new;
        self.n_dt[d * k + new as usize] += 1;
        self.n_tw.increment(w, new);
        self.n_t[new as usize] += 1;
    }
}

/// Drives Gibbs sweeps over a model with its own seeded RNG.
#[derive(Debug, Clone)]
pub struct Trainer<F> {
    model: SeededLda<F>,
    rng: ChaCha8Rng,
}

impl<F: Real> Trainer<F> {
    /// Encodes the documents and draws the seed-biased initial assignments.
    /// Empty documents are dropped; seeds absent from the vocabulary are
    /// recorded and logged.
    pub fn new(docs: &[TokenizedDoc], seeds: SeedSpec, hyper: Hyperparameters<F>) -> Result<Self> {
        hyper.validate()?;
        let k = seeds.num_topics();
        let enc = encode(docs);
        if enc.vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.rng_seed);
        let mut seed_topics: BTreeMap<&str, Vec<TopicId>> = BTreeMap::new();
        for (t, (_, words)) in seeds.seeded.iter().enumerate() {
            for w in words {
                let list = seed_topics.entry(w.as_str()).or_default();
                if !list.contains(&(t as TopicId)) {
                    list.push(t as TopicId);
                }
            }
        }
        let z = enc
            .docs
            .iter()
            .map(|doc| {
                doc.iter()
                    .map(|&w| match seed_topics.get(enc.vocab.word(w)).map(Vec::as_slice) {
                        Some([only]) => *only,
                        Some(many) if !many.is_empty() => many[rng.random_range(0..many.len())],
                        _ => rng.random_range(0..k) as TopicId,
                    })
                    .collect()
            })
            .collect();
        let model = SeededLda::assemble(enc, seeds, hyper, z)?;
        for id in &model.dropped {
            log::warn!("document {id} has no tokens; dropped before training");
        }
        for (category, word) in &model.missing_seeds {
            log::warn!("seed word {word:?} for {category:?} does not occur in the corpus");
        }
        Ok(Trainer { model, rng })
    }

    /// Resamples every token position once.
    pub fn sweep(&mut self) {
        let k = self.model.num_topics();
        let mut tw = vec![0u32; k];
        let mut weights = vec![F::zero(); k];
        for d in 0..self.model.docs.len() {
            for pos in 0..self.model.docs[d].len() {
                self.model.resample(d, pos, &mut self.rng, &mut tw, &mut weights);
            }
        }
        self.model.sweeps += 1;
        #[cfg(debug_assertions)]
        if let Err(e) = self.model.check_invariants() {
            panic!("after sweep {}: {e}", self.model.sweeps);
        }
    }

    pub fn model(&self) -> &SeededLda<F> {
        &self.model
    }

    /// Runs the remaining configured iterations and returns the model.
    pub fn run(mut self) -> Result<SeededLda<F>> {
        self.model.check_invariants()?;
        while self.model.sweeps < self.model.hyper.iterations {
            self.sweep();
        }
        self.model.check_invariants()?;
        Ok(self.model)
    }
}

/// Initializes and runs `hyper.iterations` sweeps.
pub fn train<F: Real>(docs: &[TokenizedDoc], seeds: SeedSpec, hyper: Hyperparameters<F>) -> Result<SeededLda<F>> {
    Trainer::new(docs, seeds, hyper)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, tokens: &[&str]) -> TokenizedDoc {
        TokenizedDoc {
            tweet_id: id.to_string(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn hyper(alpha: f64, beta: f64, iterations: usize) -> Hyperparameters<f64> {
        Hyperparameters {
            alpha,
            beta,
            mu: 0.5,
            iterations,
            rng_seed: 7,
        }
    }

    #[test]
    fn hand_conditional() {
        let docs = [doc("0", &["a", "a"]), doc("1", &["b", "b"])];
        let seeds = SeedSpec::new(vec![], 2).unwrap();
        let m = SeededLda::from_assignments(&docs, seeds, hyper(0.01, 0.1, 1), vec![vec![0, 0], vec![0, 1]]).unwrap();
        m.check_invariants().unwrap();
        let w = m.conditional_weights(0, 1);
        assert!((w[0] - 0.505).abs() < 1e-12);
        assert!((w[1] - 0.01 * 0.1 / 1.2).abs() < 1e-12);
        // not mutated
        assert_eq!(m.topic_totals(), &[3, 1]);
    }

    #[test]
    fn theta_formula() {
        let theta = theta_from_counts::<f64>(&[5, 0], 0.01);
        assert!((theta[0] - 5.01 / 5.02).abs() < 1e-15);
        assert!((theta[1] - 0.01 / 5.02).abs() < 1e-15);
        assert_eq!(theta_from_counts::<f64>(&[0, 0, 0, 0], 0.01), vec![0.25; 4]);
    }

    #[test]
    fn empty_docs_dropped_and_empty_vocab_fails() {
        let seeds = SeedSpec::new(vec![("A".into(), vec!["a".into()])], 1).unwrap();
        let t = Trainer::new(&[doc("x", &[]), doc("y", &["a", "b"])], seeds.clone(), hyper(0.01, 0.01, 3)).unwrap();
        assert_eq!(t.model().dropped_docs(), &["x".to_string()]);
        assert!(matches!(
            Trainer::new(&[doc("x", &[])], seeds, hyper(0.01, 0.01, 3)),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn seed_initialization_and_prior() {
        let seeds = SeedSpec::new(
            vec![("A".into(), vec!["a".into(), "zzz".into()]), ("B".into(), vec!["b".into()])],
            1,
        )
        .unwrap();
        let docs = [doc("1", &["a", "a", "b", "c"])];
        let t = Trainer::new(&docs, seeds, hyper(0.01, 0.001, 5)).unwrap();
        let m = t.model();
        assert_eq!(&m.assignments()[0][..3], &[0, 0, 1]);
        assert_eq!(m.missing_seeds(), &[("A".to_string(), "zzz".to_string())]);
        assert!((m.prior_sum(0) - (3.0 * 0.001 + 0.5)).abs() < 1e-15);
        assert!((m.prior(0, 0) - 0.501).abs() < 1e-15);
        assert_eq!(m.prior(1, 0), 0.001);
        let m = t.run().unwrap();
        for t in 0..3 {
            let s: f64 = m.topic_word_distribution(t).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        assert_eq!(m.sweeps(), 5);
    }

    #[test]
    fn classification_labels() {
        let seeds = SeedSpec::new(vec![("Quarantine".into(), vec!["a".into()])], 2).unwrap();
        let docs = [doc("1", &["a", "a", "a"]), doc("2", &["c", "c", "c"])];
        let m = SeededLda::from_assignments(&docs, seeds, hyper(0.01, 0.01, 1), vec![vec![0, 0, 0], vec![2, 2, 2]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(m.classify(0, &mut rng), Prediction::Category("Quarantine".into()));
        assert_eq!(m.classify(1, &mut rng), Prediction::Unassigned);
    }

    #[test]
    fn training_is_deterministic() {
        let seeds = SeedSpec::new(vec![("A".into(), vec!["a".into()]), ("C".into(), vec!["c".into()])], 1).unwrap();
        let docs: Vec<_> = (0..20)
            .map(|i| if i % 2 == 0 { doc(&i.to_string(), &["a", "b", "a", "b"]) } else { doc(&i.to_string(), &["c", "d", "d"]) })
            .collect();
        let a = train(&docs, seeds.clone(), hyper(0.01, 0.0001, 30)).unwrap();
        let b = train(&docs, seeds, hyper(0.01, 0.0001, 30)).unwrap();
        assert_eq!(a.assignments(), b.assignments());
    }
}
