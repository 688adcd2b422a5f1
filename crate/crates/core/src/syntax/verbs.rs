use std::collections::HashMap;

use serde::Serialize;

use super::{DependencyTree, VERB_POS};
use crate::lexstats::{tfidf_with, IdfRule};
use crate::scalar::Real;
use crate::textprep::casefold;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerbProfile<F> {
    pub category: String,
    /// `(lemma, in-group count, tf-idf)`.
    pub verbs: Vec<(String, u64, F)>,
}

/// Verbs (POS `VERB`, casefolded lemma) that distinguish each group: verbs
/// present in every group get a zero TF-IDF weight and are dropped; the rest
/// are ranked by in-group count, then lemma. A single group keeps all of its
/// verbs.
pub fn distinctive_verbs<F: Real>(groups: &[(String, Vec<&DependencyTree>)], n: usize) -> Vec<VerbProfile<F>> {
    let pseudo_docs: Vec<(String, HashMap<String, u64>)> = groups
        .iter()
        .map(|(name, trees)| {
            let mut counts: HashMap<String, u64> = HashMap::new();
            for node in trees.iter().flat_map(|t| t.nodes()).filter(|n| n.pos == VERB_POS) {
                *counts.entry(casefold(&node.lemma)).or_default() += 1;
            }
            (name.clone(), counts)
        })
        .collect();
    let weights = tfidf_with::<F>(&pseudo_docs, IdfRule::SingleGroupSmoothed);

    pseudo_docs
        .iter()
        .zip(&weights.weights)
        .map(|((category, counts), w)| {
            let mut verbs: Vec<(String, u64, F)> = counts
                .iter()
                .map(|(lemma, &c)| (lemma.clone(), c, w[lemma]))
                .filter(|(_, _, score)| *score > F::zero())
                .collect();
            verbs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            verbs.truncate(n);
            VerbProfile {
                category: category.clone(),
                verbs,
            }
        })
        .collect()
}
