use std::collections::HashSet;

use proptest::prelude::*;
use tagscope::syntax::{
    distinctive_verbs, parse_conllu, verb_noun_pairs, write_conllu, DepNode, DependencyTree, RelationConfig,
    Traversal,
};

const POS: [&str; 5] = ["VERB", "NOUN", "PRON", "ADP", "PROPN"];
const RELS: [&str; 6] = ["nsubj", "dobj", "prep", "pobj", "obl", "case"];

/// Random valid tree: nodes are attached in a random order, each to a node
/// attached earlier (or to 0 for the first).
fn tree_strategy(id: usize) -> impl Strategy<Value = DependencyTree> {
    (1usize..9).prop_flat_map(move |n| {
        (
            Just(Vec::from_iter(1..=n)).prop_shuffle(),
            prop::collection::vec(any::<prop::sample::Index>(), n),
            prop::collection::vec(("[a-z]{1,5}", 0usize..5, 0usize..6), n),
        )
            .prop_map(move |(order, picks, labels)| {
                let mut head = vec![0usize; n + 1];
                for (k, &node) in order.iter().enumerate().skip(1) {
                    head[node] = order[picks[k].index(k)];
                }
                let nodes = (1..=n)
                    .map(|i| {
                        let (lemma, pos, rel) = &labels[i - 1];
                        DepNode {
                            index: i,
                            form: lemma.to_uppercase(),
                            lemma: lemma.clone(),
                            pos: POS[*pos].to_string(),
                            head: head[i],
                            rel: if head[i] == 0 { "root".into() } else { RELS[*rel].to_string() },
                        }
                    })
                    .collect();
                DependencyTree::new(id.to_string(), nodes).expect("generator builds valid trees")
            })
    })
}

fn forest(max: usize) -> impl Strategy<Value = Vec<DependencyTree>> {
    (1..max).prop_flat_map(|n| (0..n).map(tree_strategy).collect::<Vec<_>>())
}

proptest! {
    #[test]
    fn conllu_round_trip(trees in forest(6)) {
        let text = write_conllu(&trees);
        let loaded = parse_conllu(&text);
        prop_assert!(loaded.diagnostics.is_empty());
        prop_assert_eq!(&loaded.items, &trees);
        prop_assert_eq!(write_conllu(&loaded.items), text);
    }

    #[test]
    fn universal_verbs_are_annihilated(groups in prop::collection::vec(forest(5), 1..4)) {
        let named: Vec<(String, Vec<&DependencyTree>)> = groups
            .iter()
            .enumerate()
            .map(|(i, trees)| (format!("g{i}"), trees.iter().collect()))
            .collect();
        let verb_sets: Vec<HashSet<String>> = groups
            .iter()
            .map(|trees| {
                trees.iter().flat_map(|t| t.nodes()).filter(|n| n.pos == "VERB").map(|n| n.lemma.clone()).collect()
            })
            .collect();
        let universal: HashSet<String> = verb_sets
            .iter()
            .skip(1)
            .fold(verb_sets[0].clone(), |acc, s| acc.intersection(s).cloned().collect());
        let profiles = distinctive_verbs::<f64>(&named, usize::MAX);
        prop_assert_eq!(profiles.len(), groups.len());
        for (profile, verbs) in profiles.iter().zip(&verb_sets) {
            if groups.len() > 1 {
                for (lemma, _, _) in &profile.verbs {
                    prop_assert!(!universal.contains(lemma));
                }
                let expected: HashSet<&String> = verbs.difference(&universal).collect();
                let got: HashSet<&String> = profile.verbs.iter().map(|v| &v.0).collect();
                prop_assert_eq!(got, expected);
            } else {
                prop_assert_eq!(profile.verbs.len(), verbs.len());
            }
        }
    }

    #[test]
    fn local_nouns_are_a_subset_of_subtree_nouns(trees in forest(6)) {
        let local = RelationConfig::clear_style();
        let subtree = RelationConfig { traversal: Traversal::Subtree, ..RelationConfig::clear_style() };
        let verbs: HashSet<String> = trees.iter().flat_map(|t| t.nodes()).filter(|n| n.pos == "VERB").map(|n| n.lemma.clone()).collect();
        for verb in &verbs {
            let near = verb_noun_pairs(&trees, verb, &local);
            let far = verb_noun_pairs(&trees, verb, &subtree);
            for (noun, c) in &near.nouns {
                let outer = far.nouns.iter().find(|(n, _)| n == noun).map_or(0, |x| x.1);
                prop_assert!(*c <= outer, "{} under {}", noun, verb);
            }
        }
    }
}

#[test]
fn pronoun_subjects_are_excluded() {
    let text = "# tweet_id = 1\n1\tWe\twe\tPRON\t2\tnsubj\n2\tdeal\tdeal\tVERB\t0\troot\n3\twith\twith\tADP\t2\tprep\n4\tanxiety\tanxiety\tNOUN\t3\tpobj\n";
    let trees = parse_conllu(text).items;
    let table = verb_noun_pairs(&trees, "deal", &RelationConfig::default());
    assert_eq!(table.nouns, vec![("anxiety".to_string(), 1)]);
}
