use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DepNode, DependencyTree, VERB_POS};
use crate::textprep::casefold;

/// How a noun attaches to the verb.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LinkPattern {
    /// Noun is a child of the verb via `rel` (e.g. `nsubj`, `dobj`).
    Direct { rel: String },
    /// Verb -`prep_rel`-> preposition -`object_rel`-> noun.
    ViaPreposition { prep_rel: String, object_rel: String },
    /// Noun is a child via `rel` and carries its own `marker_rel` child
    /// (UD `obl` with `case`).
    MarkedOblique { rel: String, marker_rel: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Traversal {
    /// Only the configured patterns (at most two edges from the verb).
    #[default]
    Local,
    /// Every noun anywhere under the verb.
    Subtree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationConfig {
    pub patterns: Vec<LinkPattern>,
    pub noun_pos: Vec<String>,
    pub traversal: Traversal,
}

impl RelationConfig {
    /// `nsubj`, `dobj` and `prep` + `pobj`, as emitted by ClearNLP/spaCy style parsers.
    pub fn clear_style() -> Self {
        RelationConfig {
            patterns: vec![
                LinkPattern::Direct { rel: "nsubj".into() },
                LinkPattern::Direct { rel: "dobj".into() },
                LinkPattern::ViaPreposition {
                    prep_rel: "prep".into(),
                    object_rel: "pobj".into(),
                },
            ],
            noun_pos: vec!["NOUN".into(), "PROPN".into()],
            traversal: Traversal::Local,
        }
    }

    /// Universal Dependencies equivalents: `nsubj`, `obj`, `obl` + `case`.
    pub fn universal() -> Self {
        RelationConfig {
            patterns: vec![
                LinkPattern::Direct { rel: "nsubj".into() },
                LinkPattern::Direct { rel: "obj".into() },
                LinkPattern::MarkedOblique {
                    rel: "obl".into(),
                    marker_rel: "case".into(),
                },
            ],
            ..Self::clear_style()
        }
    }

    fn is_noun(&self, node: &DepNode) -> bool {
        self.noun_pos.iter().any(|p| *p == node.pos)
    }
}

impl Default for RelationConfig {
    fn default() -> Self {
        Self::clear_style()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerbNounTable {
    pub verb: String,
    /// Sorted by count, then lemma.
    pub nouns: Vec<(String, u64)>,
}

fn linked_nouns<'t>(tree: &'t DependencyTree, verb: usize, config: &RelationConfig) -> Vec<&'t DepNode> {
    if config.traversal == Traversal::Subtree {
        return tree
            .descendants(verb)
            .into_iter()
            .filter(|n| config.is_noun(n))
            .collect();
    }
    let mut found = Vec::new();
    for child in tree.children(verb) {
        for pattern in &config.patterns {
            match pattern {
                LinkPattern::Direct { rel } if child.rel == *rel && config.is_noun(child) => {
                    found.push(child);
                }
                LinkPattern::ViaPreposition { prep_rel, object_rel } if child.rel == *prep_rel => {
                    found.extend(
                        tree.children(child.index)
                            .filter(|g| g.rel == *object_rel && config.is_noun(g)),
                    );
                }
                LinkPattern::MarkedOblique { rel, marker_rel }
                    if child.rel == *rel
                        && config.is_noun(child)
                        && tree.children(child.index).any(|g| g.rel == *marker_rel) =>
                {
                    found.push(child);
                }
                _ => {}
            }
        }
    }
    found.sort_by_key(|n| n.index);
    found.dedup_by_key(|n| n.index);
    debug_assert!(found
        .iter()
        .all(|n| tree.distance(verb, n.index).is_some_and(|d| (1..=2).contains(&d))));
    found
}

/// Noun lemmas linked to every `VERB` node whose lemma is `verb_lemma`,
/// counted across all trees.
pub fn verb_noun_pairs<'a, I>(trees: I, verb_lemma: &str, config: &RelationConfig) -> VerbNounTable
where
    I: IntoIterator<Item = &'a DependencyTree>,
{
    let verb = casefold(verb_lemma);
    let mut counts: HashMap<String, u64> = HashMap::new();
    for tree in trees {
        for v in tree
            .nodes()
            .iter()
            .filter(|n| n.pos == VERB_POS && casefold(&n.lemma) == verb)
        {
            for noun in linked_nouns(tree, v.index, config) {
                *counts.entry(casefold(&noun.lemma)).or_default() += 1;
            }
        }
    }
    let mut nouns: Vec<(String, u64)> = counts.into_iter().collect();
    nouns.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    VerbNounTable { verb, nouns }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_conllu;

    fn tree(text: &str) -> DependencyTree {
        parse_conllu(text).items.pop().expect("valid tree")
    }

    #[test]
    fn deal_with_anxiety() {
        let t = tree("# tweet_id = 1\n1\tWe\twe\tPRON\t2\tnsubj\n2\tdeal\tdeal\tVERB\t0\troot\n3\twith\twith\tADP\t2\tprep\n4\tanxiety\tanxiety\tNOUN\t3\tpobj\n");
        let table = verb_noun_pairs([&t], "deal", &RelationConfig::default());
        assert_eq!(table.nouns, vec![("anxiety".to_string(), 1)]);
    }

    #[test]
    fn no_qualifying_dependents() {
        let t = tree("# tweet_id = 1\n1\tdeal\tdeal\tVERB\t0\troot\n2\tquickly\tquickly\tADV\t1\tadvmod\n");
        assert!(verb_noun_pairs([&t], "deal", &RelationConfig::default()).nouns.is_empty());
        assert!(verb_noun_pairs([&t], "absent", &RelationConfig::default()).nouns.is_empty());
    }

    #[test]
    fn aggregation_across_trees() {
        let a = tree("# tweet_id = 1\n1\tbuy\tbuy\tVERB\t0\troot\n2\tpaper\tpaper\tNOUN\t1\tdobj\n");
        let b = tree("# tweet_id = 2\n1\tPeople\tpeople\tNOUN\t2\tnsubj\n2\tbought\tbuy\tVERB\t0\troot\n3\tpaper\tpaper\tNOUN\t2\tdobj\n");
        let table = verb_noun_pairs([&a, &b], "buy", &RelationConfig::default());
        assert_eq!(table.nouns, vec![("paper".to_string(), 2), ("people".to_string(), 1)]);
    }

    #[test]
    fn universal_and_subtree_modes() {
        // UD: deal -obl-> anxiety -case-> with; "stress" hangs below anxiety.
        let t = tree("# tweet_id = 1\n1\tdeal\tdeal\tVERB\t0\troot\n2\twith\twith\tADP\t3\tcase\n3\tanxiety\tanxiety\tNOUN\t1\tobl\n4\tstress\tstress\tNOUN\t3\tconj\n");
        let ud = verb_noun_pairs([&t], "deal", &RelationConfig::universal());
        assert_eq!(ud.nouns, vec![("anxiety".to_string(), 1)]);
        assert!(verb_noun_pairs([&t], "deal", &RelationConfig::clear_style()).nouns.is_empty());

        let subtree = RelationConfig {
            traversal: Traversal::Subtree,
            ..RelationConfig::clear_style()
        };
        let all = verb_noun_pairs([&t], "deal", &subtree);
        assert_eq!(all.nouns.len(), 2);
    }
}
