//! Dependency parses: loading, validation, distinctive verbs per category and
//! nouns linked to a verb.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

mod conllu;
mod pairs;
mod verbs;

pub use conllu::{load_parses, parse_conllu, write_conllu};
pub use pairs::{verb_noun_pairs, LinkPattern, RelationConfig, Traversal, VerbNounTable};
pub use verbs::{distinctive_verbs, VerbProfile};

pub const VERB_POS: &str = "VERB";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepNode {
    /// 1-based position.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub pos: String,
    /// Index of the head node; 0 for the root.
    pub head: usize,
    pub rel: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty tree")]
    Empty,
    #[error("node ids must run 1..=n; found {found} at position {position}")]
    BadIndex { position: usize, found: usize },
    #[error("multiple roots")]
    MultipleRoots,
    #[error("node {node} has head {head} outside 0..={len}")]
    HeadOutOfRange { node: usize, head: usize, len: usize },
    #[error("node {0} is its own head")]
    SelfHead(usize),
    #[error("cycle through node {0}")]
    Cycle(usize),
}

/// A validated parse: node ids are `1..=n`, exactly one root, heads form a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyTree {
    tweet_id: String,
    nodes: Vec<DepNode>,
}

impl DependencyTree {
    pub fn new(tweet_id: impl Into<String>, nodes: Vec<DepNode>) -> Result<Self, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        let len = nodes.len();
        for (pos, node) in nodes.iter().enumerate() {
            if node.index != pos + 1 {
                return Err(TreeError::BadIndex {
                    position: pos + 1,
                    found: node.index,
                });
            }
            if node.head > len {
                return Err(TreeError::HeadOutOfRange {
                    node: node.index,
                    head: node.head,
                    len,
                });
            }
            if node.head == node.index {
                return Err(TreeError::SelfHead(node.index));
            }
        }
        // Every node must reach head 0 within `len` steps; a rootless graph always cycles.
        for node in &nodes {
            let mut cur = node.index;
            let mut steps = 0;
            while cur != 0 {
                cur = nodes[cur - 1].head;
                steps += 1;
                if steps > len {
                    return Err(TreeError::Cycle(node.index));
                }
            }
        }
        if nodes.iter().filter(|n| n.head == 0).count() > 1 {
            return Err(TreeError::MultipleRoots);
        }
        Ok(DependencyTree {
            tweet_id: tweet_id.into(),
            nodes,
        })
    }

    pub fn tweet_id(&self) -> &str {
        &self.tweet_id
    }

    pub fn nodes(&self) -> &[DepNode] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &DepNode {
        &self.nodes[index - 1]
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = &DepNode> {
        self.nodes.iter().filter(move |n| n.head == index)
    }

    /// Number of head edges from `descendant` up to `ancestor`, if any.
    pub fn distance(&self, ancestor: usize, descendant: usize) -> Option<usize> {
        let mut cur = descendant;
        let mut d = 0;
        while cur != 0 {
            if cur == ancestor {
                return Some(d);
            }
            cur = self.node(cur).head;
            d += 1;
        }
        None
    }

    /// All proper descendants of `index`, in node order.
    pub fn descendants(&self, index: usize) -> Vec<&DepNode> {
        self.nodes
            .iter()
            .filter(|n| n.index != index && self.distance(index, n.index).is_some())
            .collect()
    }
}

impl fmt::Display for DependencyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# tweet_id = {}", self.tweet_id)?;
        for n in &self.nodes {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}",
                n.index, n.form, n.lemma, n.pos, n.head, n.rel
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn node(index: usize, lemma: &str, pos: &str, head: usize, rel: &str) -> DepNode {
        DepNode {
            index,
            form: lemma.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            head,
            rel: rel.to_string(),
        }
    }

    #[test]
    fn validation() {
        let ok = DependencyTree::new("t", vec![node(1, "go", "VERB", 0, "root")]);
        assert!(ok.is_ok());
        let two_roots = DependencyTree::new("t", vec![node(1, "a", "X", 0, "root"), node(2, "b", "X", 0, "root")]);
        assert_eq!(two_roots.unwrap_err(), TreeError::MultipleRoots);
        let cycle = DependencyTree::new(
            "t",
            vec![node(1, "a", "X", 2, "dep"), node(2, "b", "X", 1, "dep"), node(3, "c", "X", 0, "root")],
        );
        assert!(matches!(cycle.unwrap_err(), TreeError::Cycle(_)));
        let out_of_range = DependencyTree::new("t", vec![node(1, "a", "X", 0, "root"), node(2, "b", "X", 5, "dep")]);
        assert!(matches!(out_of_range.unwrap_err(), TreeError::HeadOutOfRange { .. }));
        let selfie = DependencyTree::new("t", vec![node(1, "a", "X", 0, "root"), node(2, "b", "X", 2, "dep")]);
        assert_eq!(selfie.unwrap_err(), TreeError::SelfHead(2));
        assert_eq!(DependencyTree::new("t", vec![]).unwrap_err(), TreeError::Empty);
    }

    #[test]
    fn traversal_helpers() {
        let t = DependencyTree::new(
            "t",
            vec![
                node(1, "we", "PRON", 2, "nsubj"),
                node(2, "deal", "VERB", 0, "root"),
                node(3, "with", "ADP", 2, "prep"),
                node(4, "anxiety", "NOUN", 3, "pobj"),
            ],
        )
        .unwrap();
        assert_eq!(t.distance(2, 4), Some(2));
        assert_eq!(t.distance(4, 2), None);
        assert_eq!(t.children(2).count(), 2);
        assert_eq!(t.descendants(3).len(), 1);
    }
}
