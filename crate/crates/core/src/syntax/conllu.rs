//! Six-column CoNLL-U subset: `ID FORM LEMMA UPOS HEAD DEPREL`, one block per
//! tweet, each block introduced by `# tweet_id = <id>`.

use std::path::Path;

use super::{DepNode, DependencyTree};
use crate::diag::{Diagnostic, Loaded};
use crate::error::{Error, Result};

pub fn load_parses(path: &Path) -> Result<Loaded<Vec<DependencyTree>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_conllu(&text))
}

/// Parses every block; blocks that are malformed or violate the tree
/// invariants are skipped with a diagnostic at the block's first line.
pub fn parse_conllu(text: &str) -> Loaded<Vec<DependencyTree>> {
    let mut trees = Vec::new();
    let mut diagnostics = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    let lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            flush(&mut block, &mut trees, &mut diagnostics);
        } else {
            block.push((i + 1, line));
        }
    }
    flush(&mut block, &mut trees, &mut diagnostics);
    Loaded {
        items: trees,
        diagnostics,
    }
}

fn flush(block: &mut Vec<(usize, &str)>, trees: &mut Vec<DependencyTree>, diagnostics: &mut Vec<Diagnostic>) {
    if block.is_empty() {
        return;
    }
    let first_line = block[0].0;
    match parse_block(block) {
        Ok(tree) => trees.push(tree),
        Err(msg) => diagnostics.push(Diagnostic::new(first_line, msg)),
    }
    block.clear();
}

fn parse_block(block: &[(usize, &str)]) -> Result<DependencyTree, String> {
    let mut tweet_id = None;
    let mut nodes = Vec::new();
    for &(line_no, line) in block {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "tweet_id" {
                    tweet_id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(format!("line {line_no}: expected 6 columns, found {}", cols.len()));
        }
        let index = cols[0]
            .parse::<usize>()
            .map_err(|_| format!("line {line_no}: bad ID {:?}", cols[0]))?;
        let head = cols[4]
            .parse::<usize>()
            .map_err(|_| format!("line {line_no}: bad HEAD {:?}", cols[4]))?;
        nodes.push(DepNode {
            index,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            pos: cols[3].to_string(),
            head,
            rel: cols[5].to_string(),
        });
    }
    let tweet_id = tweet_id
        .filter(|id| !id.is_empty())
        .ok_or_else(|| "block lacks a '# tweet_id = ...' comment".to_string())?;
    DependencyTree::new(tweet_id.clone(), nodes).map_err(|e| format!("tweet {tweet_id}: {e}"))
}

/// Canonical serialization: blocks separated by one blank line.
pub fn write_conllu(trees: &[DependencyTree]) -> String {
    trees
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}
