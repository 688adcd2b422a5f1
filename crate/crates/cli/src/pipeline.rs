//! Input loading and artifact writing shared by the subcommands.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use tagscope::corpus::{load_corpus, CategoryTaxonomy, CorpusFormat, Membership, Tweet};
use tagscope::diag::Diagnostic;
use tagscope::syntax::{load_parses, DependencyTree};
use tagscope::textprep::{load_word_list, parse_word_list, tokenize_corpus, EchoFilter, NormalizationConfig, TokenizedDoc, DEFAULT_STOPWORDS};

use crate::config::RunConfig;
use crate::Failure;

const MAX_REPORTED_DIAGNOSTICS: usize = 20;

pub fn report_diagnostics(source: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics.iter().take(MAX_REPORTED_DIAGNOSTICS) {
        log::warn!("{}: {d}", source.display());
    }
    if diagnostics.len() > MAX_REPORTED_DIAGNOSTICS {
        log::warn!(
            "{}: {} more records skipped",
            source.display(),
            diagnostics.len() - MAX_REPORTED_DIAGNOSTICS
        );
    }
}

/// A required input: must be configured and must exist.
pub fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    let path = path
        .as_deref()
        .ok_or_else(|| Failure::Data(anyhow!("missing required input --{flag}")))?;
    existing(path, flag)?;
    Ok(path)
}

/// An optional input: if configured, it must exist.
pub fn optional<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<Option<&'a Path>, Failure> {
    match path.as_deref() {
        Some(p) => existing(p, flag).map(|_| Some(p)),
        None => Ok(None),
    }
}

fn existing(path: &Path, flag: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Data(anyhow!("--{flag}: {} does not exist", path.display())))
    }
}

pub fn prepare_out(cfg: &RunConfig) -> anyhow::Result<()> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create output directory {}", cfg.out.display()))
}

pub fn corpus(cfg: &RunConfig) -> anyhow::Result<Vec<Tweet>> {
    let path = cfg.corpus.as_deref().expect("corpus validated");
    let format = cfg
        .format
        .or_else(|| CorpusFormat::from_path(path))
        .ok_or_else(|| anyhow!("cannot infer corpus format of {}; pass --format", path.display()))?;
    let loaded = load_corpus(path, format)?;
    report_diagnostics(path, &loaded.diagnostics);
    if loaded.items.is_empty() {
        return Err(anyhow!("corpus {} has no usable tweets", path.display()));
    }
    Ok(loaded.items)
}

pub fn taxonomy(cfg: &RunConfig) -> anyhow::Result<CategoryTaxonomy> {
    Ok(CategoryTaxonomy::load(cfg.taxonomy.as_deref().expect("taxonomy validated"))?)
}

pub fn normalization(cfg: &RunConfig) -> anyhow::Result<NormalizationConfig> {
    let stopwords = match &cfg.stopwords {
        Some(p) => load_word_list(p)?,
        None => parse_word_list(DEFAULT_STOPWORDS),
    };
    Ok(NormalizationConfig::new(stopwords, cfg.stem))
}

pub fn exclusions(cfg: &RunConfig) -> anyhow::Result<HashSet<String>> {
    Ok(match &cfg.exclusions {
        Some(p) => load_word_list(p)?,
        None => HashSet::new(),
    })
}

/// Normalized tokens per tweet with category-echo words removed.
pub fn content_tokens(
    cfg: &RunConfig,
    corpus: &[Tweet],
    taxonomy: &CategoryTaxonomy,
) -> anyhow::Result<(Vec<TokenizedDoc>, NormalizationConfig)> {
    let norm = normalization(cfg)?;
    let echo = EchoFilter::new(taxonomy, &exclusions(cfg)?);
    let docs = tokenize_corpus(corpus, &norm)
        .into_iter()
        .map(|d| TokenizedDoc {
            tokens: echo.apply(d.tokens),
            ..d
        })
        .collect();
    Ok((docs, norm))
}

/// Documents of each category, in taxonomy order.
pub fn group_docs<'a>(docs: &'a [TokenizedDoc], membership: &Membership) -> Vec<(String, Vec<&'a [String]>)> {
    membership
        .categories
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let members: Vec<&[String]> = docs
                .iter()
                .filter(|d| membership.by_tweet.get(&d.tweet_id).is_some_and(|cs| cs.contains(&c)))
                .map(|d| d.tokens.as_slice())
                .collect();
            (name.clone(), members)
        })
        .collect()
}

pub fn parses(cfg: &RunConfig) -> anyhow::Result<Vec<DependencyTree>> {
    let path = cfg.parses.as_deref().expect("parses validated");
    let loaded = load_parses(path)?;
    report_diagnostics(path, &loaded.diagnostics);
    if loaded.items.is_empty() {
        return Err(anyhow!("no valid dependency trees in {}", path.display()));
    }
    Ok(loaded.items)
}

pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> anyhow::Result<usize>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    let mut n = 0;
    for row in rows {
        w.write_record(row)?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    std::fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))
}

pub fn fmt_score(x: f64) -> String {
    format!("{x:.6}")
}
