use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use anyhow::{anyhow, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tagscope::corpus::{top_hashtags, trend_series, Membership};
use tagscope::lexstats::{bigram_collocations, common_words, distinctive_words, GroupLexicon};
use tagscope::sentiment::{
    category_distribution, ingest_scores, parse_lexicon, load_lexicon, IngestedScores, LexiconScorer, SentimentLabel,
    SentimentScorer, Thresholds, DEFAULT_LEXICON,
};
use tagscope::syntax::{distinctive_verbs, verb_noun_pairs, DependencyTree, VERB_POS};
use tagscope::textprep::{casefold, normalize, NormalizationConfig};
use tagscope::topics::{derive_gold, evaluate, train, ModelDump, SeedSpec, UNASSIGNED};
use tagscope::{Error, Report, SeededLdaModel};

use crate::config::RunConfig;
use crate::pipeline::{self, fmt_score, optional, required, write_csv, write_json};
use crate::{Command, Failure};

/// Artifacts `report` looks for, in output order.
const CSV_ARTIFACTS: [&str; 8] = [
    "trends.csv",
    "top_hashtags.csv",
    "words.csv",
    "bigrams.csv",
    "sentiment.csv",
    "verbs.csv",
    "pairs.csv",
    "predictions.csv",
];

pub fn run(command: Command, cfg: &RunConfig) -> Result<String, Failure> {
    check_inputs(command, cfg)?;
    if command != Command::Report {
        pipeline::prepare_out(cfg)?;
    }
    let summary = match command {
        Command::Trends => trends(cfg),
        Command::Words => words(cfg),
        Command::Bigrams => bigrams(cfg),
        Command::Sentiment => sentiment(cfg),
        Command::Verbs => verbs(cfg),
        Command::Pairs => pairs(cfg),
        Command::TopicsTrain => topics_train(cfg),
        Command::TopicsClassify => topics_classify(cfg),
        Command::TopicsEval => topics_eval(cfg),
        Command::Report => report(cfg),
    }?;
    Ok(summary)
}

/// Every input the subcommand will read is checked before anything runs.
fn check_inputs(command: Command, cfg: &RunConfig) -> Result<(), Failure> {
    use Command::*;
    let needs_corpus = !matches!(command, Pairs | TopicsClassify | Report);
    if needs_corpus {
        required(&cfg.corpus, "corpus")?;
        required(&cfg.taxonomy, "taxonomy")?;
    }
    match command {
        Words | Bigrams | TopicsTrain => {
            optional(&cfg.stopwords, "stopwords")?;
            optional(&cfg.exclusions, "exclusions")?;
        }
        Sentiment => {
            optional(&cfg.stopwords, "stopwords")?;
            optional(&cfg.lexicon, "lexicon")?;
            optional(&cfg.scores, "scores")?;
        }
        Verbs | Pairs => {
            required(&cfg.parses, "parses")?;
        }
        _ => {}
    }
    match command {
        TopicsTrain => {
            required(&cfg.seed_file, "seed-file")?;
        }
        TopicsClassify => {
            required(&Some(cfg.model_path()), "model")?;
        }
        TopicsEval => {
            required(&Some(cfg.predictions_path()), "predictions")?;
        }
        Report if !cfg.out.is_dir() => {
            return Err(Failure::Data(anyhow!("output directory {} does not exist", cfg.out.display())));
        }
        _ => {}
    }
    Ok(())
}

fn membership(cfg: &RunConfig) -> anyhow::Result<(Vec<tagscope::corpus::Tweet>, tagscope::corpus::CategoryTaxonomy, Membership)> {
    let corpus = pipeline::corpus(cfg)?;
    let taxonomy = pipeline::taxonomy(cfg)?;
    let membership = Membership::build(&corpus, &taxonomy);
    Ok((corpus, taxonomy, membership))
}

fn trends(cfg: &RunConfig) -> anyhow::Result<String> {
    let corpus = pipeline::corpus(cfg)?;
    let taxonomy = pipeline::taxonomy(cfg)?;
    let series = trend_series(&corpus, &taxonomy);
    let days = series.first().map_or(0, |s| s.points.len());
    let rows = series.iter().flat_map(|s| {
        s.points
            .iter()
            .map(move |(day, n)| vec![s.category.clone(), day.to_string(), n.to_string()])
    });
    write_csv(&cfg.out.join("trends.csv"), &["category", "date", "count"], rows)?;
    let tags = top_hashtags(&corpus, cfg.top_n);
    let rows = tags
        .iter()
        .enumerate()
        .map(|(i, (tag, n))| vec![(i + 1).to_string(), tag.clone(), n.to_string()]);
    write_csv(&cfg.out.join("top_hashtags.csv"), &["rank", "hashtag", "count"], rows)?;
    Ok(format!(
        "trends: {} tweets, {} series over {days} days -> {}",
        corpus.len(),
        series.len(),
        cfg.out.join("trends.csv").display()
    ))
}

fn lexicons(cfg: &RunConfig) -> anyhow::Result<Vec<GroupLexicon>> {
    let (corpus, taxonomy, membership) = membership(cfg)?;
    let (docs, _) = pipeline::content_tokens(cfg, &corpus, &taxonomy)?;
    Ok(pipeline::group_docs(&docs, &membership)
        .into_iter()
        .map(|(name, docs)| {
            let mut lex = GroupLexicon::new(name);
            for d in docs {
                lex.add_doc(d);
            }
            lex
        })
        .collect())
}

fn words(cfg: &RunConfig) -> anyhow::Result<String> {
    let lexicons = lexicons(cfg)?;
    let common = common_words(&lexicons, cfg.min_groups, cfg.common_top_n)?;
    let common_set: HashSet<String> = common.iter().map(|c| c.token.clone()).collect();
    let mut rows: Vec<Vec<String>> = common
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                "(common)".to_string(),
                (i + 1).to_string(),
                c.token.clone(),
                c.total_freq.to_string(),
                c.group_count.to_string(),
            ]
        })
        .collect();
    for lex in &lexicons {
        for (i, (token, n)) in distinctive_words(lex, &common_set, cfg.top_n).into_iter().enumerate() {
            let share = n as f64 / lex.total_tokens as f64;
            rows.push(vec![lex.category.clone(), (i + 1).to_string(), token, n.to_string(), fmt_score(share)]);
        }
    }
    let path = cfg.out.join("words.csv");
    write_csv(&path, &["category", "rank", "term", "count", "score"], rows)?;
    Ok(format!(
        "words: {} common words, distinctive words for {} categories -> {}",
        common.len(),
        lexicons.len(),
        path.display()
    ))
}

fn bigrams(cfg: &RunConfig) -> anyhow::Result<String> {
    let lexicons = lexicons(cfg)?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for lex in &lexicons {
        match bigram_collocations::<f64>(lex, cfg.min_count, cfg.top_n) {
            Ok(stats) => {
                for (i, s) in stats.iter().enumerate() {
                    rows.push(vec![
                        lex.category.clone(),
                        (i + 1).to_string(),
                        format!("{} {}", s.bigram.0, s.bigram.1),
                        s.observed.o11.to_string(),
                        fmt_score(s.chi2),
                    ]);
                }
            }
            Err(Error::NoBigrams(category)) => {
                log::warn!("category {category:?} has no bigrams; skipped");
                skipped += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let path = cfg.out.join("bigrams.csv");
    let n = write_csv(&path, &["category", "rank", "term", "count", "score"], rows)?;
    Ok(format!(
        "bigrams: {n} collocations (min count {}), {skipped} categories without bigrams -> {}",
        cfg.min_count,
        path.display()
    ))
}

fn sentiment(cfg: &RunConfig) -> anyhow::Result<String> {
    let (corpus, _, membership) = membership(cfg)?;
    let labels: BTreeMap<String, SentimentLabel> = match &cfg.scores {
        Some(path) => {
            let loaded = ingest_scores(path)?;
            pipeline::report_diagnostics(path, &loaded.diagnostics);
            let labels = IngestedScores(loaded.items).score_all(&corpus);
            if labels.len() < corpus.len() {
                log::warn!("{} tweets have no sentiment score", corpus.len() - labels.len());
            }
            labels
        }
        None => {
            let lexicon = match &cfg.lexicon {
                Some(path) => {
                    let loaded = load_lexicon(path)?;
                    pipeline::report_diagnostics(path, &loaded.diagnostics);
                    loaded.items
                }
                None => parse_lexicon(DEFAULT_LEXICON.as_bytes())?.items,
            };
            let norm = pipeline::normalization(cfg)?;
            let scorer = LexiconScorer {
                lexicon,
                thresholds: Thresholds::new(cfg.strong, cfg.weak)?,
                normalization: NormalizationConfig::new(norm.stopwords, false),
            };
            scorer.score_all(&corpus)
        }
    };
    let dists = category_distribution::<f64>(&labels, &membership);
    let mut rows = Vec::new();
    for d in &dists {
        for (i, label) in SentimentLabel::ALL.iter().enumerate() {
            let pct = match d.share(*label) {
                Some(s) if !d.insufficient_data => fmt_score(*s),
                _ => String::new(),
            };
            rows.push(vec![d.category.clone(), label.as_str().to_string(), d.counts[i].to_string(), pct]);
        }
    }
    let path = cfg.out.join("sentiment.csv");
    write_csv(&path, &["category", "label", "count", "percentage"], rows)?;
    let thin = dists.iter().filter(|d| d.insufficient_data).count();
    Ok(format!(
        "sentiment: {} labelled tweets, {} categories ({thin} without polar tweets) -> {}",
        labels.len(),
        dists.len(),
        path.display()
    ))
}

fn verbs(cfg: &RunConfig) -> anyhow::Result<String> {
    let trees = pipeline::parses(cfg)?;
    let (_, _, membership) = membership(cfg)?;
    let groups: Vec<(String, Vec<&DependencyTree>)> = membership
        .categories
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let members = trees
                .iter()
                .filter(|t| membership.by_tweet.get(t.tweet_id()).is_some_and(|cs| cs.contains(&c)))
                .collect();
            (name.clone(), members)
        })
        .collect();
    let profiles = distinctive_verbs::<f64>(&groups, cfg.top_n);
    let rows = profiles.iter().flat_map(|p| {
        p.verbs
            .iter()
            .map(move |(verb, n, score)| vec![p.category.clone(), verb.clone(), n.to_string(), fmt_score(*score)])
    });
    let path = cfg.out.join("verbs.csv");
    let n = write_csv(&path, &["category", "verb", "count", "score"], rows)?;
    Ok(format!("verbs: {n} distinctive verbs from {} parses -> {}", trees.len(), path.display()))
}

/// The `n` most frequent verb lemmas, ties by lemma.
fn frequent_verbs(trees: &[DependencyTree], n: usize) -> Vec<String> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for node in trees.iter().flat_map(|t| t.nodes()).filter(|n| n.pos == VERB_POS) {
        *counts.entry(casefold(&node.lemma)).or_default() += 1;
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.into_iter().take(n).map(|(v, _)| v).collect()
}

fn pairs(cfg: &RunConfig) -> anyhow::Result<String> {
    let trees = pipeline::parses(cfg)?;
    let verbs = if cfg.verbs.is_empty() {
        frequent_verbs(&trees, cfg.top_n)
    } else {
        cfg.verbs.clone()
    };
    let relations = cfg.relation_config();
    let mut rows = Vec::new();
    for verb in &verbs {
        let table = verb_noun_pairs(&trees, verb, &relations);
        for (noun, n) in table.nouns.iter().take(cfg.top_n) {
            rows.push(vec![table.verb.clone(), noun.clone(), n.to_string()]);
        }
    }
    let path = cfg.out.join("pairs.csv");
    let n = write_csv(&path, &["verb", "noun", "count"], rows)?;
    Ok(format!("pairs: {n} verb-noun pairs for {} verbs -> {}", verbs.len(), path.display()))
}

fn seed_spec(cfg: &RunConfig, norm: &NormalizationConfig) -> anyhow::Result<SeedSpec> {
    let path = cfg.seed_file.as_deref().expect("seed file validated");
    let raw = SeedSpec::load(path, cfg.unseeded)?;
    raw.map_words(|w| normalize(w, norm))
        .with_context(|| format!("seed words in {} do not survive normalization", path.display()))
}

fn topics_train(cfg: &RunConfig) -> anyhow::Result<String> {
    let corpus = pipeline::corpus(cfg)?;
    let taxonomy = pipeline::taxonomy(cfg)?;
    let (docs, norm) = pipeline::content_tokens(cfg, &corpus, &taxonomy)?;
    let seeds = seed_spec(cfg, &norm)?;
    let model = train(&docs, seeds, cfg.hyperparameters())?;
    let path = cfg.model_path();
    model.save(&path)?;
    Ok(format!(
        "topics-train: {} documents ({} empty dropped), {} words, {} topics, {} sweeps, {} seeds missing -> {}",
        model.num_docs(),
        model.dropped_docs().len(),
        model.vocabulary().len(),
        model.num_topics(),
        model.sweeps(),
        model.missing_seeds().len(),
        path.display()
    ))
}

fn topics_classify(cfg: &RunConfig) -> anyhow::Result<String> {
    let model = SeededLdaModel::load(&cfg.model_path())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut predictions: BTreeMap<String, String> = model
        .classify_all(&mut rng)
        .into_iter()
        .map(|(id, p)| (id, p.label().to_string()))
        .collect();
    for id in model.dropped_docs() {
        predictions.insert(id.clone(), UNASSIGNED.to_string());
    }
    let path = cfg.predictions_path();
    let rows = predictions.iter().map(|(id, label)| [id.as_str(), label.as_str()]);
    write_csv(&path, &["tweet_id", "label"], rows)?;
    let unassigned = predictions.values().filter(|l| *l == UNASSIGNED).count();
    Ok(format!(
        "topics-classify: {} tweets, {unassigned} unassigned -> {}",
        predictions.len(),
        path.display()
    ))
}

fn read_predictions(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("malformed predictions in {}", path.display()))?;
        let (Some(id), Some(label)) = (rec.get(0), rec.get(1)) else {
            return Err(anyhow!("{}: expected tweet_id,label rows", path.display()));
        };
        out.insert(id.to_string(), label.to_string());
    }
    Ok(out)
}

#[derive(Serialize)]
struct EvaluationOutput<'a> {
    gold_policy: &'a str,
    #[serde(flatten)]
    report: &'a Report,
}

fn topics_eval(cfg: &RunConfig) -> anyhow::Result<String> {
    let predictions = read_predictions(&cfg.predictions_path())?;
    let (_, _, membership) = membership(cfg)?;
    let gold = derive_gold(&membership, cfg.gold_policy);
    let matched: BTreeMap<String, String> = predictions
        .into_iter()
        .filter(|(id, _)| gold.contains_key(id))
        .collect();
    let report: Report = evaluate(&matched, &gold).context("predictions do not cover every gold-labelled tweet")?;
    let path = cfg.out.join("report.json");
    write_json(
        &path,
        &EvaluationOutput {
            gold_policy: cfg.gold_policy.as_str(),
            report: &report,
        },
    )?;
    Ok(format!(
        "topics-eval: {} tweets ({} gold policy), accuracy {:.4}, macro F1 {:.4} -> {}",
        report.total,
        cfg.gold_policy.as_str(),
        report.accuracy,
        report.macro_avg.f1,
        path.display()
    ))
}

#[derive(Serialize)]
struct ModelSummary {
    documents: usize,
    dropped: usize,
    vocabulary: usize,
    topics: usize,
    seeded: Vec<String>,
    sweeps: usize,
}

#[derive(Serialize)]
struct Summary {
    artifacts: BTreeMap<String, usize>,
    model: Option<ModelSummary>,
    evaluation: Option<serde_json::Value>,
}

fn count_rows(path: &Path) -> anyhow::Result<usize> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut n = 0;
    for rec in rdr.records() {
        rec.with_context(|| format!("malformed {}", path.display()))?;
        n += 1;
    }
    Ok(n)
}

fn report(cfg: &RunConfig) -> anyhow::Result<String> {
    let mut artifacts = BTreeMap::new();
    for name in CSV_ARTIFACTS {
        let path = cfg.out.join(name);
        if path.is_file() {
            artifacts.insert(name.to_string(), count_rows(&path)?);
        }
    }
    let model_path = cfg.out.join("model.json");
    let model = if model_path.is_file() {
        let json = std::fs::read_to_string(&model_path)?;
        let dump = ModelDump::from_json(&json)?;
        Some(ModelSummary {
            documents: dump.documents.len(),
            dropped: dump.dropped.len(),
            vocabulary: dump.vocabulary.len(),
            topics: dump.seeds.num_topics(),
            seeded: dump.seeds.seeded.iter().map(|(n, _)| n.clone()).collect(),
            sweeps: dump.sweeps,
        })
    } else {
        None
    };
    let report_path = cfg.out.join("report.json");
    let evaluation = if report_path.is_file() {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report_path)?)
            .with_context(|| format!("malformed {}", report_path.display()))?;
        let pick = |k: &str| v.get(k).cloned().unwrap_or(serde_json::Value::Null);
        Some(serde_json::json!({
            "gold_policy": pick("gold_policy"),
            "total": pick("total"),
            "accuracy": pick("accuracy"),
            "macro_avg": pick("macro_avg"),
            "micro_avg": pick("micro_avg"),
        }))
    } else {
        None
    };
    if artifacts.is_empty() && model.is_none() && evaluation.is_none() {
        return Err(anyhow!("no artifacts found in {}", cfg.out.display()));
    }
    let found = artifacts.len() + usize::from(model.is_some()) + usize::from(evaluation.is_some());
    let path = cfg.out.join("summary.json");
    write_json(&path, &Summary { artifacts, model, evaluation })?;
    Ok(format!("report: summarized {found} artifacts -> {}", path.display()))
}
