//! Five-class sentiment labels, a valence-lexicon scorer, ingestion of
//! externally computed labels, and per-category distributions with neutral
//! tweets excluded.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Membership, Tweet};
use crate::diag::{Diagnostic, Loaded};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::textprep::{normalize, NormalizationConfig};

/// Shipped default valence lexicon (`token,valence`).
pub const DEFAULT_LEXICON: &str = include_str!("../data/valence_en.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentLabel {
    StronglyPositive,
    Positive,
    Neutral,
    Negative,
    StronglyNegative,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 5] = [
        SentimentLabel::StronglyPositive,
        SentimentLabel::Positive,
        SentimentLabel::Neutral,
        SentimentLabel::Negative,
        SentimentLabel::StronglyNegative,
    ];

    /// The four labels that survive neutral exclusion, in reporting order.
    pub const POLAR: [SentimentLabel; 4] = [
        SentimentLabel::StronglyPositive,
        SentimentLabel::Positive,
        SentimentLabel::Negative,
        SentimentLabel::StronglyNegative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::StronglyPositive => "strongly_positive",
            SentimentLabel::Positive => "positive",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Negative => "negative",
            SentimentLabel::StronglyNegative => "strongly_negative",
        }
    }

    /// Label with valence sign flipped.
    pub fn mirrored(self) -> Self {
        match self {
            SentimentLabel::StronglyPositive => SentimentLabel::StronglyNegative,
            SentimentLabel::Positive => SentimentLabel::Negative,
            SentimentLabel::Neutral => SentimentLabel::Neutral,
            SentimentLabel::Negative => SentimentLabel::Positive,
            SentimentLabel::StronglyNegative => SentimentLabel::StronglyPositive,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SentimentLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown sentiment label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<F> {
    pub strong: F,
    pub weak: F,
}

impl<F: Real> Thresholds<F> {
    pub fn new(strong: F, weak: F) -> Result<Self> {
        if !(F::zero() < weak && weak < strong && strong <= F::one()) {
            return Err(Error::invalid(format!(
                "thresholds need 0 < weak < strong <= 1, got weak={weak} strong={strong}"
            )));
        }
        Ok(Thresholds { strong, weak })
    }

    pub fn label(&self, mean: F) -> SentimentLabel {
        if mean >= self.strong {
            SentimentLabel::StronglyPositive
        } else if mean >= self.weak {
            SentimentLabel::Positive
        } else if mean > -self.weak {
            SentimentLabel::Neutral
        } else if mean > -self.strong {
            SentimentLabel::Negative
        } else {
            SentimentLabel::StronglyNegative
        }
    }
}

impl<F: Real> Default for Thresholds<F> {
    fn default() -> Self {
        Thresholds {
            strong: F::from_f64_lossy(0.5),
            weak: F::from_f64_lossy(0.05),
        }
    }
}

pub type ValenceLexicon<F> = HashMap<String, F>;

/// Parses `token,valence` rows. A non-numeric first row is taken as a header.
/// Rows with valences outside [-1, 1] are skipped with a diagnostic.
pub fn parse_lexicon<F: Real, R: Read>(reader: R) -> Result<Loaded<ValenceLexicon<F>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut lexicon = HashMap::new();
    let mut diagnostics = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|source| Error::Csv {
            context: "valence lexicon".into(),
            source,
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let (Some(token), Some(raw)) = (rec.get(0), rec.get(1)) else {
            diagnostics.push(Diagnostic::new(line, "expected token,valence"));
            continue;
        };
        match raw.parse::<f64>() {
            Ok(v) if (-1.0..=1.0).contains(&v) => {
                lexicon.insert(crate::textprep::casefold(token), F::from_f64_lossy(v));
            }
            Ok(v) => diagnostics.push(Diagnostic::new(line, format!("valence {v} outside [-1, 1]"))),
            Err(_) if i == 0 => {}
            Err(_) => diagnostics.push(Diagnostic::new(line, format!("bad valence {raw:?}"))),
        }
    }
    Ok(Loaded {
        items: lexicon,
        diagnostics,
    })
}

pub fn load_lexicon<F: Real>(path: &Path) -> Result<Loaded<ValenceLexicon<F>>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(file)
}

/// Mean valence of the tokens found in the lexicon (zero when none are),
/// mapped onto the five labels.
pub fn score_lexicon<F: Real, S: AsRef<str>>(
    tokens: &[S],
    lexicon: &ValenceLexicon<F>,
    thresholds: &Thresholds<F>,
) -> SentimentLabel {
    let (sum, hits) = tokens
        .iter()
        .filter_map(|t| lexicon.get(t.as_ref()))
        .fold((F::zero(), 0u64), |(s, n), &v| (s + v, n + 1));
    let mean = if hits == 0 { F::zero() } else { sum / F::from_count(hits) };
    thresholds.label(mean)
}

/// Source of per-tweet labels.
pub trait SentimentScorer {
    /// `None` when the scorer has nothing for this tweet.
    fn score(&self, tweet: &Tweet) -> Option<SentimentLabel>;

    fn score_all(&self, corpus: &[Tweet]) -> BTreeMap<String, SentimentLabel> {
        corpus
            .iter()
            .filter_map(|t| self.score(t).map(|l| (t.id.clone(), l)))
            .collect()
    }
}

pub struct LexiconScorer<F> {
    pub lexicon: ValenceLexicon<F>,
    pub thresholds: Thresholds<F>,
    pub normalization: NormalizationConfig,
}

impl<F: Real> SentimentScorer for LexiconScorer<F> {
    fn score(&self, tweet: &Tweet) -> Option<SentimentLabel> {
        let tokens = normalize(&tweet.text, &self.normalization);
        Some(score_lexicon(&tokens, &self.lexicon, &self.thresholds))
    }
}

/// Labels computed elsewhere, keyed by tweet id.
#[derive(Debug, Clone, Default)]
pub struct IngestedScores(pub HashMap<String, SentimentLabel>);

impl SentimentScorer for IngestedScores {
    fn score(&self, tweet: &Tweet) -> Option<SentimentLabel> {
        self.0.get(&tweet.id).copied()
    }
}

#[derive(Deserialize)]
struct ScoreRecord {
    id: String,
    label: String,
}

/// Reads `{"id": ..., "label": ...}` lines. Unknown labels are skipped; a
/// repeated id overrides the earlier record.
pub fn read_scores<R: Read>(reader: R) -> Result<Loaded<HashMap<String, SentimentLabel>>> {
    let mut labels = HashMap::new();
    let mut diagnostics = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<scores>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ScoreRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                diagnostics.push(Diagnostic::new(i + 1, format!("malformed record: {e}")));
                continue;
            }
        };
        match record.label.parse::<SentimentLabel>() {
            Ok(label) => {
                if labels.insert(record.id.clone(), label).is_some() {
                    diagnostics.push(Diagnostic::new(
                        i + 1,
                        format!("duplicate id {:?}; last record wins", record.id),
                    ));
                }
            }
            Err(e) => diagnostics.push(Diagnostic::new(i + 1, format!("{e}; record skipped"))),
        }
    }
    Ok(Loaded {
        items: labels,
        diagnostics,
    })
}

pub fn ingest_scores(path: &Path) -> Result<Loaded<HashMap<String, SentimentLabel>>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_scores(file)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentimentDistribution<S> {
    pub category: String,
    /// Tweets per label, indexed like [`SentimentLabel::ALL`].
    pub counts: [u64; 5],
    /// Percentages of the four polar labels, in [`SentimentLabel::POLAR`] order.
    pub shares: [S; 4],
    /// No polar tweets: shares are all zero.
    pub insufficient_data: bool,
}

impl<S: Scalar> SentimentDistribution<S> {
    pub fn share(&self, label: SentimentLabel) -> Option<&S> {
        SentimentLabel::POLAR
            .iter()
            .position(|&l| l == label)
            .map(|i| &self.shares[i])
    }
}

/// Percentages of the polar counts. The last non-zero label takes the
/// remainder `100 - (sum of earlier shares)`, so the shares add to 100 in
/// their natural order even in floating point.
pub fn polar_shares<S: Scalar>(polar: [u64; 4]) -> Option<[S; 4]> {
    let total: u64 = polar.iter().sum();
    if total == 0 {
        return None;
    }
    let hundred = S::from_count(100);
    let last = polar.iter().rposition(|&c| c > 0)?;
    let mut shares: [S; 4] = std::array::from_fn(|_| S::zero());
    let mut acc = S::zero();
    for i in 0..last {
        shares[i] = hundred.clone() * S::from_count(polar[i]) / S::from_count(total);
        acc = acc + shares[i].clone();
    }
    shares[last] = hundred - acc;
    Some(shares)
}

/// Per category (in membership order), label counts over member tweets and
/// the polar percentages with neutral tweets excluded.
pub fn category_distribution<S: Scalar>(
    labels: &BTreeMap<String, SentimentLabel>,
    membership: &Membership,
) -> Vec<SentimentDistribution<S>> {
    let mut counts = vec![[0u64; 5]; membership.categories.len()];
    for (id, cats) in &membership.by_tweet {
        if let Some(label) = labels.get(id) {
            for &c in cats {
                counts[c][label.index()] += 1;
            }
        }
    }
    membership
        .categories
        .iter()
        .zip(counts)
        .map(|(category, counts)| {
            let polar = SentimentLabel::POLAR.map(|l| counts[l.index()]);
            let shares = polar_shares(polar);
            SentimentDistribution {
                category: category.clone(),
                counts,
                insufficient_data: shares.is_none(),
                shares: shares.unwrap_or_else(|| std::array::from_fn(|_| S::zero())),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn lex(entries: &[(&str, f64)]) -> ValenceLexicon<f64> {
        entries.iter().map(|(t, v)| (t.to_string(), *v)).collect()
    }

    #[test]
    fn lexicon_scoring() {
        let th = Thresholds::default();
        let l = lex(&[("great", 0.8), ("good", 0.6), ("meh", 0.3), ("bad", -0.3)]);
        assert_eq!(score_lexicon(&["nothing"], &l, &th), SentimentLabel::Neutral);
        assert_eq!(score_lexicon::<f64, &str>(&[], &l, &th), SentimentLabel::Neutral);
        assert_eq!(score_lexicon(&["great", "good"], &l, &th), SentimentLabel::StronglyPositive);
        assert_eq!(score_lexicon(&["meh", "bad"], &l, &th), SentimentLabel::Neutral);
        assert_eq!(score_lexicon(&["meh"], &l, &th), SentimentLabel::Positive);
        assert_eq!(score_lexicon(&["bad"], &l, &th), SentimentLabel::Negative);
    }

    #[test]
    fn threshold_boundaries() {
        let th = Thresholds::new(0.5, 0.05).unwrap();
        assert_eq!(th.label(0.5), SentimentLabel::StronglyPositive);
        assert_eq!(th.label(0.05), SentimentLabel::Positive);
        assert_eq!(th.label(-0.05), SentimentLabel::Negative);
        assert_eq!(th.label(-0.5), SentimentLabel::StronglyNegative);
        assert!(Thresholds::new(0.05, 0.5).is_err());
        assert!(Thresholds::new(1.5, 0.5).is_err());
    }

    #[test]
    fn score_ingestion() {
        let data = concat!(
            r#"{"id":"1","label":"positive"}"#, "\n",
            r#"{"id":"2","label":"meh"}"#, "\n",
            r#"{"id":"1","label":"negative"}"#, "\n",
        );
        let loaded = read_scores(data.as_bytes()).unwrap();
        assert_eq!(loaded.items.len(), 1);
        assert_eq!(loaded.items["1"], SentimentLabel::Negative);
        assert_eq!(loaded.diagnostics.len(), 2);
        assert_eq!(loaded.diagnostics[0].line, 2);
        assert!(read_scores(&b""[..]).unwrap().items.is_empty());
        assert!(ingest_scores(Path::new("/no/such/scores.jsonl")).is_err());
    }

    #[test]
    fn lexicon_parsing() {
        let loaded = parse_lexicon::<f64, _>("token,valence\nGood,0.5\nbad,-2\nworse,x\n".as_bytes()).unwrap();
        assert_eq!(loaded.items.len(), 1);
        assert_eq!(loaded.items["good"], 0.5);
        assert_eq!(loaded.diagnostics.len(), 2);
        let default = parse_lexicon::<f64, _>(DEFAULT_LEXICON.as_bytes()).unwrap();
        assert!(default.diagnostics.is_empty());
        assert!(default.items.len() > 100);
    }

    fn membership_with(counts: [u64; 5]) -> (BTreeMap<String, SentimentLabel>, Membership) {
        let mut labels = BTreeMap::new();
        let mut by_tweet = BTreeMap::new();
        let mut n = 0;
        for (label, &c) in SentimentLabel::ALL.iter().zip(&counts) {
            for _ in 0..c {
                labels.insert(format!("t{n}"), *label);
                by_tweet.insert(format!("t{n}"), vec![0]);
                n += 1;
            }
        }
        let membership = Membership {
            categories: vec!["only".into()],
            by_tweet,
        };
        (labels, membership)
    }

    #[test]
    fn fixture_distribution() {
        let (labels, membership) = membership_with([10, 20, 50, 15, 5]);
        let d = &category_distribution::<f64>(&labels, &membership)[0];
        assert_eq!(d.shares, [20.0, 40.0, 30.0, 10.0]);
        assert!(!d.insufficient_data);
        let exact = &category_distribution::<BigRational>(&labels, &membership)[0];
        assert_eq!(exact.shares[1], BigRational::from_count(40));
    }

    #[test]
    fn all_neutral_flagged() {
        let (labels, membership) = membership_with([0, 0, 7, 0, 0]);
        let d = &category_distribution::<f64>(&labels, &membership)[0];
        assert!(d.insufficient_data);
        assert_eq!(d.shares, [0.0; 4]);
    }

    #[test]
    fn remainder_never_negative() {
        let s = polar_shares::<f64>([1, 0, 0, 0]).unwrap();
        assert_eq!(s, [100.0, 0.0, 0.0, 0.0]);
        let s = polar_shares::<f64>([1, 1, 1, 0]).unwrap();
        assert!(s.iter().all(|&x| x >= 0.0));
        assert_eq!(s[3], 0.0);
    }
}
