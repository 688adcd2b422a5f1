//! Tweet ingestion, hashtag extraction, category assignment and trend counts.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Loaded};
use crate::error::{Error, Result};
use crate::ordered::parse_ordered_lists;
use crate::textprep::casefold;

/// Pseudo-category that collects tweets matching no taxonomy hashtag in trend output.
pub const UNCATEGORIZED: &str = "(uncategorized)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    /// Casefolded tags without the leading `#`, deduplicated, in order of first appearance.
    pub hashtags: Vec<String>,
}

impl Tweet {
    pub fn new(id: impl Into<String>, timestamp: DateTime<Utc>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut seen = HashSet::new();
        let hashtags = extract_hashtags(&text)
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect();
        Tweet {
            id: id.into(),
            timestamp: timestamp.with_nanosecond(0).unwrap_or(timestamp),
            text,
            hashtags,
        }
    }

    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

fn is_tag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Every maximal `[letter|digit|_]` run directly after a `#`, casefolded, in
/// order of appearance. Duplicates are kept.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    let mut tags = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c != '#' {
            continue;
        }
        let start = i + c.len_utf8();
        let mut end = start;
        while let Some(&(j, d)) = chars.peek() {
            if !is_tag_char(d) {
                break;
            }
            end = j + d.len_utf8();
            chars.next();
        }
        if end > start {
            tags.push(casefold(&text[start..end]));
        }
    }
    tags
}

/// Normalizes a hashtag as written in a taxonomy or seed file: leading `#`
/// characters removed, casefolded. Returns `None` if nothing valid remains.
pub fn normalize_tag(raw: &str) -> Option<String> {
    let body = raw.trim().trim_start_matches('#');
    if body.is_empty() || !body.chars().all(is_tag_char) {
        return None;
    }
    Some(casefold(body))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" | "json" => Some(CorpusFormat::Jsonl),
            "csv" => Some(CorpusFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(Error::invalid(format!("unknown corpus format {other:?}"))),
        }
    }
}

/// Parses an ISO-8601 / RFC 3339 instant with zone, or the classic Twitter
/// `created_at` layout (`Sat Mar 14 10:00:00 +0000 2020`).
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    DateTime::parse_from_rfc3339(s)
        .or_else(|_| DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y"))
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Loaded<Vec<Tweet>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), format)
}

pub fn read_corpus<R: Read>(reader: R, format: CorpusFormat) -> Result<Loaded<Vec<Tweet>>> {
    let mut sink = RecordSink::default();
    match format {
        CorpusFormat::Jsonl => read_jsonl(reader, &mut sink)?,
        CorpusFormat::Csv => read_csv(reader, &mut sink)?,
    }
    Ok(Loaded {
        items: sink.tweets,
        diagnostics: sink.diagnostics,
    })
}

#[derive(Deserialize)]
struct JsonRecord {
    id: String,
    created_at: String,
    text: String,
}

#[derive(Default)]
struct RecordSink {
    tweets: Vec<Tweet>,
    seen: HashSet<String>,
    diagnostics: Vec<Diagnostic>,
}

impl RecordSink {
    fn push(&mut self, line: usize, id: &str, created_at: &str, text: &str) {
        if id.is_empty() {
            self.diagnostics.push(Diagnostic::new(line, "empty id; record skipped"));
            return;
        }
        let Some(ts) = parse_timestamp(created_at) else {
            self.diagnostics.push(Diagnostic::new(
                line,
                format!("unparseable timestamp {created_at:?} for id {id:?}; record skipped"),
            ));
            return;
        };
        if !self.seen.insert(id.to_string()) {
            self.diagnostics.push(Diagnostic::new(
                line,
                format!("duplicate id {id:?}; later record skipped"),
            ));
            return;
        }
        self.tweets.push(Tweet::new(id, ts, text));
    }
}

fn read_jsonl<R: Read>(reader: R, sink: &mut RecordSink) -> Result<()> {
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<corpus>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonRecord>(&line) {
            Ok(r) => sink.push(i + 1, &r.id, &r.created_at, &r.text),
            Err(e) => sink
                .diagnostics
                .push(Diagnostic::new(i + 1, format!("malformed record: {e}"))),
        }
    }
    Ok(())
}

fn read_csv<R: Read>(reader: R, sink: &mut RecordSink) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|source| Error::Csv {
        context: "corpus header".into(),
        source,
    })?;
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::invalid(format!("corpus CSV lacks a {name:?} column")))
    };
    let (id_col, ts_col, text_col) = (column("id")?, column("created_at")?, column("text")?);
    for record in rdr.records() {
        match record {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line() as usize);
                match (rec.get(id_col), rec.get(ts_col), rec.get(text_col)) {
                    (Some(id), Some(ts), Some(text)) => sink.push(line, id, ts, text),
                    _ => sink.diagnostics.push(Diagnostic::new(
                        line,
                        format!("malformed record: expected id, created_at, text; got {} fields", rec.len()),
                    )),
                }
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                sink.diagnostics
                    .push(Diagnostic::new(line, format!("malformed record: {e}")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    /// Casefolded tags.
    pub hashtags: BTreeSet<String>,
    /// Tags as written in the taxonomy file (leading `#` removed, case kept).
    /// Case is what makes camel-case splitting possible downstream.
    pub raw_tags: Vec<String>,
}

/// Ordered mapping from category name to hashtag set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryTaxonomy {
    categories: Vec<Category>,
    index: HashMap<String, Vec<usize>>,
}

impl CategoryTaxonomy {
    pub fn new<N, T, I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, Vec<T>)>,
        N: Into<String>,
        T: AsRef<str>,
    {
        let mut categories: Vec<Category> = Vec::new();
        for (name, tags) in entries {
            let name = name.into();
            if categories.iter().any(|c| c.name == name) {
                return Err(Error::invalid(format!("duplicate category {name:?}")));
            }
            if name == UNCATEGORIZED {
                return Err(Error::invalid(format!("{UNCATEGORIZED} is a reserved category name")));
            }
            let mut hashtags = BTreeSet::new();
            let mut raw_tags = Vec::new();
            for raw in tags {
                let raw = raw.as_ref();
                let tag = normalize_tag(raw).ok_or_else(|| {
                    Error::invalid(format!("invalid hashtag {raw:?} in category {name:?}"))
                })?;
                if hashtags.insert(tag) {
                    raw_tags.push(raw.trim().trim_start_matches('#').to_string());
                }
            }
            categories.push(Category {
                name,
                hashtags,
                raw_tags,
            });
        }
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, c) in categories.iter().enumerate() {
            for tag in &c.hashtags {
                index.entry(tag.clone()).or_default().push(i);
            }
        }
        Ok(CategoryTaxonomy { categories, index })
    }

    /// Parses `{category_name: ["#tag", "tag", ...]}` keeping key order.
    pub fn from_json_str(json: &str) -> Result<Self> {
        Self::new(parse_ordered_lists(json, "taxonomy")?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&json)
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn names(&self) -> Vec<String> {
        self.categories.iter().map(|c| c.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Indices of the categories whose hashtag set intersects the tweet's, in taxonomy order.
    pub fn assign_indices(&self, tweet: &Tweet) -> Vec<usize> {
        let mut hit = vec![false; self.categories.len()];
        for tag in &tweet.hashtags {
            if let Some(cats) = self.index.get(tag) {
                for &c in cats {
                    hit[c] = true;
                }
            }
        }
        hit.iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i))
            .collect()
    }

    pub fn assign_categories(&self, tweet: &Tweet) -> BTreeSet<String> {
        self.assign_indices(tweet)
            .into_iter()
            .map(|i| self.categories[i].name.clone())
            .collect()
    }
}

/// Category membership of every tweet in a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Membership {
    pub categories: Vec<String>,
    /// Tweet id to category indices (taxonomy order); empty when uncategorized.
    pub by_tweet: BTreeMap<String, Vec<usize>>,
}

impl Membership {
    pub fn build(corpus: &[Tweet], taxonomy: &CategoryTaxonomy) -> Self {
        Membership {
            categories: taxonomy.names(),
            by_tweet: corpus
                .iter()
                .map(|t| (t.id.clone(), taxonomy.assign_indices(t)))
                .collect(),
        }
    }

    /// Number of member tweets per category, in category order.
    pub fn category_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.categories.len()];
        for cats in self.by_tweet.values() {
            for &c in cats {
                sizes[c] += 1;
            }
        }
        sizes
    }

    pub fn names_of(&self, tweet_id: &str) -> Vec<&str> {
        self.by_tweet
            .get(tweet_id)
            .map(|cs| cs.iter().map(|&c| self.categories[c].as_str()).collect())
            .unwrap_or_default()
    }

    /// Tweet ids belonging to category `c`, in id order.
    pub fn members(&self, c: usize) -> impl Iterator<Item = &str> + '_ {
        self.by_tweet
            .iter()
            .filter(move |(_, cs)| cs.contains(&c))
            .map(|(id, _)| id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrendSeries {
    pub category: String,
    pub points: Vec<(NaiveDate, u64)>,
}

impl TrendSeries {
    pub fn total(&self) -> u64 {
        self.points.iter().map(|p| p.1).sum()
    }
}

/// Daily tweet counts per category over the corpus date span, zero-filled.
/// A tweet in k categories counts once in each of the k series. The
/// [`UNCATEGORIZED`] series comes last.
pub fn trend_series(corpus: &[Tweet], taxonomy: &CategoryTaxonomy) -> Vec<TrendSeries> {
    let n = taxonomy.len();
    let mut names = taxonomy.names();
    names.push(UNCATEGORIZED.to_string());

    let span = corpus
        .iter()
        .map(Tweet::day)
        .fold(None, |acc: Option<(NaiveDate, NaiveDate)>, d| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        });
    let Some((first, last)) = span else {
        return names
            .into_iter()
            .map(|category| TrendSeries {
                category,
                points: Vec::new(),
            })
            .collect();
    };

    let days = (last - first).num_days() as usize + 1;
    let mut counts = vec![vec![0u64; days]; n + 1];
    for tweet in corpus {
        let offset = (tweet.day() - first).num_days() as usize;
        let cats = taxonomy.assign_indices(tweet);
        if cats.is_empty() {
            counts[n][offset] += 1;
        }
        for c in cats {
            counts[c][offset] += 1;
        }
    }

    names
        .into_iter()
        .zip(counts)
        .map(|(category, row)| TrendSeries {
            category,
            points: first
                .iter_days()
                .zip(row)
                .collect(),
        })
        .collect()
}

/// Most frequent tags by number of tweets carrying them; ties broken by tag.
pub fn top_hashtags(corpus: &[Tweet], n: usize) -> Vec<(String, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for tweet in corpus {
        for tag in &tweet.hashtags {
            *counts.entry(tag.as_str()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(n);
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn ts(day: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2020, 3, day, 10, 0, 0).unwrap()
    }

    fn taxonomy() -> CategoryTaxonomy {
        CategoryTaxonomy::from_json_str(
            r##"{
                "General COVID": ["#covid19", "#COVID19", "#Covid19", "#covid_19", "#covid", "#corona", "#coronavirus"],
                "Quarantine": ["#QuarantineLife", "#quarantined", "#staysafestayhome", "#staytheFhome", "#staythefuckhome"],
                "School Closures": ["#schoolclosures", "#closenycschools", "#suny", "#cuny"]
            }"##,
        )
        .unwrap()
    }

    #[test]
    fn extraction_cases() {
        assert!(extract_hashtags("no tags here").is_empty());
        assert_eq!(extract_hashtags("#COVID19 #covid19"), vec!["covid19", "covid19"]);
        assert_eq!(extract_hashtags("end#middle #a-b"), vec!["middle", "a"]);
        assert!(extract_hashtags("").is_empty());
        assert!(extract_hashtags("# lonely #").is_empty());

        let t = Tweet::new("1", ts(14), "#COVID19 #covid19");
        assert_eq!(t.hashtags, vec!["covid19"]);
    }

    #[test]
    fn stay_the_f_home() {
        let t = Tweet::new("1", ts(14), "Stay in! #StayTheFHome");
        assert_eq!(t.hashtags, vec!["staythefhome"]);
    }

    #[test]
    fn table_two_assignment() {
        let tax = taxonomy();
        let t = Tweet::new("1", ts(14), "#covid19 and #staythefhome");
        let got = tax.assign_categories(&t);
        assert_eq!(
            got.into_iter().collect::<Vec<_>>(),
            vec!["General COVID".to_string(), "Quarantine".to_string()]
        );
        let none = Tweet::new("2", ts(14), "nothing");
        assert!(tax.assign_categories(&none).is_empty());
    }

    #[test]
    fn taxonomy_rejects_reserved_and_duplicates() {
        assert!(CategoryTaxonomy::from_json_str(r#"{"(uncategorized)": ["a"]}"#).is_err());
        assert!(CategoryTaxonomy::from_json_str(r##"{"a": ["#x y"]}"##).is_err());
        let t = CategoryTaxonomy::from_json_str(r##"{"a": ["#X", "x", "#x"]}"##).unwrap();
        assert_eq!(t.categories()[0].hashtags.len(), 1);
        assert_eq!(t.categories()[0].raw_tags, vec!["X"]);
    }

    #[test]
    fn shared_hashtag_yields_multiple_categories() {
        let tax = CategoryTaxonomy::from_json_str(r#"{"a": ["x"], "b": ["x", "y"]}"#).unwrap();
        let t = Tweet::new("1", ts(14), "#x");
        assert_eq!(tax.assign_categories(&t).len(), 2);
    }

    #[test]
    fn jsonl_loading() {
        let data = concat!(
            r#"{"id":"1","created_at":"2020-03-14T10:00:00Z","text":"Stay in! #StayTheFHome","lang":"en"}"#,
            "\n\n",
            r#"{"id":"1","created_at":"2020-03-15T10:00:00Z","text":"dup"}"#,
            "\n",
            r#"{"id":"2","created_at":"yesterday","text":"bad ts"}"#,
            "\n",
            r#"{"id":"3","text":"missing"}"#,
            "\n",
            r#"{"id":"4","created_at":"2020-03-14T23:59:59.750-04:00","text":"tz"}"#,
            "\n"
        );
        let loaded = read_corpus(data.as_bytes(), CorpusFormat::Jsonl).unwrap();
        let ids: Vec<_> = loaded.items.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["1", "4"]);
        assert_eq!(loaded.items[0].hashtags, vec!["staythefhome"]);
        assert_eq!(loaded.items[1].timestamp, Utc.with_ymd_and_hms(2020, 3, 15, 3, 59, 59).unwrap());
        let lines: Vec<_> = loaded.diagnostics.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert!(loaded.diagnostics[0].message.contains("duplicate"));
    }

    #[test]
    fn empty_inputs() {
        assert!(read_corpus(&b""[..], CorpusFormat::Jsonl).unwrap().items.is_empty());
        assert!(read_corpus(&b"id,created_at,text\n"[..], CorpusFormat::Csv)
            .unwrap()
            .items
            .is_empty());
    }

    #[test]
    fn csv_loading_with_quotes() {
        let data = "text,id,created_at\n\"Hello, \"\"world\"\" #Tag\",9,2020-03-14T10:00:00Z\nshort\n";
        let loaded = read_corpus(data.as_bytes(), CorpusFormat::Csv).unwrap();
        assert_eq!(loaded.items.len(), 1);
        assert_eq!(loaded.items[0].text, "Hello, \"world\" #Tag");
        assert_eq!(loaded.items[0].hashtags, vec!["tag"]);
        assert_eq!(loaded.diagnostics.len(), 1);
        assert_eq!(loaded.diagnostics[0].line, 3);
    }

    #[test]
    fn csv_missing_column_is_fatal() {
        assert!(read_corpus(&b"id,text\n1,x\n"[..], CorpusFormat::Csv).is_err());
    }

    #[test]
    fn missing_file_is_fatal() {
        let err = load_corpus(Path::new("/nonexistent/corpus.jsonl"), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn trends_multi_membership_and_zero_fill() {
        let tax = taxonomy();
        let corpus = vec![
            Tweet::new("1", ts(14), "#covid19 #quarantinelife"),
            Tweet::new("2", ts(16), "#covid"),
            Tweet::new("3", ts(16), "plain"),
        ];
        let series = trend_series(&corpus, &tax);
        assert_eq!(series.len(), 4);
        let d = |day| NaiveDate::from_ymd_opt(2020, 3, day).unwrap();
        assert_eq!(series[0].points, vec![(d(14), 1), (d(15), 0), (d(16), 1)]);
        assert_eq!(series[1].points, vec![(d(14), 1), (d(15), 0), (d(16), 0)]);
        assert_eq!(series[2].total(), 0);
        assert_eq!(series[3].category, UNCATEGORIZED);
        assert_eq!(series[3].points[2], (d(16), 1));
    }

    #[test]
    fn trends_empty_corpus() {
        let series = trend_series(&[], &taxonomy());
        assert!(series.iter().all(|s| s.points.is_empty()));
    }

    #[test]
    fn top_hashtag_ranking() {
        let mut corpus = Vec::new();
        for i in 0..5 {
            corpus.push(Tweet::new(format!("c{i}"), ts(14), "#covid19"));
        }
        for i in 0..3 {
            corpus.push(Tweet::new(format!("r{i}"), ts(14), "#corona"));
        }
        corpus.push(Tweet::new("z1", ts(14), "#zeta #alpha"));
        corpus.push(Tweet::new("z2", ts(14), "#zeta #alpha"));
        assert_eq!(
            top_hashtags(&corpus, 2),
            vec![("covid19".to_string(), 5), ("corona".to_string(), 3)]
        );
        let all = top_hashtags(&corpus, 100);
        assert_eq!(all.len(), 4);
        assert_eq!(all[2].0, "alpha");
        assert_eq!(all[3].0, "zeta");
    }
}
