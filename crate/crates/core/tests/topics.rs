use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tagscope::corpus::{CategoryTaxonomy, Membership, Tweet};
use tagscope::textprep::TokenizedDoc;
use tagscope::topics::{
    derive_gold, evaluate, train, GoldPolicy, Hyperparameters, Prediction, SeedSpec, SeededLda, Trainer, UNASSIGNED,
};
use tagscope::{Exact, ExactReport};

fn doc(id: impl Into<String>, tokens: &[&str]) -> TokenizedDoc {
    TokenizedDoc {
        tweet_id: id.into(),
        tokens: tokens.iter().map(|t| t.to_string()).collect(),
    }
}

fn seeds(spec: &[(&str, &[&str])], unseeded: usize) -> SeedSpec {
    SeedSpec::new(
        spec.iter()
            .map(|(n, ws)| (n.to_string(), ws.iter().map(|w| w.to_string()).collect()))
            .collect(),
        unseeded,
    )
    .unwrap()
}

fn hyper(iterations: usize) -> Hyperparameters<f64> {
    Hyperparameters {
        iterations,
        ..Hyperparameters::default()
    }
}

#[test]
fn hand_evaluated_conditional() {
    let docs = [doc("0", &["a", "a"]), doc("1", &["b", "b"])];
    let h = Hyperparameters {
        alpha: 0.01,
        beta: 0.1,
        ..hyper(1)
    };
    let m = SeededLda::from_assignments(&docs, SeedSpec::new(vec![], 2).unwrap(), h, vec![vec![0, 0], vec![0, 1]]).unwrap();
    let w = m.conditional_weights(0, 1);
    // (1.01 * 1.1 / 2.2, 0.01 * 0.1 / 1.2)
    assert!((w[0] - 0.505).abs() < 1e-12);
    assert!((w[1] - 0.000_833_333_333_333_333_4).abs() < 1e-12);
}

#[test]
fn theta_for_single_topic_document() {
    let docs = [doc("0", &["a"; 5])];
    let m = SeededLda::from_assignments(&docs, SeedSpec::new(vec![], 2).unwrap(), hyper(1), vec![vec![0; 5]]).unwrap();
    let theta = m.doc_topic_distribution(0);
    assert!((theta[0] - 0.998008).abs() < 1e-6);
    assert!((theta[1] - 0.001992).abs() < 1e-6);
}

#[test]
fn strict_argmax_and_unseeded() {
    let s = seeds(&[("Quarantine", &["home"])], 2);
    let docs = [doc("0", &["home"; 18]), doc("1", &["x"; 4])];
    let z = vec![[vec![0u16; 16], vec![1, 2]].concat(), vec![1, 1, 1, 2]];
    let m = SeededLda::from_assignments(&docs, s, hyper(1), z).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(m.classify(0, &mut rng), Prediction::Category("Quarantine".into()));
    assert_eq!(m.classify(1, &mut rng).label(), UNASSIGNED);
}

#[test]
fn exact_ties_split_evenly() {
    let s = seeds(&[("A", &["a"]), ("B", &["b"])], 0);
    let m = SeededLda::from_assignments(&[doc("0", &["a", "b"])], s, hyper(1), vec![vec![0, 1]]).unwrap();
    let theta = m.doc_topic_distribution(0);
    assert_eq!(theta[0], theta[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 10_000;
    let a = (0..trials)
        .filter(|_| m.classify(0, &mut rng) == Prediction::Category("A".into()))
        .count();
    let freq = a as f64 / trials as f64;
    assert!((freq - 0.5).abs() <= 0.05, "frequency {freq}");
}

#[test]
fn disjoint_vocabularies_separate() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let docs: Vec<TokenizedDoc> = (0..200)
        .map(|i| {
            let pool: [&str; 2] = if i % 2 == 0 { ["a", "b"] } else { ["c", "d"] };
            let tokens: Vec<&str> = (0..10).map(|_| pool[rng.random_range(0..2)]).collect();
            doc(i.to_string(), &tokens)
        })
        .collect();
    let m = train(&docs, seeds(&[("AB", &["a"]), ("CD", &["c"])], 0), hyper(200)).unwrap();
    for pool in [["a", "b"], ["c", "d"]] {
        let mut per_topic = [0u64; 2];
        for (d, zd) in m.assignments().iter().enumerate() {
            for (pos, &t) in zd.iter().enumerate() {
                if pool.contains(&docs[d].tokens[pos].as_str()) {
                    per_topic[t as usize] += 1;
                }
            }
        }
        let total: u64 = per_topic.iter().sum();
        let share = *per_topic.iter().max().unwrap() as f64 / total as f64;
        assert!(share >= 0.99, "{pool:?}: {per_topic:?}");
    }
}

#[test]
fn strong_seeds_claim_their_documents() {
    let filler = ["news", "today", "people", "world", "time", "week", "update", "still"];
    let mut docs = Vec::new();
    for i in 0..40 {
        docs.push(doc(format!("s{i}"), &["school", "teacher", "class"][..1 + i % 3]));
        docs.push(doc(format!("p{i}"), &["toilet", "paper", "panic"][..1 + i % 3]));
        docs.push(doc(format!("f{i}"), &[filler[i % 8], filler[(i + 3) % 8], filler[(i + 5) % 8]]));
    }
    let s = seeds(&[("School", &["school", "teacher", "class"]), ("Panic", &["toilet", "paper", "panic"])], 2);
    let v = 14.0;
    let h = Hyperparameters {
        mu: 1e3 * 0.0001 * v,
        ..hyper(100)
    };
    let m = train(&docs, s, h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (d, id) in m.doc_ids().iter().enumerate() {
        let p = m.classify(d, &mut rng);
        if id.starts_with('s') {
            assert_eq!(p.label(), "School", "{id}");
        } else if id.starts_with('p') {
            assert_eq!(p.label(), "Panic", "{id}");
        }
    }
}

#[test]
fn training_is_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let words = ["a", "b", "c", "d", "e", "f", "g", "h"];
    let docs: Vec<TokenizedDoc> = (0..60)
        .map(|i| {
            let tokens: Vec<&str> = (0..6).map(|_| words[rng.random_range(0..8)]).collect();
            doc(i.to_string(), &tokens)
        })
        .collect();
    let s = seeds(&[("A", &["a", "b"]), ("C", &["c"])], 2);
    let a = train(&docs, s.clone(), hyper(50)).unwrap();
    let b = train(&docs, s, hyper(50)).unwrap();
    assert_eq!(a.assignments(), b.assignments());
    let pa = a.classify_all(&mut ChaCha8Rng::seed_from_u64(1));
    let pb = b.classify_all(&mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(pa, pb);
}

fn corpus_strategy() -> impl Strategy<Value = Vec<TokenizedDoc>> {
    let token = prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g"]);
    prop::collection::vec(prop::collection::vec(token, 0..10), 1..15).prop_map(|docs| {
        docs.iter()
            .enumerate()
            .map(|(i, t)| doc(i.to_string(), t))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_conserved_every_sweep(docs in corpus_strategy(), seed in any::<u64>(), unseeded in 0usize..3) {
        prop_assume!(docs.iter().any(|d| !d.tokens.is_empty()));
        let h = Hyperparameters { rng_seed: seed, ..hyper(5) };
        let mut trainer = Trainer::new(&docs, seeds(&[("A", &["a"]), ("B", &["b", "a"])], unseeded), h).unwrap();
        let tokens: u64 = docs.iter().map(|d| d.tokens.len() as u64).sum();
        for _ in 0..5 {
            trainer.sweep();
            let m = trainer.model();
            prop_assert!(m.check_invariants().is_ok());
            prop_assert_eq!(m.topic_totals().iter().sum::<u64>(), tokens);
            for d in 0..m.num_docs() {
                let theta = m.doc_topic_distribution(d);
                prop_assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let row: u32 = m.doc_topic_counts(d).iter().sum();
                prop_assert_eq!(row as usize, m.assignments()[d].len());
            }
            for t in 0..m.num_topics() as u16 {
                let phi: f64 = m.topic_word_distribution(t).iter().sum();
                prop_assert!((phi - 1.0).abs() < 1e-9);
            }
        }
    }
}

/// Per-label TP/FP/FN by scanning every (prediction, gold) pair.
fn brute_force(pred: &BTreeMap<String, String>, gold: &BTreeMap<String, String>, labels: &[String]) -> ExactReport {
    let q = |n: usize, d: usize| {
        if d == 0 {
            BigRational::zero()
        } else {
            BigRational::new((n as i64).into(), (d as i64).into())
        }
    };
    let mut per_class = Vec::new();
    let mut matrix = vec![vec![0u64; labels.len()]; labels.len()];
    for (i, gl) in labels.iter().enumerate() {
        for (j, pl) in labels.iter().enumerate() {
            matrix[i][j] = gold.iter().filter(|(k, g)| *g == gl && pred[*k] == *pl).count() as u64;
        }
    }
    for l in labels {
        let tp = gold.iter().filter(|(k, g)| *g == l && pred[*k] == *l).count();
        let fp = gold.iter().filter(|(k, g)| *g != l && pred[*k] == *l).count();
        let fneg = gold.iter().filter(|(k, g)| *g == l && pred[*k] != *l).count();
        let p = q(tp, tp + fp);
        let r = q(tp, tp + fneg);
        let f1 = if p.is_zero() && r.is_zero() {
            BigRational::zero()
        } else {
            BigRational::from_integer(2.into()) * p.clone() * r.clone() / (p.clone() + r.clone())
        };
        per_class.push((tp + fneg, tp + fp, tp, p, r, f1));
    }
    let gold_idx: Vec<usize> = (0..labels.len()).filter(|&i| per_class[i].0 > 0).collect();
    let mean = |f: &dyn Fn(usize) -> BigRational| {
        gold_idx.iter().map(|&i| f(i)).sum::<BigRational>() / BigRational::from_integer((gold_idx.len() as i64).into())
    };
    let correct = gold.iter().filter(|(k, g)| pred[*k] == **g).count();
    ExactReport {
        labels: labels.to_vec(),
        matrix,
        total: gold.len() as u64,
        accuracy: q(correct, gold.len()),
        per_class: labels
            .iter()
            .zip(&per_class)
            .map(|(l, c)| tagscope::topics::ClassMetrics {
                label: l.clone(),
                support: c.0 as u64,
                predicted: c.1 as u64,
                true_positives: c.2 as u64,
                precision: c.3.clone(),
                recall: c.4.clone(),
                f1: c.5.clone(),
            })
            .collect(),
        macro_avg: tagscope::topics::Averages {
            precision: mean(&|i| per_class[i].3.clone()),
            recall: mean(&|i| per_class[i].4.clone()),
            f1: mean(&|i| per_class[i].5.clone()),
        },
        micro_avg: {
            let tp: usize = gold_idx.iter().map(|&i| per_class[i].2).sum();
            let pr: usize = gold_idx.iter().map(|&i| per_class[i].1).sum();
            let sp: usize = gold_idx.iter().map(|&i| per_class[i].0).sum();
            let (p, r) = (q(tp, pr), q(tp, sp));
            let f1 = if p.is_zero() && r.is_zero() {
                BigRational::zero()
            } else {
                BigRational::from_integer(2.into()) * p.clone() * r.clone() / (p.clone() + r.clone())
            };
            tagscope::topics::Averages { precision: p, recall: r, f1 }
        },
    }
}

#[test]
fn evaluate_matches_brute_force() {
    let pool = ["Panic Buying", "Quarantine", "School Closures", "Lockdown", UNASSIGNED];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..1000 {
        let n = rng.random_range(1..40);
        let mut gold = BTreeMap::new();
        let mut pred = BTreeMap::new();
        for i in 0..n {
            gold.insert(format!("t{i}"), pool[rng.random_range(0..4)].to_string());
            pred.insert(format!("t{i}"), pool[rng.random_range(0..5)].to_string());
        }
        let mut labels: Vec<String> = gold.values().chain(pred.values()).filter(|l| *l != UNASSIGNED).cloned().collect();
        labels.sort();
        labels.dedup();
        if pred.values().any(|l| l == UNASSIGNED) {
            labels.push(UNASSIGNED.into());
        }
        let report = evaluate::<Exact>(&pred, &gold).unwrap();
        assert_eq!(report, brute_force(&pred, &gold, &labels));
        let total: u64 = report.matrix.iter().flatten().sum();
        assert_eq!(total, n as u64);
    }
}

#[test]
fn gold_from_taxonomy() {
    let taxonomy = CategoryTaxonomy::from_json_str(
        r##"{"General COVID": ["#covid19"], "Quarantine": ["#stayhome"], "School Closures": ["#schoolclosure"]}"##,
    )
    .unwrap();
    let ts = chrono::DateTime::parse_from_rfc3339("2020-03-20T10:00:00Z").unwrap().to_utc();
    let mut corpus = vec![
        Tweet::new("both", ts, "#covid19 #schoolclosure"),
        Tweet::new("q", ts, "#stayhome"),
        Tweet::new("none", ts, "nothing"),
    ];
    for i in 0..3 {
        corpus.push(Tweet::new(format!("g{i}"), ts, "#covid19"));
    }
    let m = Membership::build(&corpus, &taxonomy);
    let rarest = derive_gold(&m, GoldPolicy::Rarest);
    assert_eq!(rarest["both"], "School Closures");
    assert_eq!(rarest["q"], "Quarantine");
    assert!(!rarest.contains_key("none"));
    assert_eq!(derive_gold(&m, GoldPolicy::Priority)["both"], "General COVID");
    assert!(!derive_gold(&m, GoldPolicy::ExcludeMulti).contains_key("both"));
}
