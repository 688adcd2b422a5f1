//! Hashtag-category analytics for tweet corpora: category trends, word and
//! bigram statistics, sentiment shares, verb/noun usage from dependency
//! parses, and seeded LDA classification.
//!
//! Numeric kernels are generic over [`scalar::Scalar`] / [`scalar::Real`];
//! the aliases below fix the usual choices.

pub mod corpus;
pub mod diag;
mod error;
pub mod lexstats;
mod ordered;
pub mod scalar;
pub mod sentiment;
pub mod syntax;
pub mod textprep;
pub mod topics;

pub use error::{Error, Result};

/// Exact scalar for statistics that must be checked without rounding.
pub type Exact = num_rational::BigRational;

pub type SeededLdaModel = topics::SeededLda<f64>;
pub type SeededLdaF32 = topics::SeededLda<f32>;
pub type Report = topics::EvaluationReport<f64>;
pub type ExactReport = topics::EvaluationReport<Exact>;
pub type Collocation = lexstats::CollocationStat<f64>;
pub type ExactCollocation = lexstats::CollocationStat<Exact>;
pub type Distribution = sentiment::SentimentDistribution<f64>;
pub type ExactDistribution = sentiment::SentimentDistribution<Exact>;
