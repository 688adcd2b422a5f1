//! `tagscope`: hashtag-category analytics over a tweet corpus.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags or config
//! values, nothing written), 2 for data errors (missing or malformed input).

mod commands;
mod config;
mod pipeline;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "tagscope", version, about = "Hashtag-category analytics and seeded topic classification for tweets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Daily tweet counts per category and the most used hashtags
    Trends,
    /// Words common to several categories and words distinctive of each
    Words,
    /// Chi-squared bigram collocations per category
    Bigrams,
    /// Sentiment label distribution per category
    Sentiment,
    /// Distinctive verbs per category from dependency parses
    Verbs,
    /// Nouns linked to selected verbs
    Pairs,
    /// Train the seeded topic model
    TopicsTrain,
    /// Classify tweets with a trained model
    TopicsClassify,
    /// Evaluate predictions against hashtag-derived gold labels
    TopicsEval,
    /// Summarize artifacts already in the output directory
    Report,
}

pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<tagscope::Error> for Failure {
    fn from(e: tagscope::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn resolve(flags: &Flags) -> Result<RunConfig, Failure> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    cfg.apply(flags);
    cfg.validate().map_err(Failure::Usage)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = resolve(&cli.flags).and_then(|cfg| {
        if cli.flags.print_config {
            Ok(cfg.to_json())
        } else {
            commands::run(cli.command, &cfg)
        }
    });
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
