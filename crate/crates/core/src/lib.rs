//! Lexicon-driven sentiment scoring of news articles about public figures.
//!
//! The pipeline reads an article, splits and cleans its sentences, resolves
//! entity aliases, and extracts `(who, whom, value)` statements. Statements
//! accumulate in a sparse polarity/count ledger from which speaker, article
//! and outlet scores are computed as exact rationals.

pub mod analyzer;
pub mod cli;
pub mod kb;
pub mod ledger;
pub mod lexicon;
pub mod textpipe;

pub use analyzer::{analyze_article, trace, AnalyzerState, StatementRecord};
pub use kb::{IngestReport, KbError, KnowledgeBase};
pub use ledger::{ArticleScoreHistory, Cell, CellKey, PolarityLedger, Rational, Scope, Score, Sentiment};
pub use lexicon::{Lexicon, LexiconError, TokenClass, Valence};
pub use textpipe::RawArticle;
