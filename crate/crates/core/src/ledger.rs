//! Sparse polarity/count ledger and the scores derived from it.
//!
//! A cell `(p, s)` keyed by `(who, whom)` holds the signed sum of statement
//! values and the number of statements. The polarity matrix is the `p`
//! projection, the count matrix the `s` projection. All scores are exact
//! rationals; decimals only appear when rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::StatementRecord;

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LedgerError {
    #[error("cannot merge a {left} ledger with a {right} ledger")]
    ScopeMismatch { left: Scope, right: Scope },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub who: String,
    pub whom: String,
}

impl CellKey {
    pub fn new(who: impl Into<String>, whom: impl Into<String>) -> Self {
        Self {
            who: who.into(),
            whom: whom.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub p: i64,
    pub s: u64,
}

impl Cell {
    pub fn new(p: i64, s: u64) -> Self {
        Self { p, s }
    }

    /// `|p| <= s`.
    pub fn is_consistent(&self) -> bool {
        self.p.unsigned_abs() <= self.s
    }

    /// `p / s`, or neutral when no statements were seen.
    pub fn score(&self) -> Score {
        if self.s == 0 {
            Score::Neutral
        } else {
            Score::Value(Rational::new(self.p, self.s as i64))
        }
    }

    pub fn classify(&self) -> Sentiment {
        match (self.s, self.p.signum()) {
            (0, _) | (_, 0) => Sentiment::Neutral,
            (_, 1) => Sentiment::Positive,
            _ => Sentiment::Negative,
        }
    }

    fn add(&mut self, other: Cell) {
        self.p += other.p;
        self.s += other.s;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Positive,
    Neutral,
    Negative,
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sentiment::Positive => "positive",
            Sentiment::Neutral => "neutral",
            Sentiment::Negative => "negative",
        })
    }
}

/// An exact score in `[-1, 1]`, or the distinct no-evidence outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Score<R = Rational> {
    Neutral,
    Value(R),
}

impl<R> Score<R> {
    pub fn value(&self) -> Option<&R> {
        match self {
            Score::Neutral => None,
            Score::Value(r) => Some(r),
        }
    }
}

impl<R: Signed> Score<R> {
    pub fn sentiment(&self) -> Sentiment {
        match self {
            Score::Neutral => Sentiment::Neutral,
            Score::Value(r) if r.is_positive() => Sentiment::Positive,
            Score::Value(r) if r.is_negative() => Sentiment::Negative,
            Score::Value(_) => Sentiment::Neutral,
        }
    }
}

/// Rendering helpers shared by trace, train and report output.
pub trait Exact: fmt::Display + ToPrimitive + Signed + Clone {}
impl Exact for Rational {}
impl Exact for BigRational {}

/// Four decimal places: `-0.2500`.
pub fn fixed4<R: Exact>(r: &R) -> String {
    let v = r.to_f64().unwrap_or(f64::NAN);
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Up to four decimal places with trailing zeros trimmed: `-0.25`, `1`.
pub fn compact<R: Exact>(r: &R) -> String {
    let s = fixed4(r);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Magnitude as a percentage with the sign turned into a direction word:
/// `95% negative`.
pub fn percent_phrase<R: Exact>(r: &R) -> String {
    let pct = r.abs().to_f64().unwrap_or(f64::NAN) * 100.0;
    let pct = format!("{pct:.2}");
    let pct = pct.trim_end_matches('0').trim_end_matches('.');
    format!("{pct}% {}", Score::Value(r.clone()).sentiment())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Article,
    Cumulative,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Article => "per-article",
            Scope::Cumulative => "cumulative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityLedger {
    scope: Scope,
    cells: BTreeMap<CellKey, Cell>,
}

impl PolarityLedger {
    pub fn new(scope: Scope) -> Self {
        Self {
            scope,
            cells: BTreeMap::new(),
        }
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// The direct cell, `(0, 0)` when absent.
    pub fn cell(&self, who: &str, whom: &str) -> Cell {
        self.cells
            .get(&CellKey::new(who, whom))
            .copied()
            .unwrap_or_default()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellKey, &Cell)> {
        self.cells.iter()
    }

    pub fn apply(&mut self, record: &StatementRecord) {
        self.apply_value(&record.who, &record.whom, record.value);
    }

    /// Adds one statement. `value` must be `-1` or `+1`.
    pub fn apply_value(&mut self, who: &str, whom: &str, value: i64) {
        debug_assert!(value == 1 || value == -1);
        self.cells
            .entry(CellKey::new(who, whom))
            .or_default()
            .add(Cell::new(value, 1));
    }

    /// Inserts a cell verbatim. Used when rebuilding from storage; callers
    /// check the cell invariants.
    pub(crate) fn insert_cell(&mut self, key: CellKey, cell: Cell) {
        self.cells.insert(key, cell);
    }

    pub fn merge(&self, other: &PolarityLedger) -> Result<PolarityLedger, LedgerError> {
        let mut out = self.clone();
        out.absorb(other)?;
        Ok(out)
    }

    /// In-place [`PolarityLedger::merge`].
    pub fn absorb(&mut self, other: &PolarityLedger) -> Result<(), LedgerError> {
        if self.scope != other.scope {
            return Err(LedgerError::ScopeMismatch {
                left: self.scope,
                right: other.scope,
            });
        }
        for (key, cell) in &other.cells {
            self.cells.entry(key.clone()).or_default().add(*cell);
        }
        Ok(())
    }

    /// Distinct speakers and targets, in sorted order.
    pub fn speakers(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|k| k.who.as_str()).collect()
    }

    pub fn targets(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|k| k.whom.as_str()).collect()
    }

    /// Column sum over all speakers towards `whom`.
    pub fn column(&self, whom: &str) -> Cell {
        let mut total = Cell::default();
        for (key, cell) in &self.cells {
            if key.whom == whom {
                total.add(*cell);
            }
        }
        total
    }

    /// Article-level score towards `whom`: summed polarity over summed counts
    /// across every speaker in this (per-article) ledger.
    pub fn article_score(&self, whom: &str) -> Score {
        self.column(whom).score()
    }

    /// The outlet's derived cell towards `whom`: its own direct statements
    /// plus every other speaker's statements, which the outlet is taken to
    /// have chosen to publish. Direct cells are untouched.
    pub fn outlet_view(&self, outlet: &str, whom: &str) -> Cell {
        let mut view = self.cell(outlet, whom);
        for (key, cell) in &self.cells {
            if key.whom == whom && key.who != outlet {
                view.add(*cell);
            }
        }
        view
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleScore {
    pub article_id: String,
    pub score: Rational,
}

/// Per `(outlet, whom)` article scores in ingestion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArticleScoreHistory {
    entries: BTreeMap<(String, String), Vec<ArticleScore>>,
}

impl ArticleScoreHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, outlet: &str, whom: &str, article_id: &str, score: Rational) {
        self.entries
            .entry((outlet.to_string(), whom.to_string()))
            .or_default()
            .push(ArticleScore {
                article_id: article_id.to_string(),
                score,
            });
    }

    pub fn scores(&self, outlet: &str, whom: &str) -> &[ArticleScore] {
        self.entries
            .get(&(outlet.to_string(), whom.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// `(outlet, whom)` keys with their score lists, sorted by key.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &[ArticleScore])> {
        self.entries
            .iter()
            .map(|((o, w), v)| (o.as_str(), w.as_str(), v.as_slice()))
    }

    pub fn outlets(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(o, _)| o.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Mean of the recorded article scores for `whom`. The sum runs in
    /// arbitrary precision, so long histories with unrelated denominators
    /// cannot overflow.
    pub fn tendency(&self, outlet: &str, whom: &str) -> Score<BigRational> {
        let scores = self.scores(outlet, whom);
        if scores.is_empty() {
            return Score::Neutral;
        }
        let sum = scores.iter().fold(BigRational::zero(), |acc, a| {
            acc + BigRational::new(BigInt::from(*a.score.numer()), BigInt::from(*a.score.denom()))
        });
        Score::Value(sum / BigRational::from_integer(BigInt::from(scores.len())))
    }

    pub(crate) fn insert(&mut self, outlet: String, whom: String, scores: Vec<ArticleScore>) {
        self.entries.insert((outlet, whom), scores);
    }
}

/// Tab-separated grid with targets as rows and speakers as columns. The
/// outlet column, when present, comes first.
pub fn matrix_grid(
    title: &str,
    ledger: &PolarityLedger,
    outlet: Option<&str>,
    value: impl Fn(&str, &str) -> String,
) -> String {
    let mut columns: Vec<&str> = Vec::new();
    if let Some(o) = outlet {
        columns.push(o);
    }
    columns.extend(ledger.speakers().into_iter().filter(|w| Some(*w) != outlet));
    let mut out = String::from(title);
    for w in &columns {
        out.push('\t');
        out.push_str(w);
    }
    out.push('\n');
    for h in ledger.targets() {
        out.push_str(h);
        for w in &columns {
            out.push('\t');
            out.push_str(&value(w, h));
        }
        out.push('\n');
    }
    out
}
