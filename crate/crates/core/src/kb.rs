//! Persistent knowledge base: the cumulative ledger, article score history,
//! processed-article registry and the fingerprint of the lexicon that built
//! them.
//!
//! Stored as JSON with sorted keys:
//!
//! ```json
//! {
//!   "cells": [{"p": -6, "s": 6, "who": "k", "whom": "andi"}],
//!   "history": [{"outlet": "k", "scores": [{"article_id": "1", "den": 1, "num": -1}], "whom": "andi"}],
//!   "lexicon_fingerprint": "…",
//!   "processed": ["1"],
//!   "version": 1
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::{analyze_article, StatementRecord};
use crate::ledger::{ArticleScore, ArticleScoreHistory, Cell, CellKey, PolarityLedger, Rational, Scope};
use crate::lexicon::Lexicon;
use crate::textpipe::RawArticle;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("article {0:?} has already been ingested")]
    DuplicateArticle(String),
    #[error("lexicon fingerprint {found} does not match the knowledge base ({expected})")]
    LexiconMismatch { expected: String, found: String },
    #[error("article {article_id:?} is from outlet {found:?}, lexicon outlet is {expected:?}")]
    OutletMismatch {
        article_id: String,
        expected: String,
        found: String,
    },
    #[error("unsupported knowledge base version {found} (supported: {supported})")]
    VersionMismatch { found: u64, supported: u32 },
    #[error("corrupt knowledge base at {path}: {reason}")]
    CorruptDocument { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn corrupt(path: impl Into<String>, reason: impl Into<String>) -> KbError {
    KbError::CorruptDocument {
        path: path.into(),
        reason: reason.into(),
    }
}

/// What one article contributed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub article_id: String,
    pub outlet_id: String,
    pub records: Vec<StatementRecord>,
    pub article_ledger: PolarityLedger,
    /// Article score for every target with at least one statement, sorted by target.
    pub scores: Vec<(String, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    cumulative: PolarityLedger,
    history: ArticleScoreHistory,
    processed: BTreeSet<String>,
    lexicon_fingerprint: String,
    format_version: u32,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        Self::new()
    }
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self {
            cumulative: PolarityLedger::new(Scope::Cumulative),
            history: ArticleScoreHistory::new(),
            processed: BTreeSet::new(),
            lexicon_fingerprint: String::new(),
            format_version: FORMAT_VERSION,
        }
    }

    pub fn cumulative(&self) -> &PolarityLedger {
        &self.cumulative
    }

    pub fn history(&self) -> &ArticleScoreHistory {
        &self.history
    }

    pub fn processed(&self) -> &BTreeSet<String> {
        &self.processed
    }

    /// Empty until the first article is ingested.
    pub fn lexicon_fingerprint(&self) -> &str {
        &self.lexicon_fingerprint
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    pub fn is_empty(&self) -> bool {
        self.processed.is_empty()
    }

    fn check_compatible(&self, article: &RawArticle, lexicon: &Lexicon) -> Result<(), KbError> {
        if !self.lexicon_fingerprint.is_empty() {
            let found = lexicon.fingerprint();
            if found != self.lexicon_fingerprint {
                return Err(KbError::LexiconMismatch {
                    expected: self.lexicon_fingerprint.clone(),
                    found,
                });
            }
        }
        if article.outlet_id != lexicon.outlet_id() {
            return Err(KbError::OutletMismatch {
                article_id: article.article_id.clone(),
                expected: lexicon.outlet_id().to_string(),
                found: article.outlet_id.clone(),
            });
        }
        Ok(())
    }

    /// Analyzes an article against the current state without changing it.
    pub fn preview(&self, article: &RawArticle, lexicon: &Lexicon) -> Result<IngestReport, KbError> {
        self.check_compatible(article, lexicon)?;
        let records = analyze_article(article, lexicon, &self.cumulative);
        let mut article_ledger = PolarityLedger::new(Scope::Article);
        for record in &records {
            article_ledger.apply(record);
        }
        let scores = article_ledger
            .targets()
            .into_iter()
            .filter_map(|whom| {
                let score = article_ledger.article_score(whom).value().copied()?;
                Some((whom.to_string(), score))
            })
            .collect();
        Ok(IngestReport {
            article_id: article.article_id.clone(),
            outlet_id: article.outlet_id.clone(),
            records,
            article_ledger,
            scores,
        })
    }

    /// Analyzes an article with the current cumulative ledger as prior, then
    /// records its scores and folds its cells in. On error nothing changes.
    pub fn ingest(&mut self, article: &RawArticle, lexicon: &Lexicon) -> Result<IngestReport, KbError> {
        if self.processed.contains(&article.article_id) {
            return Err(KbError::DuplicateArticle(article.article_id.clone()));
        }
        let report = self.preview(article, lexicon)?;
        for (whom, score) in &report.scores {
            self.history
                .record(&report.outlet_id, whom, &report.article_id, *score);
        }
        self.cumulative
            .absorb(&Self::as_cumulative(&report.article_ledger))
            .expect("scopes match");
        self.processed.insert(article.article_id.clone());
        if self.lexicon_fingerprint.is_empty() {
            self.lexicon_fingerprint = lexicon.fingerprint();
        }
        Ok(report)
    }

    fn as_cumulative(article: &PolarityLedger) -> PolarityLedger {
        let mut out = PolarityLedger::new(Scope::Cumulative);
        for (key, cell) in article.cells() {
            out.insert_cell(key.clone(), *cell);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            cells: self
                .cumulative
                .cells()
                .map(|(k, c)| CellDoc {
                    p: c.p,
                    s: c.s,
                    who: k.who.clone(),
                    whom: k.whom.clone(),
                })
                .collect(),
            history: self
                .history
                .iter()
                .map(|(outlet, whom, scores)| HistoryDoc {
                    outlet: outlet.to_string(),
                    scores: scores
                        .iter()
                        .map(|a| ScoreDoc {
                            article_id: a.article_id.clone(),
                            den: *a.score.denom(),
                            num: *a.score.numer(),
                        })
                        .collect(),
                    whom: whom.to_string(),
                })
                .collect(),
            lexicon_fingerprint: self.lexicon_fingerprint.clone(),
            processed: self.processed.iter().cloned().collect(),
            version: self.format_version,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
        text.push('\n');
        text
    }

    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), KbError> {
        sink.write_all(self.to_json().as_bytes())?;
        sink.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut source: R) -> Result<Self, KbError> {
        let mut text = String::new();
        source
            .read_to_string(&mut text)
            .map_err(|e| corrupt("$", e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, KbError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| corrupt("$", e.to_string()))?;
        let version = value
            .get("version")
            .ok_or_else(|| corrupt("version", "missing field"))?
            .as_u64()
            .ok_or_else(|| corrupt("version", "expected an unsigned integer"))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(KbError::VersionMismatch {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let doc: Document = serde_path_to_error::deserialize(value)
            .map_err(|e| corrupt(e.path().to_string(), e.inner().to_string()))?;
        doc.validate()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    cells: Vec<CellDoc>,
    history: Vec<HistoryDoc>,
    lexicon_fingerprint: String,
    processed: Vec<String>,
    version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    p: i64,
    s: u64,
    who: String,
    whom: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryDoc {
    outlet: String,
    scores: Vec<ScoreDoc>,
    whom: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreDoc {
    article_id: String,
    den: i64,
    num: i64,
}

impl Document {
    fn validate(self) -> Result<KnowledgeBase, KbError> {
        let mut processed = BTreeSet::new();
        for (i, id) in self.processed.into_iter().enumerate() {
            if id.is_empty() {
                return Err(corrupt(format!("processed[{i}]"), "empty article id"));
            }
            if !processed.insert(id) {
                return Err(corrupt(format!("processed[{i}]"), "duplicate article id"));
            }
        }
        if !processed.is_empty() && self.lexicon_fingerprint.is_empty() {
            return Err(corrupt("lexicon_fingerprint", "missing for a non-empty knowledge base"));
        }

        let mut cumulative = PolarityLedger::new(Scope::Cumulative);
        let mut seen = BTreeSet::new();
        for (i, c) in self.cells.into_iter().enumerate() {
            let path = format!("cells[{i}]");
            if c.who.is_empty() || c.whom.is_empty() {
                return Err(corrupt(path, "empty entity id"));
            }
            let cell = Cell::new(c.p, c.s);
            if c.s == 0 {
                return Err(corrupt(path, "stored cell with s = 0"));
            }
            if !cell.is_consistent() {
                return Err(corrupt(path, format!("|p| > s ({} > {})", c.p.unsigned_abs(), c.s)));
            }
            let key = CellKey::new(c.who, c.whom);
            if !seen.insert(key.clone()) {
                return Err(corrupt(path, "duplicate cell key"));
            }
            cumulative.insert_cell(key, cell);
        }

        let mut history = ArticleScoreHistory::new();
        let mut keys = BTreeMap::new();
        for (i, h) in self.history.into_iter().enumerate() {
            let path = format!("history[{i}]");
            if h.outlet.is_empty() || h.whom.is_empty() {
                return Err(corrupt(path, "empty entity id"));
            }
            if keys.insert((h.outlet.clone(), h.whom.clone()), ()).is_some() {
                return Err(corrupt(path, "duplicate (outlet, whom) entry"));
            }
            if h.scores.len() > processed.len() {
                return Err(corrupt(format!("{path}.scores"), "more scores than processed articles"));
            }
            let mut ids = BTreeSet::new();
            let mut scores = Vec::with_capacity(h.scores.len());
            for (j, s) in h.scores.into_iter().enumerate() {
                let spath = format!("{path}.scores[{j}]");
                if !processed.contains(&s.article_id) {
                    return Err(corrupt(spath, format!("article {:?} not in processed", s.article_id)));
                }
                if !ids.insert(s.article_id.clone()) {
                    return Err(corrupt(spath, "article scored twice"));
                }
                if s.den <= 0 {
                    return Err(corrupt(spath, "denominator must be positive"));
                }
                let score = Rational::new_raw(s.num, s.den).reduced();
                if (*score.numer(), *score.denom()) != (s.num, s.den) {
                    return Err(corrupt(spath, "fraction not in lowest terms"));
                }
                if s.num.unsigned_abs() > s.den.unsigned_abs() {
                    return Err(corrupt(spath, "score outside [-1, 1]"));
                }
                scores.push(ArticleScore {
                    article_id: s.article_id,
                    score,
                });
            }
            history.insert(h.outlet, h.whom, scores);
        }

        Ok(KnowledgeBase {
            cumulative,
            history,
            processed,
            lexicon_fingerprint: self.lexicon_fingerprint,
            format_version: self.version,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEXICON: &str = "\
[outlet] k
[reporting]
menyatakan
[opinions]
koruptor -1
jujur +1
[entities]
kpk
andi
";

    fn lexicon() -> Lexicon {
        Lexicon::parse(LEXICON).unwrap()
    }

    fn trained() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.ingest(&RawArticle::new("1", "k", "Andi koruptor. KPK menyatakan Andi koruptor."), &lexicon())
            .unwrap();
        kb.ingest(&RawArticle::new("2", "k", "Andi jujur. Andi koruptor. Andi jujur."), &lexicon())
            .unwrap();
        kb
    }

    #[test]
    fn ingest_updates_everything() {
        let kb = trained();
        assert_eq!(kb.cumulative().cell("k", "andi"), Cell::new(0, 4));
        assert_eq!(kb.cumulative().cell("kpk", "andi"), Cell::new(-1, 1));
        let scores: Vec<_> = kb.history().scores("k", "andi").iter().map(|a| a.score).collect();
        assert_eq!(scores, [Rational::from_integer(-1), Rational::new(1, 3)]);
        assert_eq!(kb.processed().len(), 2);
        assert_eq!(kb.lexicon_fingerprint(), lexicon().fingerprint());
    }

    #[test]
    fn duplicate_article_rejected_without_change() {
        let mut kb = trained();
        let before = kb.clone();
        let err = kb.ingest(&RawArticle::new("1", "k", "Andi jujur."), &lexicon()).unwrap_err();
        assert!(matches!(err, KbError::DuplicateArticle(id) if id == "1"));
        assert_eq!(kb, before);
    }

    #[test]
    fn lexicon_and_outlet_mismatch() {
        let mut kb = trained();
        let other = Lexicon::parse(&LEXICON.replace("jujur +1", "jujur -1")).unwrap();
        let err = kb.ingest(&RawArticle::new("3", "k", "Andi jujur."), &other).unwrap_err();
        assert!(matches!(err, KbError::LexiconMismatch { .. }));
        let err = kb.ingest(&RawArticle::new("3", "x", "Andi jujur."), &lexicon()).unwrap_err();
        assert!(matches!(err, KbError::OutletMismatch { .. }));
        assert_eq!(kb, trained());
    }

    #[test]
    fn preview_does_not_mutate() {
        let kb = trained();
        let report = kb.preview(&RawArticle::new("9", "k", "Andi jujur."), &lexicon()).unwrap();
        assert!(!report.records[0].sarcasm);
        assert_eq!(report.scores, [("andi".to_string(), Rational::from_integer(1))]);
        assert_eq!(kb, trained());
    }

    #[test]
    fn save_load_round_trip() {
        let kb = trained();
        let mut buf = Vec::new();
        kb.save(&mut buf).unwrap();
        let back = KnowledgeBase::load(buf.as_slice()).unwrap();
        assert_eq!(back, kb);
        assert_eq!(back.to_json().as_bytes(), buf.as_slice());
    }

    #[test]
    fn empty_document() {
        let text = KnowledgeBase::new().to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "cells": [], "history": [], "lexicon_fingerprint": "", "processed": [], "version": 1
            })
        );
        assert_eq!(KnowledgeBase::from_json(&text).unwrap(), KnowledgeBase::new());
    }

    fn corrupted(mutate: impl FnOnce(&mut serde_json::Value)) -> KbError {
        let mut v: serde_json::Value = serde_json::from_str(&trained().to_json()).unwrap();
        mutate(&mut v);
        KnowledgeBase::from_json(&v.to_string()).unwrap_err()
    }

    fn path_of(err: KbError) -> String {
        match err {
            KbError::CorruptDocument { path, .. } => path,
            other => panic!("expected CorruptDocument, got {other:?}"),
        }
    }

    #[test]
    fn rejects_corruption() {
        let text = trained().to_json();
        assert_eq!(path_of(KnowledgeBase::from_json(&text[..text.len() / 2]).unwrap_err()), "$");
        assert_eq!(path_of(corrupted(|v| v["cells"][0]["p"] = 5.into())), "cells[0]");
        assert_eq!(path_of(corrupted(|v| v["cells"][1]["s"] = 0.into())), "cells[1]");
        assert_eq!(path_of(corrupted(|v| v["cells"][0]["s"] = "x".into())), "cells[0].s");
        assert_eq!(
            path_of(corrupted(|v| v["history"][0]["scores"][0]["den"] = 0.into())),
            "history[0].scores[0]"
        );
        assert_eq!(
            path_of(corrupted(|v| {
                v["history"][0]["scores"][1]["num"] = 2.into();
                v["history"][0]["scores"][1]["den"] = 6.into();
            })),
            "history[0].scores[1]"
        );
        assert_eq!(
            path_of(corrupted(|v| v["history"][0]["scores"][0]["article_id"] = "nope".into())),
            "history[0].scores[0]"
        );
        assert_eq!(path_of(corrupted(|v| v["processed"][1] = "1".into())), "processed[1]");
        assert_eq!(path_of(corrupted(|v| v["extra"] = 1.into())), "extra");
    }

    #[test]
    fn rejects_other_versions() {
        let err = corrupted(|v| v["version"] = 2.into());
        assert!(matches!(err, KbError::VersionMismatch { found: 2, supported: 1 }));
        assert_eq!(path_of(corrupted(|v| v.as_object_mut().unwrap().remove("version").map(|_| ()).unwrap())), "version");
    }
}
