//! Statement extraction: walks resolved sentences tracking the current
//! speaker (who) and target (whom), applies negation parity and the sarcasm
//! check, and emits one [`StatementRecord`] per opinion word.

use crate::ledger::PolarityLedger;
use crate::lexicon::{Lexicon, TokenClass};
use crate::textpipe::{self, RawArticle, Sentence};

/// How far ahead of an entity a reporting verb may sit for the entity to be
/// taken as the speaker.
pub const REPORTING_WINDOW: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatementRecord {
    pub article_id: String,
    pub sentence_index: usize,
    pub who: String,
    pub whom: String,
    /// `-1` or `+1`, after negation flips.
    pub value: i64,
    pub sarcasm: bool,
    pub negation_count: usize,
}

/// Speaker/target tracking for one article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzerState {
    pub current_who: String,
    pub current_whom: Option<String>,
}

impl AnalyzerState {
    pub fn new(outlet_id: &str) -> Self {
        Self {
            current_who: outlet_id.to_string(),
            current_whom: None,
        }
    }
}

/// Extracts statements from one article. `prior` is the cumulative ledger as
/// of the start of the article; it only feeds the sarcasm flag.
pub fn analyze_article(article: &RawArticle, lexicon: &Lexicon, prior: &PolarityLedger) -> Vec<StatementRecord> {
    let sentences = textpipe::prepare(&article.body, lexicon);
    analyze_sentences(&article.article_id, &article.outlet_id, &sentences, lexicon, prior)
}

/// Same as [`analyze_article`] over already prepared sentences.
pub fn analyze_sentences(
    article_id: &str,
    outlet_id: &str,
    sentences: &[Sentence],
    lexicon: &Lexicon,
    prior: &PolarityLedger,
) -> Vec<StatementRecord> {
    let mut state = AnalyzerState::new(outlet_id);
    let mut records = Vec::new();
    for sentence in sentences {
        let classes: Vec<TokenClass> = sentence
            .tokens
            .iter()
            .map(|t| lexicon.lookup(&t.normalized))
            .collect();
        let negation_count = classes.iter().filter(|c| **c == TokenClass::Negation).count();
        let flip = if negation_count % 2 == 0 { 1 } else { -1 };

        for (i, class) in classes.iter().enumerate() {
            match class {
                TokenClass::Entity(id) => {
                    let ahead = &classes[i + 1..classes.len().min(i + 1 + REPORTING_WINDOW)];
                    if ahead.contains(&TokenClass::ReportingVerb) {
                        state.current_who = id.clone();
                    } else {
                        state.current_whom = Some(id.clone());
                    }
                }
                TokenClass::Opinion(valence) => {
                    let Some(whom) = &state.current_whom else {
                        continue;
                    };
                    let value = valence.value() * flip;
                    let sarcasm = value > 0 && prior.cell(&state.current_who, whom).p < 0;
                    records.push(StatementRecord {
                        article_id: article_id.to_string(),
                        sentence_index: sentence.index,
                        who: state.current_who.clone(),
                        whom: whom.clone(),
                        value,
                        sarcasm,
                        negation_count,
                    });
                }
                _ => {}
            }
        }
    }
    records
}

pub const TRACE_HEADER: &str = "Article Index\tSentence Index\tWho\tWhom\tValue";

/// Tab-separated statement table; the outlet is written as `0`.
pub fn trace(records: &[StatementRecord], outlet_id: &str) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    let shown = |id: &str| if id == outlet_id { "0".to_string() } else { id.to_string() };
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.article_id,
            r.sentence_index,
            shown(&r.who),
            shown(&r.whom),
            r.value
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::Scope;

    const LEXICON: &str = "\
[outlet] k
[stopwords]
adalah
[negations]
tidak
bukan
[reporting]
menyatakan
[opinions]
koruptor -1
jujur +1
[entities]
k : redaksi
kpk
andi
";

    fn run(body: &str, prior: &PolarityLedger) -> Vec<StatementRecord> {
        let lex = Lexicon::parse(LEXICON).unwrap();
        analyze_article(&RawArticle::new("1", "k", body), &lex, prior)
    }

    fn empty() -> PolarityLedger {
        PolarityLedger::new(Scope::Cumulative)
    }

    fn triples(records: &[StatementRecord]) -> Vec<(usize, &str, &str, i64)> {
        records
            .iter()
            .map(|r| (r.sentence_index, r.who.as_str(), r.whom.as_str(), r.value))
            .collect()
    }

    #[test]
    fn reporting_verb_marks_speaker() {
        let recs = run("KPK menyatakan Andi koruptor.", &empty());
        assert_eq!(triples(&recs), [(1, "kpk", "andi", -1)]);
        assert!(!recs[0].sarcasm);
    }

    #[test]
    fn reporting_window_is_two_tokens() {
        let recs = run("KPK kemarin menyatakan Andi koruptor.", &empty());
        assert_eq!(triples(&recs), [(1, "kpk", "andi", -1)]);
        let recs = run("KPK kemarin sore menyatakan Andi koruptor.", &empty());
        assert_eq!(triples(&recs), [(1, "k", "andi", -1)]);
    }

    #[test]
    fn speaker_defaults_to_outlet() {
        let recs = run("Andi koruptor.", &empty());
        assert_eq!(triples(&recs), [(1, "k", "andi", -1)]);
    }

    #[test]
    fn negation_parity() {
        assert_eq!(run("Andi tidak koruptor.", &empty())[0].value, 1);
        let recs = run("Andi tidak bukan koruptor.", &empty());
        assert_eq!(recs[0].value, -1);
        assert_eq!(recs[0].negation_count, 2);
        assert_eq!(run("Andi bukan jujur.", &empty())[0].value, -1);
    }

    #[test]
    fn target_switches_within_sentence() {
        let recs = run("Andi koruptor, KPK jujur.", &empty());
        assert_eq!(triples(&recs), [(1, "k", "andi", -1), (1, "k", "kpk", 1)]);
    }

    #[test]
    fn state_persists_across_sentences() {
        let recs = run("KPK menyatakan Andi koruptor. Kemudian koruptor lagi.", &empty());
        assert_eq!(triples(&recs), [(1, "kpk", "andi", -1), (2, "kpk", "andi", -1)]);
        let recs = run("KPK menyatakan Andi koruptor. Redaksi menyatakan koruptor.", &empty());
        assert_eq!(triples(&recs)[1], (2, "k", "andi", -1));
    }

    #[test]
    fn orphan_opinion_emits_nothing() {
        assert!(run("Semua koruptor.", &empty()).is_empty());
        assert!(run("", &empty()).is_empty());
        assert!(run("Tidak ada tokoh di sini.", &empty()).is_empty());
    }

    #[test]
    fn self_statement_allowed() {
        let recs = run("Andi menyatakan Andi jujur.", &empty());
        assert_eq!(triples(&recs), [(1, "andi", "andi", 1)]);
    }

    #[test]
    fn sarcasm_only_on_positive_with_negative_prior() {
        let mut prior = empty();
        for _ in 0..6 {
            prior.apply_value("k", "andi", -1);
        }
        let recs = run("Andi jujur. Andi koruptor. KPK jujur.", &prior);
        assert_eq!(triples(&recs), [(1, "k", "andi", 1), (2, "k", "andi", -1), (3, "k", "kpk", 1)]);
        assert_eq!(recs.iter().map(|r| r.sarcasm).collect::<Vec<_>>(), [true, false, false]);
    }

    #[test]
    fn trace_renders_outlet_as_zero() {
        let recs = run("Andi koruptor. KPK menyatakan Andi koruptor.", &empty());
        assert_eq!(
            trace(&recs, "k"),
            format!("{TRACE_HEADER}\n1\t1\t0\tandi\t-1\n1\t2\tkpk\tandi\t-1\n")
        );
        assert_eq!(trace(&[], "k"), format!("{TRACE_HEADER}\n"));
    }
}
