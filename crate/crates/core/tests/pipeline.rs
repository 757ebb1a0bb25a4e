mod common;

use std::collections::HashSet;

use newsent::analyzer::analyze_article;
use newsent::textpipe::{cleanse, prepare, resolve, segment, tokenize};
use newsent::{Cell, KnowledgeBase, Lexicon, PolarityLedger, RawArticle, Rational, Scope, TokenClass, Valence};

use common::*;

#[test]
fn fixture_lexicon_lookups() {
    let lex = lexicon();
    assert_eq!(lex.lookup("koruptor"), TokenClass::Opinion(Valence::Negative));
    assert_eq!(lex.lookup("tersangka"), TokenClass::Opinion(Valence::Negative));
    assert_eq!(lex.lookup("adalah"), TokenClass::Stopword);
    assert_eq!(lex.lookup("seorang"), TokenClass::Stopword);
    assert_eq!(lex.lookup("redaksi"), TokenClass::Entity("k".into()));
    assert_eq!(lex.lookup("zzzunknown"), TokenClass::Plain);
    assert_eq!(Lexicon::parse(&lex.to_text()).unwrap(), lex);
}

#[test]
fn fixture_lexicon_is_disjoint() {
    let lex = lexicon();
    let mut seen = HashSet::new();
    for (surface, class) in lex.surfaces() {
        assert!(seen.insert(surface.to_string()));
        assert_ne!(class, TokenClass::Plain, "{surface}");
        if !surface.contains(' ') {
            assert_eq!(lex.lookup(surface), class);
            assert_eq!(lex.lookup(&surface.to_uppercase()), class);
        }
    }
}

#[test]
fn fixture_articles_have_expected_sentence_counts() {
    let s4 = segment(&figure4_article().body);
    assert_eq!(s4.len(), 17);
    assert_eq!(s4.iter().map(|s| s.index).collect::<Vec<_>>(), (1..=17).collect::<Vec<_>>());
    assert_eq!(segment(&figure5_article().body).len(), 11);
}

#[test]
fn cleanser_example() {
    let lex = lexicon();
    let s = cleanse(&tokenize("ABC adalah seorang koruptor", 1), &lex);
    assert_eq!(s.normalized(), ["abc", "koruptor"]);
}

#[test]
fn helper_replaces_aliases() {
    let lex = lexicon();
    let s = resolve(&cleanse(&tokenize("Lembaga antikorupsi memanggil Andi Mallarangeng.", 1), &lex), &lex);
    assert_eq!(s.normalized(), ["kpk", "memanggil", "andi"]);
    let s = resolve(&tokenize("Komisi Pemberantasan Korupsi", 1), &lex);
    assert_eq!(s.normalized(), ["kpk"]);
}

#[test]
fn pipeline_is_deterministic() {
    let lex = lexicon();
    let body = figure4_article().body;
    assert_eq!(prepare(&body, &lex), prepare(&body, &lex));
}

#[test]
fn sarcasm_probe_after_training() {
    let lex = lexicon();
    let mut kb = KnowledgeBase::new();
    kb.ingest(&figure4_article(), &lex).unwrap();
    assert_eq!(kb.cumulative().cell("k", "andi").p, -6);
    let probe = RawArticle::new("probe", "k", "Andi jujur.");
    let recs = analyze_article(&probe, &lex, kb.cumulative());
    assert_eq!(recs.len(), 1);
    assert_eq!((recs[0].who.as_str(), recs[0].whom.as_str(), recs[0].value), ("k", "andi", 1));
    assert!(recs[0].sarcasm);

    let fresh = analyze_article(&probe, &lex, &PolarityLedger::new(Scope::Cumulative));
    assert!(!fresh[0].sarcasm);
}

#[test]
fn figure5_outlet_view() {
    let lex = lexicon();
    let mut kb = KnowledgeBase::new();
    let report = kb.ingest(&figure5_article(), &lex).unwrap();
    assert_eq!(report.article_ledger.outlet_view("k", "andi"), Cell::new(2, 4));
    assert_eq!(kb.cumulative().outlet_view("k", "andi"), Cell::new(2, 4));
    assert_eq!(kb.cumulative().cell("k", "andi"), Cell::new(-1, 1));
}

#[test]
fn knowledge_base_after_both_fixtures() {
    let lex = lexicon();
    let mut kb = KnowledgeBase::new();
    kb.ingest(&figure4_article(), &lex).unwrap();
    assert_eq!(kb.cumulative().outlet_view("k", "andi"), Cell::new(-7, 7));
    let scores: Vec<Rational> = kb.history().scores("k", "andi").iter().map(|a| a.score).collect();
    assert_eq!(scores, [Rational::from_integer(-1)]);

    kb.ingest(&figure5_article(), &lex).unwrap();
    let scores: Vec<Rational> = kb.history().scores("k", "andi").iter().map(|a| a.score).collect();
    assert_eq!(scores, [Rational::from_integer(-1), Rational::new(1, 2)]);

    let doc: serde_json::Value = serde_json::from_str(&kb.to_json()).unwrap();
    let keys: HashSet<(String, String)> = doc["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["who"].as_str().unwrap().to_string(), c["whom"].as_str().unwrap().to_string()))
        .collect();
    let expected: HashSet<(String, String)> = [
        ("kpk", "andi"),
        ("k", "andi"),
        ("k", "kpk"),
        ("kpk", "deddy"),
        ("km", "andi"),
        ("ahmad", "andi"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    assert_eq!(keys, expected);
    assert_eq!(doc["processed"], serde_json::json!(["1", "2"]));
}

#[test]
fn same_order_gives_identical_documents() {
    let lex = lexicon();
    let build = || {
        let mut kb = KnowledgeBase::new();
        kb.ingest(&figure4_article(), &lex).unwrap();
        kb.ingest(&figure5_article(), &lex).unwrap();
        kb.to_json()
    };
    assert_eq!(build(), build());
}

#[test]
fn body_without_statements() {
    let lex = lexicon();
    let empty = RawArticle::new("e", "k", "");
    let mut kb = KnowledgeBase::new();
    let report = kb.ingest(&empty, &lex).unwrap();
    assert!(report.records.is_empty());
    assert!(report.scores.is_empty());
    assert!(kb.history().is_empty());
    assert!(kb.processed().contains("e"));
}
