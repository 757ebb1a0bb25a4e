#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use newsent::{Lexicon, RawArticle};
use proptest::prelude::*;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn lexicon_path() -> PathBuf {
    fixtures().join("lexicon.txt")
}

pub fn lexicon() -> Lexicon {
    Lexicon::parse(&fs::read_to_string(lexicon_path()).unwrap()).unwrap()
}

pub fn article_path(name: &str) -> PathBuf {
    fixtures().join("articles").join(name)
}

pub fn figure4_article() -> RawArticle {
    RawArticle::read(&article_path("figure4.txt")).unwrap()
}

pub fn figure5_article() -> RawArticle {
    RawArticle::read(&article_path("figure5.txt")).unwrap()
}

pub fn golden(name: &str) -> String {
    fs::read_to_string(fixtures().join("golden").join(name)).unwrap()
}

/// Words drawn from every category of the fixture lexicon, plus unknown
/// words and a comma.
pub const VOCABULARY: &[&str] = &[
    "Andi", "andi mallarangeng", "Mallarangeng", "KPK", "lembaga antikorupsi", "Deddy", "kuasa hukum",
    "Mubarok", "Redaksi", "menyatakan", "mengatakan", "melaporkan", "koruptor", "tersangka", "jujur",
    "bersih", "suap", "tegas", "tidak", "bukan", "adalah", "yang", "seorang", "sidang", "kemarin",
    "berkas", "hakim", ",",
];

/// A sentence without terminators: 1..8 vocabulary words.
pub fn sentence_strategy() -> impl Strategy<Value = Vec<&'static str>> {
    proptest::collection::vec(proptest::sample::select(VOCABULARY), 1..8)
}

pub fn sentences_strategy() -> impl Strategy<Value = Vec<Vec<&'static str>>> {
    proptest::collection::vec(sentence_strategy(), 0..6)
}

pub fn render_body(sentences: &[Vec<&str>]) -> String {
    sentences
        .iter()
        .map(|words| format!("{}.", words.join(" ")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Articles with distinct ids `a0`, `a1`, … from the fixture outlet.
pub fn corpus_strategy(max_articles: usize) -> impl Strategy<Value = Vec<RawArticle>> {
    proptest::collection::vec(sentences_strategy(), 0..=max_articles).prop_map(|bodies| {
        bodies
            .iter()
            .enumerate()
            .map(|(i, s)| RawArticle::new(format!("a{i}"), "k", render_body(s)))
            .collect()
    })
}
