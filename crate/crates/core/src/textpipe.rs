//! Reader, cleanser and helper stages: sentence segmentation, tokenization,
//! stopword removal and alias-to-canonical substitution. Nothing in here
//! touches ledger state.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lexicon::{Lexicon, TokenClass, MAX_ALIAS_TOKENS};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: bad header, expected `@article <id> @outlet <outlet>`")]
    BadHeader { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArticle {
    pub article_id: String,
    pub outlet_id: String,
    pub body: String,
}

impl RawArticle {
    pub fn new(article_id: impl Into<String>, outlet_id: impl Into<String>, body: impl Into<String>) -> Self {
        Self {
            article_id: article_id.into(),
            outlet_id: outlet_id.into(),
            body: body.into(),
        }
    }

    /// Parses an article file: a `@article <id> @outlet <outlet>` header line
    /// followed by the body. Returns `None` when the header is malformed.
    pub fn parse(text: &str) -> Option<Self> {
        let (header, body) = match text.split_once('\n') {
            Some((h, b)) => (h, b),
            None => (text, ""),
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        match parts.as_slice() {
            ["@article", id, "@outlet", outlet] => Some(Self::new(*id, outlet.to_lowercase(), body)),
            _ => None,
        }
    }

    /// Inverse of [`RawArticle::parse`].
    pub fn to_text(&self) -> String {
        format!("@article {} @outlet {}\n{}", self.article_id, self.outlet_id, self.body)
    }

    pub fn read(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).ok_or_else(|| CorpusError::BadHeader {
            path: path.to_path_buf(),
        })
    }
}

/// Reads every `.txt` file in `dir`, ordered by ascending article id.
pub fn load_corpus(dir: &Path) -> Result<Vec<RawArticle>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut articles = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            articles.push(RawArticle::read(&path)?);
        }
    }
    articles.sort_by(|a, b| a.article_id.cmp(&b.article_id));
    Ok(articles)
}

/// A sentence before tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSentence {
    pub index: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub sentence_index: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn normalized(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.normalized.as_str()).collect()
    }
}

/// Splits a body into sentences at `.`, `!` or `?` followed by whitespace or
/// end of text. Whitespace-only fragments are dropped; indices start at 1.
pub fn segment(body: &str) -> Vec<RawSentence> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = body.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let boundary = matches!(c, '.' | '!' | '?')
            && chars.peek().is_none_or(|(_, next)| next.is_whitespace());
        if boundary {
            let end = i + c.len_utf8();
            push_sentence(&mut out, &body[start..end]);
            start = end;
        }
    }
    push_sentence(&mut out, &body[start..]);
    out
}

fn push_sentence(out: &mut Vec<RawSentence>, text: &str) {
    let text = text.trim();
    if !text.is_empty() {
        out.push(RawSentence {
            index: out.len() + 1,
            text: text.to_string(),
        });
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits on whitespace and detaches punctuation into single-character
/// tokens. Hyphens and apostrophes between two word characters stay inside
/// the word (`anti-korupsi`, `don't`).
pub fn tokenize(sentence_text: &str, index: usize) -> Sentence {
    let mut surfaces: Vec<String> = Vec::new();
    for run in sentence_text.split_whitespace() {
        let chars: Vec<char> = run.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let joiner = matches!(c, '-' | '\'' | '\u{2019}')
                && i > 0
                && i + 1 < chars.len()
                && is_word_char(chars[i - 1])
                && is_word_char(chars[i + 1]);
            if is_word_char(c) || joiner {
                word.push(c);
            } else {
                if !word.is_empty() {
                    surfaces.push(std::mem::take(&mut word));
                }
                surfaces.push(c.to_string());
            }
        }
        if !word.is_empty() {
            surfaces.push(word);
        }
    }
    let tokens = surfaces
        .into_iter()
        .enumerate()
        .map(|(position, surface)| Token {
            normalized: surface.to_lowercase(),
            surface,
            sentence_index: index,
            position,
        })
        .collect();
    Sentence { index, tokens }
}

fn is_punctuation(token: &Token) -> bool {
    !token.normalized.chars().any(is_word_char)
}

/// Drops stopwords and punctuation tokens. Survivors keep their order and
/// original positions.
pub fn cleanse(sentence: &Sentence, lexicon: &Lexicon) -> Sentence {
    let tokens = sentence
        .tokens
        .iter()
        .filter(|t| !is_punctuation(t) && lexicon.lookup(&t.normalized) != TokenClass::Stopword)
        .cloned()
        .collect();
    Sentence {
        index: sentence.index,
        tokens,
    }
}

/// Replaces aliases with a single token carrying the entity's canonical id.
/// Windows of up to four tokens are tried, longest first.
pub fn resolve(sentence: &Sentence, lexicon: &Lexicon) -> Sentence {
    let words = sentence.normalized();
    let mut tokens = Vec::with_capacity(sentence.tokens.len());
    let mut i = 0;
    while i < words.len() {
        let longest = MAX_ALIAS_TOKENS.min(words.len() - i);
        let hit = (1..=longest)
            .rev()
            .find_map(|len| lexicon.resolve_alias(&words[i..i + len]).map(|id| (len, id)));
        match hit {
            Some((len, id)) => {
                let first = &sentence.tokens[i];
                tokens.push(Token {
                    surface: id.to_string(),
                    normalized: id.to_string(),
                    sentence_index: first.sentence_index,
                    position: first.position,
                });
                i += len;
            }
            None => {
                tokens.push(sentence.tokens[i].clone());
                i += 1;
            }
        }
    }
    Sentence {
        index: sentence.index,
        tokens,
    }
}

/// Full pipeline: segment, tokenize, cleanse, resolve.
pub fn prepare(body: &str, lexicon: &Lexicon) -> Vec<Sentence> {
    segment(body)
        .into_iter()
        .map(|raw| resolve(&cleanse(&tokenize(&raw.text, raw.index), lexicon), lexicon))
        .collect()
}
