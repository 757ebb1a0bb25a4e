//! The word database: opinion words, negation keywords, stopwords,
//! reporting verbs and the entity dictionary.
//!
//! Lexicons are loaded from a line-oriented text format:
//!
//! ```text
//! # comment
//! [outlet] k
//! [stopwords]
//! adalah
//! [negations]
//! tidak
//! [reporting]
//! menyatakan
//! [opinions]
//! koruptor -1
//! jujur +1
//! [entities]
//! KPK : komisi pemberantasan korupsi, lembaga antikorupsi
//! ```
//!
//! Every surface form is lowercased on load. Multi-word aliases may span up
//! to [`MAX_ALIAS_TOKENS`] tokens.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Read;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Longest alias window, in tokens, considered during alias resolution.
pub const MAX_ALIAS_TOKENS: usize = 4;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: duplicate surface {surface:?} (first declared on line {first_line})")]
    DuplicateSurface {
        surface: String,
        line: usize,
        first_line: usize,
    },
    #[error("line {line}: invalid valence {value} for {surface:?}, expected +1 or -1")]
    InvalidValence {
        surface: String,
        value: i64,
        line: usize,
    },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("missing [outlet] declaration")]
    MissingOutlet,
    #[error("failed to read lexicon: {0}")]
    Io(#[from] std::io::Error),
}

/// Fixed polarity of an opinion word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valence {
    Negative,
    Positive,
}

impl Valence {
    pub fn value(self) -> i64 {
        match self {
            Valence::Negative => -1,
            Valence::Positive => 1,
        }
    }

    pub fn from_value(value: i64) -> Option<Self> {
        match value {
            -1 => Some(Valence::Negative),
            1 => Some(Valence::Positive),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Valence::Negative => Valence::Positive,
            Valence::Positive => Valence::Negative,
        }
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valence::Negative => f.write_str("-1"),
            Valence::Positive => f.write_str("+1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpinionEntry {
    pub surface: String,
    pub valence: Valence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityEntry {
    pub canonical_id: String,
    /// Canonical id as written in the lexicon, before lowercasing.
    pub display_name: String,
    /// Declared aliases, lowercased and whitespace-collapsed. The canonical id
    /// is an implicit alias and is not repeated here.
    pub aliases: Vec<String>,
}

/// Classification of a single normalized token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Stopword,
    Negation,
    Opinion(Valence),
    Entity(String),
    ReportingVerb,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    outlet_id: String,
    stopwords: BTreeSet<String>,
    negation_words: BTreeSet<String>,
    reporting_verbs: BTreeSet<String>,
    opinion_entries: Vec<OpinionEntry>,
    entities: Vec<EntityEntry>,
    index: HashMap<String, TokenClass>,
    // multi-token aliases keyed by their space-joined form
    phrases: HashMap<String, String>,
}

impl Lexicon {
    pub fn load<R: Read>(mut source: R) -> Result<Self, LexiconError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        Parser::default().run(text)
    }

    pub fn outlet_id(&self) -> &str {
        &self.outlet_id
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn negation_words(&self) -> &BTreeSet<String> {
        &self.negation_words
    }

    pub fn reporting_verbs(&self) -> &BTreeSet<String> {
        &self.reporting_verbs
    }

    pub fn opinion_entries(&self) -> &[OpinionEntry] {
        &self.opinion_entries
    }

    pub fn entities(&self) -> &[EntityEntry] {
        &self.entities
    }

    /// Classifies a token. Case-insensitive; unknown tokens are [`TokenClass::Plain`].
    pub fn lookup(&self, token: &str) -> TokenClass {
        let hit = match self.index.get(token) {
            Some(class) => Some(class),
            None => self.index.get(&token.to_lowercase()),
        };
        hit.cloned().unwrap_or(TokenClass::Plain)
    }

    /// Resolves a (possibly multi-word) alias, given as lowercase tokens, to
    /// its canonical entity id.
    pub fn resolve_alias(&self, tokens: &[&str]) -> Option<&str> {
        match tokens {
            [] => None,
            [single] => match self.index.get(*single) {
                Some(TokenClass::Entity(id)) => Some(id.as_str()),
                _ => None,
            },
            _ => self.phrases.get(&tokens.join(" ")).map(String::as_str),
        }
    }

    /// Every declared surface form with its class. Multi-word aliases are
    /// included with their entity class.
    pub fn surfaces(&self) -> impl Iterator<Item = (&str, TokenClass)> + '_ {
        let singles = self.index.iter().map(|(s, c)| (s.as_str(), c.clone()));
        let phrases = self
            .phrases
            .iter()
            .map(|(s, id)| (s.as_str(), TokenClass::Entity(id.clone())));
        singles.chain(phrases)
    }

    /// Canonical text form. Reloading it yields an equal lexicon.
    pub fn to_text(&self) -> String {
        let mut out = format!("[outlet] {}\n", self.outlet_id);
        let mut section = |name: &str, lines: Vec<String>| {
            out.push_str(&format!("[{name}]\n"));
            for line in lines {
                out.push_str(&line);
                out.push('\n');
            }
        };
        section("stopwords", self.stopwords.iter().cloned().collect());
        section("negations", self.negation_words.iter().cloned().collect());
        section("reporting", self.reporting_verbs.iter().cloned().collect());
        section(
            "opinions",
            self.opinion_entries
                .iter()
                .map(|o| format!("{} {}", o.surface, o.valence))
                .collect(),
        );
        section(
            "entities",
            self.entities
                .iter()
                .map(|e| {
                    if e.aliases.is_empty() {
                        e.display_name.clone()
                    } else {
                        format!("{} : {}", e.display_name, e.aliases.join(" , "))
                    }
                })
                .collect(),
        );
        out
    }

    /// SHA-256 of the canonical text form, hex encoded. Comments and
    /// formatting in the source file do not affect it.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Stopwords,
    Negations,
    Reporting,
    Opinions,
    Entities,
}

#[derive(Default)]
struct Parser {
    outlet: Option<(String, usize)>,
    section: Option<Section>,
    stopwords: BTreeSet<String>,
    negation_words: BTreeSet<String>,
    reporting_verbs: BTreeSet<String>,
    opinion_entries: Vec<OpinionEntry>,
    entities: Vec<EntityEntry>,
    index: HashMap<String, TokenClass>,
    phrases: HashMap<String, String>,
    declared_at: HashMap<String, usize>,
}

fn malformed(line: usize, reason: impl Into<String>) -> LexiconError {
    LexiconError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

fn single_token(raw: &str, line: usize, what: &str) -> Result<String, LexiconError> {
    let mut parts = raw.split_whitespace();
    match (parts.next(), parts.next()) {
        (Some(tok), None) => Ok(tok.to_lowercase()),
        (None, _) => Err(malformed(line, format!("empty {what}"))),
        (Some(_), Some(_)) => Err(malformed(line, format!("{what} must be a single token: {raw:?}"))),
    }
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Lexicon, LexiconError> {
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                self.header(line, line_no)?;
                continue;
            }
            match self.section {
                None => return Err(malformed(line_no, "content outside of a section")),
                Some(Section::Stopwords) => {
                    let tok = single_token(line, line_no, "stopword")?;
                    self.claim(&tok, line_no, TokenClass::Stopword)?;
                    self.stopwords.insert(tok);
                }
                Some(Section::Negations) => {
                    let tok = single_token(line, line_no, "negation")?;
                    self.claim(&tok, line_no, TokenClass::Negation)?;
                    self.negation_words.insert(tok);
                }
                Some(Section::Reporting) => {
                    let tok = single_token(line, line_no, "reporting verb")?;
                    self.claim(&tok, line_no, TokenClass::ReportingVerb)?;
                    self.reporting_verbs.insert(tok);
                }
                Some(Section::Opinions) => self.opinion(line, line_no)?,
                Some(Section::Entities) => self.entity(line, line_no)?,
            }
        }
        let (outlet_id, outlet_line) = self.outlet.take().ok_or(LexiconError::MissingOutlet)?;
        // The outlet may own an [entities] entry, but no other category may use its id.
        match self.index.get(&outlet_id) {
            None => {}
            Some(TokenClass::Entity(id)) if *id == outlet_id => {}
            Some(_) => {
                return Err(LexiconError::DuplicateSurface {
                    first_line: self.declared_at[&outlet_id],
                    surface: outlet_id,
                    line: outlet_line,
                })
            }
        }
        Ok(Lexicon {
            outlet_id,
            stopwords: self.stopwords,
            negation_words: self.negation_words,
            reporting_verbs: self.reporting_verbs,
            opinion_entries: self.opinion_entries,
            entities: self.entities,
            index: self.index,
            phrases: self.phrases,
        })
    }

    fn header(&mut self, line: &str, line_no: usize) -> Result<(), LexiconError> {
        let close = line
            .find(']')
            .ok_or_else(|| malformed(line_no, "unterminated section header"))?;
        let name = line[1..close].trim();
        let rest = line[close + 1..].trim();
        if name == "outlet" {
            if self.outlet.is_some() {
                return Err(malformed(line_no, "[outlet] declared twice"));
            }
            let id = single_token(rest, line_no, "outlet id")?;
            self.outlet = Some((id, line_no));
            self.section = None;
            return Ok(());
        }
        if !rest.is_empty() {
            return Err(malformed(line_no, format!("unexpected text after [{name}]")));
        }
        self.section = Some(match name {
            "stopwords" => Section::Stopwords,
            "negations" => Section::Negations,
            "reporting" => Section::Reporting,
            "opinions" => Section::Opinions,
            "entities" => Section::Entities,
            other => return Err(malformed(line_no, format!("unknown section [{other}]"))),
        });
        Ok(())
    }

    fn opinion(&mut self, line: &str, line_no: usize) -> Result<(), LexiconError> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [surface, valence] = parts.as_slice() else {
            return Err(malformed(line_no, "expected `<surface> <+1|-1>`"));
        };
        let surface = surface.to_lowercase();
        let value: i64 = valence
            .parse()
            .map_err(|_| malformed(line_no, format!("valence {valence:?} is not an integer")))?;
        let valence = Valence::from_value(value).ok_or_else(|| LexiconError::InvalidValence {
            surface: surface.clone(),
            value,
            line: line_no,
        })?;
        self.claim(&surface, line_no, TokenClass::Opinion(valence))?;
        self.opinion_entries.push(OpinionEntry { surface, valence });
        Ok(())
    }

    fn entity(&mut self, line: &str, line_no: usize) -> Result<(), LexiconError> {
        let (head, tail) = match line.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (line, None),
        };
        let display_name = head.trim().to_string();
        let canonical_id = single_token(&display_name, line_no, "canonical id")?;
        self.claim(&canonical_id, line_no, TokenClass::Entity(canonical_id.clone()))?;

        let mut aliases = Vec::new();
        for raw in tail.into_iter().flat_map(|t| t.split(',')) {
            let tokens: Vec<String> = raw.split_whitespace().map(str::to_lowercase).collect();
            if tokens.is_empty() {
                if tail.is_some_and(|t| !t.trim().is_empty()) {
                    return Err(malformed(line_no, "empty alias"));
                }
                continue;
            }
            if tokens.len() > MAX_ALIAS_TOKENS {
                return Err(malformed(
                    line_no,
                    format!("alias longer than {MAX_ALIAS_TOKENS} tokens"),
                ));
            }
            let alias = tokens.join(" ");
            if tokens.len() == 1 {
                self.claim(&alias, line_no, TokenClass::Entity(canonical_id.clone()))?;
            } else {
                if let Some(first) = self.declared_at.get(&alias) {
                    return Err(LexiconError::DuplicateSurface {
                        surface: alias,
                        line: line_no,
                        first_line: *first,
                    });
                }
                self.declared_at.insert(alias.clone(), line_no);
                self.phrases.insert(alias.clone(), canonical_id.clone());
            }
            aliases.push(alias);
        }
        self.entities.push(EntityEntry {
            canonical_id,
            display_name,
            aliases,
        });
        Ok(())
    }

    fn claim(&mut self, surface: &str, line_no: usize, class: TokenClass) -> Result<(), LexiconError> {
        if let Some(first) = self.declared_at.get(surface) {
            return Err(LexiconError::DuplicateSurface {
                surface: surface.to_string(),
                line: line_no,
                first_line: *first,
            });
        }
        self.declared_at.insert(surface.to_string(), line_no);
        self.index.insert(surface.to_string(), class);
        Ok(())
    }
}
