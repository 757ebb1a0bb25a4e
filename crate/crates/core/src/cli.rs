//! Command-line front end. Exit status 0 on success, 2 on usage or input
//! errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analyzer::trace;
use crate::kb::{KbError, KnowledgeBase};
use crate::ledger::{compact, fixed4, matrix_grid, percent_phrase, Exact, PolarityLedger, Score};
use crate::lexicon::Lexicon;
use crate::textpipe::{load_corpus, RawArticle};

#[derive(Debug, Parser)]
#[command(name = "newsent", version, about = "Who/whom sentiment scoring for news articles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lexicon utilities.
    Lexicon {
        #[command(subcommand)]
        action: LexiconAction,
    },
    /// Ingest every unprocessed article of a corpus directory into the knowledge base.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        kb: PathBuf,
    },
    /// Score one article against the knowledge base without modifying it.
    Analyze {
        article: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        kb: PathBuf,
        /// Print the extracted statement table.
        #[arg(long)]
        trace: bool,
    },
    /// Outlet tendency per entity.
    Report {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        entity: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
        format: OutputFormat,
        /// Append the polarity and count matrices.
        #[arg(long)]
        matrices: bool,
    },
    /// Knowledge base utilities.
    Kb {
        #[command(subcommand)]
        action: KbAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum LexiconAction {
    /// Check a lexicon file and summarize its categories.
    Validate { path: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum KbAction {
    /// Print the direct and outlet-view matrices.
    Export {
        #[arg(long)]
        kb: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

/// Resolved inputs for one invocation.
#[derive(Debug, Clone, Default)]
pub struct CliConfig {
    pub lexicon_path: Option<PathBuf>,
    pub kb_path: Option<PathBuf>,
    pub corpus_dir: Option<PathBuf>,
    pub output_format: Option<OutputFormat>,
    pub entity: Option<String>,
}

impl CliConfig {
    /// Checks that every input path exists before any work starts. The kb
    /// file may be absent for `train`, which creates it.
    fn validate(&self, kb_may_be_missing: bool) -> Result<()> {
        if let Some(p) = &self.lexicon_path {
            if !p.is_file() {
                bail!("lexicon file not found: {}", p.display());
            }
        }
        if let Some(p) = &self.corpus_dir {
            if !p.is_dir() {
                bail!("corpus directory not found: {}", p.display());
            }
        }
        if let Some(p) = &self.kb_path {
            if !kb_may_be_missing && !p.is_file() {
                bail!("knowledge base not found: {}", p.display());
            }
        }
        Ok(())
    }
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Lexicon {
            action: LexiconAction::Validate { path },
        } => cmd_lexicon_validate(&path, out),
        Command::Train { corpus, lexicon, kb } => {
            let config = CliConfig {
                lexicon_path: Some(lexicon),
                kb_path: Some(kb),
                corpus_dir: Some(corpus),
                ..Default::default()
            };
            config.validate(true)?;
            cmd_train(&config, out, err)
        }
        Command::Analyze {
            article,
            lexicon,
            kb,
            trace,
        } => {
            let config = CliConfig {
                lexicon_path: Some(lexicon),
                kb_path: Some(kb),
                ..Default::default()
            };
            config.validate(false)?;
            if !article.is_file() {
                bail!("article file not found: {}", article.display());
            }
            cmd_analyze(&article, &config, trace, out)
        }
        Command::Report {
            kb,
            entity,
            format,
            matrices,
        } => {
            let config = CliConfig {
                kb_path: Some(kb),
                output_format: Some(format),
                entity,
                ..Default::default()
            };
            config.validate(false)?;
            cmd_report(&config, matrices, out)
        }
        Command::Kb {
            action: KbAction::Export { kb },
        } => {
            let kb_path = kb;
            CliConfig {
                kb_path: Some(kb_path.clone()),
                ..Default::default()
            }
            .validate(false)?;
            let kb = read_kb(&kb_path)?;
            out.write_all(export_matrices(&kb).as_bytes())?;
            Ok(())
        }
    }
}

fn read_lexicon(path: &Path) -> Result<Lexicon> {
    let file = fs::File::open(path).with_context(|| format!("cannot open lexicon {}", path.display()))?;
    Lexicon::load(file).with_context(|| format!("invalid lexicon {}", path.display()))
}

fn read_kb(path: &Path) -> Result<KnowledgeBase> {
    let file = fs::File::open(path).with_context(|| format!("cannot open knowledge base {}", path.display()))?;
    KnowledgeBase::load(file).with_context(|| format!("cannot load knowledge base {}", path.display()))
}

fn write_kb(kb: &KnowledgeBase, path: &Path) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, kb.to_json()).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot replace {}", path.display()))?;
    Ok(())
}

fn score_line<R: Exact>(label: &str, value: &R) -> String {
    let sentiment = Score::Value(value.clone()).sentiment();
    format!("{label} {} ({sentiment}) {}", compact(value), percent_phrase(value))
}

pub fn cmd_lexicon_validate(path: &Path, out: &mut dyn Write) -> Result<()> {
    if !path.is_file() {
        bail!("lexicon file not found: {}", path.display());
    }
    let lex = read_lexicon(path)?;
    writeln!(out, "outlet\t{}", lex.outlet_id())?;
    writeln!(out, "opinions\t{}", lex.opinion_entries().len())?;
    writeln!(out, "negations\t{}", lex.negation_words().len())?;
    writeln!(out, "stopwords\t{}", lex.stopwords().len())?;
    writeln!(out, "reporting\t{}", lex.reporting_verbs().len())?;
    writeln!(out, "entities\t{}", lex.entities().len())?;
    writeln!(out, "fingerprint\t{}", lex.fingerprint())?;
    Ok(())
}

pub fn cmd_train(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (Some(lexicon_path), Some(kb_path), Some(corpus_dir)) =
        (&config.lexicon_path, &config.kb_path, &config.corpus_dir)
    else {
        bail!("train needs --corpus, --lexicon and --kb");
    };
    let lexicon = read_lexicon(lexicon_path)?;
    let existed = kb_path.is_file();
    let mut kb = if existed { read_kb(kb_path)? } else { KnowledgeBase::new() };
    let articles = load_corpus(corpus_dir)?;

    let mut ingested = 0usize;
    for article in &articles {
        match kb.ingest(article, &lexicon) {
            Ok(report) => {
                ingested += 1;
                for (whom, score) in &report.scores {
                    writeln!(out, "{}", score_line(&format!("article {} {whom}", report.article_id), score))?;
                }
            }
            Err(KbError::DuplicateArticle(id)) => {
                writeln!(err, "warning: skipping already ingested article {id}")?;
            }
            Err(e) => return Err(e).with_context(|| format!("cannot ingest article {}", article.article_id)),
        }
    }
    if ingested > 0 || !existed {
        write_kb(&kb, kb_path)?;
    }

    writeln!(out, "tendencies")?;
    for (outlet, whom, _) in kb.history().iter() {
        if let Score::Value(t) = kb.history().tendency(outlet, whom) {
            writeln!(out, "{}", score_line(whom, &t))?;
        }
    }
    writeln!(err, "ingested {ingested} of {} article(s)", articles.len())?;
    Ok(())
}

pub fn cmd_analyze(article_path: &Path, config: &CliConfig, show_trace: bool, out: &mut dyn Write) -> Result<()> {
    let (Some(lexicon_path), Some(kb_path)) = (&config.lexicon_path, &config.kb_path) else {
        bail!("analyze needs --lexicon and --kb");
    };
    let lexicon = read_lexicon(lexicon_path)?;
    let kb = read_kb(kb_path)?;
    let article = RawArticle::read(article_path)?;
    let report = kb.preview(&article, &lexicon)?;
    if show_trace {
        out.write_all(trace(&report.records, &report.outlet_id).as_bytes())?;
    }
    for (whom, score) in &report.scores {
        writeln!(out, "{}", score_line(whom, score))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReportRow {
    whom: String,
    articles: usize,
    tendency: String,
    decimal: String,
    class: String,
}

pub const REPORT_HEADER: &str = "whom\tarticles\ttendency\tdecimal\tclass";

fn report_rows(kb: &KnowledgeBase, entity: Option<&str>) -> Vec<ReportRow> {
    let history = kb.history();
    history
        .iter()
        .filter(|(_, whom, _)| entity.is_none_or(|e| e.eq_ignore_ascii_case(whom)))
        .filter_map(|(outlet, whom, scores)| {
            let tendency = history.tendency(outlet, whom);
            let value = tendency.value()?;
            Some(ReportRow {
                whom: whom.to_string(),
                articles: scores.len(),
                tendency: value.to_string(),
                decimal: fixed4(value),
                class: tendency.sentiment().to_string(),
            })
        })
        .collect()
}

pub fn cmd_report(config: &CliConfig, matrices: bool, out: &mut dyn Write) -> Result<()> {
    let Some(kb_path) = &config.kb_path else {
        bail!("report needs --kb");
    };
    let kb = read_kb(kb_path)?;
    let rows = report_rows(&kb, config.entity.as_deref());
    match config.output_format.unwrap_or(OutputFormat::Tsv) {
        OutputFormat::Tsv => {
            writeln!(out, "{REPORT_HEADER}")?;
            for r in &rows {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", r.whom, r.articles, r.tendency, r.decimal, r.class)?;
            }
            if matrices {
                writeln!(out)?;
                out.write_all(export_matrices(&kb).as_bytes())?;
            }
        }
        OutputFormat::Json => {
            let mut doc = serde_json::json!({ "tendencies": rows });
            if matrices {
                doc["matrices"] = export_matrices(&kb).into();
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(())
}

/// Polarity and count grids of the direct cells, followed by the outlet
/// view for every outlet with recorded history.
pub fn export_matrices(kb: &KnowledgeBase) -> String {
    let ledger: &PolarityLedger = kb.cumulative();
    let outlets = kb.history().outlets();
    let first = outlets.iter().next().copied();
    let mut out = String::new();
    out.push_str(&matrix_grid("M", ledger, first, |w, h| ledger.cell(w, h).p.to_string()));
    out.push('\n');
    out.push_str(&matrix_grid("N", ledger, first, |w, h| ledger.cell(w, h).s.to_string()));
    for outlet in outlets {
        let view = |w: &str, h: &str| {
            if w == outlet {
                Some(ledger.outlet_view(outlet, h))
            } else {
                None
            }
        };
        out.push('\n');
        out.push_str(&matrix_grid(&format!("M[view:{outlet}]"), ledger, Some(outlet), |w, h| {
            view(w, h).unwrap_or_else(|| ledger.cell(w, h)).p.to_string()
        }));
        out.push('\n');
        out.push_str(&matrix_grid(&format!("N[view:{outlet}]"), ledger, Some(outlet), |w, h| {
            view(w, h).unwrap_or_else(|| ledger.cell(w, h)).s.to_string()
        }));
    }
    out
}
