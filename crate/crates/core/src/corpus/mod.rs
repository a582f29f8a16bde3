//! Document ingestion, tokenization, dependency parses and rewrite pairing.
//!
//! Documents are stored one JSON object per line:
//!
//! ```text
//! {"id": "r1", "text": "...", "date": "2022-12-01", "author": "u9",
//!  "labels": {"age": 31.0, "gender": "f"}, "embedding": [0.1, 0.2],
//!  "detector_score": 0.83, "rewrite_of": null, "llm": null, "prompt": null}
//! ```
//!
//! Only `id`, `text` and `date` are required.

mod conllu;
mod tokenize;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use serde_with::{DeserializeFromStr, SerializeDisplay};

pub use conllu::{load_conllu, parse_conllu, SentenceParse};
pub use tokenize::{tokenize, tokenize_text, TokenStream};

use crate::error::{Error, Result};

/// A trait label: either a continuous score or a category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelValue {
    Number(f64),
    Category(String),
}

impl LabelValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            LabelValue::Number(v) => Some(*v),
            LabelValue::Category(_) => None,
        }
    }

    /// Category view; numbers render with their shortest representation.
    pub fn as_category(&self) -> String {
        match self {
            LabelValue::Number(v) => v.to_string(),
            LabelValue::Category(s) => s.clone(),
        }
    }
}

/// Rewrite prompt family: Rephrase or Syntax & Grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PromptTag {
    #[serde(rename = "R")]
    Rephrase,
    #[serde(rename = "SG")]
    SyntaxGrammar,
}

impl fmt::Display for PromptTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptTag::Rephrase => "R",
            PromptTag::SyntaxGrammar => "SG",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub date: NaiveDate,
    pub author_id: Option<String>,
    pub labels: BTreeMap<String, LabelValue>,
    pub embedding: Option<Vec<f64>>,
    /// AI-attribution score from an external detector, in [0, 1].
    pub detector_score: Option<f64>,
    pub rewrite_of: Option<String>,
    pub llm_tag: Option<String>,
    pub prompt_tag: Option<PromptTag>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, date: NaiveDate) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            date,
            author_id: None,
            labels: BTreeMap::new(),
            embedding: None,
            detector_score: None,
            rewrite_of: None,
            llm_tag: None,
            prompt_tag: None,
        }
    }

    pub fn month(&self) -> Month {
        Month::from_date(self.date)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::invalid("document id is empty"));
        }
        if self.text.trim().is_empty() {
            return Err(Error::invalid(format!("document `{}` has blank text", self.id)));
        }
        if let Some(s) = self.detector_score {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::invalid(format!("document `{}` detector_score {s} outside [0, 1]", self.id)));
            }
        }
        if let Some(e) = &self.embedding {
            if e.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("document `{}` has a non-finite embedding", self.id)));
            }
        }
        Ok(())
    }
}

/// A calendar month, ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, SerializeDisplay, DeserializeFromStr)]
pub struct Month {
    pub year: i32,
    /// 1..=12
    pub month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month {month} out of range");
        Month { year, month }
    }

    pub fn from_date(date: NaiveDate) -> Self {
        Month::new(date.year(), date.month())
    }

    /// Months since year 0, for arithmetic.
    pub fn index(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_index(index: i64) -> Self {
        Month::new(index.div_euclid(12) as i32, (index.rem_euclid(12) + 1) as u32)
    }

    pub fn offset(self, months: i64) -> Self {
        Month::from_index(self.index() + months)
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid month")
    }

    /// Inclusive range of months.
    pub fn range(start: Month, end: Month) -> impl Iterator<Item = Month> {
        (start.index()..=end.index()).map(Month::from_index)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl std::str::FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(d) = parse_date(s) {
            return Ok(Month::from_date(d));
        }
        let (y, m) = s
            .split_once('-')
            .ok_or_else(|| Error::invalid(format!("bad month `{s}`")))?;
        let year = y.parse().map_err(|_| Error::invalid(format!("bad month `{s}`")))?;
        let month: u32 = m.parse().map_err(|_| Error::invalid(format!("bad month `{s}`")))?;
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(format!("bad month `{s}`")));
        }
        Ok(Month::new(year, month))
    }
}

/// Parse an ISO-8601 calendar date or an RFC 3339 timestamp, normalized to
/// the UTC day.
pub fn parse_date(s: &str) -> Result<NaiveDate> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.with_timezone(&Utc).date_naive());
    }
    if let Ok(dt) = chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
        return Ok(dt.date());
    }
    Err(Error::invalid(format!("unparseable date `{s}`")))
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: Option<String>,
    text: Option<String>,
    date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    author: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<String, LabelValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detector_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rewrite_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    llm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prompt: Option<PromptTag>,
}

impl Record {
    fn into_document(self) -> std::result::Result<Document, String> {
        let id = self.id.ok_or("record missing `id`")?;
        let text = self.text.ok_or_else(|| format!("record `{id}` missing `text`"))?;
        let date = self.date.ok_or_else(|| format!("record `{id}` missing `date`"))?;
        let date = parse_date(&date).map_err(|e| format!("record `{id}`: {e}"))?;
        Ok(Document {
            id,
            text,
            date,
            author_id: self.author,
            labels: self.labels,
            embedding: self.embedding,
            detector_score: self.detector_score,
            rewrite_of: self.rewrite_of,
            llm_tag: self.llm,
            prompt_tag: self.prompt,
        })
    }

    fn from_document(doc: &Document) -> Self {
        Record {
            id: Some(doc.id.clone()),
            text: Some(doc.text.clone()),
            date: Some(doc.date.format("%Y-%m-%d").to_string()),
            author: doc.author_id.clone(),
            labels: doc.labels.clone(),
            embedding: doc.embedding.clone(),
            detector_score: doc.detector_score,
            rewrite_of: doc.rewrite_of.clone(),
            llm: doc.llm_tag.clone(),
            prompt: doc.prompt_tag,
        }
    }
}

/// Read every record of a document file, validating ids and fields.
pub fn read_documents(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    load_documents(path, 0)
}

/// Read a document file, keeping documents with at least `min_words`
/// tokenizer tokens, in file order.
pub fn load_documents(path: impl AsRef<Path>, min_words: usize) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| Error::malformed(path, line_no, e.to_string()))?;
        let doc = record
            .into_document()
            .map_err(|m| Error::malformed(path, line_no, m))?;
        doc.validate()
            .map_err(|e| Error::malformed(path, line_no, e.to_string()))?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        if min_words > 0 && tokenize_text(&doc.text).len() < min_words {
            continue;
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn write_documents(path: impl AsRef<Path>, docs: &[Document]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for doc in docs {
        let line = serde_json::to_string(&Record::from_document(doc)).map_err(|e| Error::Invariant(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Result of matching rewrites to their originals.
#[derive(Debug, Clone, Default)]
pub struct RewritePairing {
    /// (original, rewrite), ordered by original then rewrite file order.
    pub pairs: Vec<(Document, Document)>,
    /// Originals that received no rewrite.
    pub unpaired_originals: Vec<String>,
}

pub fn pair_rewrites(originals: &[Document], rewrites: &[Document]) -> Result<RewritePairing> {
    let index: HashMap<&str, usize> = originals.iter().enumerate().map(|(i, d)| (d.id.as_str(), i)).collect();
    let mut by_original: Vec<Vec<&Document>> = vec![Vec::new(); originals.len()];
    let mut keys = HashSet::new();
    for rw in rewrites {
        let target = rw
            .rewrite_of
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("rewrite `{}` has no rewrite_of", rw.id)))?;
        let &i = index
            .get(target)
            .ok_or_else(|| Error::invalid(format!("rewrite `{}` references missing original `{target}`", rw.id)))?;
        if !keys.insert((target.to_string(), rw.llm_tag.clone(), rw.prompt_tag)) {
            return Err(Error::invalid(format!(
                "duplicate rewrite of `{target}` for llm {:?} prompt {:?}",
                rw.llm_tag, rw.prompt_tag
            )));
        }
        by_original[i].push(rw);
    }
    let mut out = RewritePairing::default();
    for (orig, rws) in originals.iter().zip(by_original) {
        if rws.is_empty() {
            out.unpaired_originals.push(orig.id.clone());
        }
        for rw in rws {
            out.pairs.push((orig.clone(), rw.clone()));
        }
    }
    Ok(out)
}
