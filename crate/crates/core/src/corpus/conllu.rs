//! CoNLL-U reader for pre-computed dependency parses.
//!
//! Sentences are attributed to documents by `# doc_id = <id>` comments
//! (`# newdoc id = <id>` is accepted as well); an id stays in effect for
//! following sentences until the next one appears. Multiword-token ranges
//! (`3-4`) and empty nodes (`5.1`) are skipped.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Head indices of one parsed sentence; positions are 1-based, head 0 is root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceParse {
    pub token_positions: Vec<usize>,
    pub heads: Vec<usize>,
    pub source_id: String,
}

impl SentenceParse {
    /// Validates head indices for a sentence of `heads.len()` tokens.
    pub fn new(source_id: impl Into<String>, heads: Vec<usize>) -> Result<Self> {
        let n = heads.len();
        for (i, &h) in heads.iter().enumerate() {
            if h > n {
                return Err(Error::invalid(format!("token {} has head {h} outside sentence of {n}", i + 1)));
            }
            if h == i + 1 {
                return Err(Error::invalid(format!("token {} is its own head", i + 1)));
            }
        }
        if n > 0 && !heads.contains(&0) {
            return Err(Error::invalid("sentence has no root"));
        }
        Ok(SentenceParse {
            token_positions: (1..=n).collect(),
            heads,
            source_id: source_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn roots(&self) -> Vec<usize> {
        self.token_positions
            .iter()
            .zip(&self.heads)
            .filter(|(_, &h)| h == 0)
            .map(|(&p, _)| p)
            .collect()
    }

    /// Non-root arcs as (dependent, head) positions.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.token_positions
            .iter()
            .zip(&self.heads)
            .filter(|(_, &h)| h != 0)
            .map(|(&p, &h)| (p, h))
    }
}

pub fn load_conllu(path: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<SentenceParse>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(BufReader::new(file), path)
}

pub fn parse_conllu<R: BufRead>(reader: R, path: &Path) -> Result<BTreeMap<String, Vec<SentenceParse>>> {
    let mut out: BTreeMap<String, Vec<SentenceParse>> = BTreeMap::new();
    let mut doc: Option<String> = None;
    let mut heads: Vec<usize> = Vec::new();
    let mut start_line = 0;

    let mut flush = |doc: &Option<String>, heads: &mut Vec<usize>, line: usize| -> Result<()> {
        if heads.is_empty() {
            return Ok(());
        }
        let Some(id) = doc else {
            return Err(Error::malformed(path, line, "sentence without a preceding `# doc_id` comment"));
        };
        let parse = SentenceParse::new(id.clone(), std::mem::take(heads))
            .map_err(|e| Error::malformed(path, line, e.to_string()))?;
        out.entry(id.clone()).or_default().push(parse);
        Ok(())
    };

    let mut line_no = 0;
    for line in reader.lines() {
        line_no += 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            flush(&doc, &mut heads, start_line)?;
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            let value = comment
                .strip_prefix("doc_id")
                .or_else(|| comment.strip_prefix("newdoc id"))
                .and_then(|rest| rest.trim_start().strip_prefix('='));
            if let Some(v) = value {
                flush(&doc, &mut heads, start_line)?;
                let v = v.trim();
                if v.is_empty() {
                    return Err(Error::malformed(path, line_no, "empty document id"));
                }
                doc = Some(v.to_string());
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 10 {
            return Err(Error::malformed(path, line_no, format!("expected 10 tab-separated fields, found {}", fields.len())));
        }
        let id = fields[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let position: usize = id
            .parse()
            .map_err(|_| Error::malformed(path, line_no, format!("bad token id `{id}`")))?;
        if heads.is_empty() {
            start_line = line_no;
        }
        if position != heads.len() + 1 {
            return Err(Error::malformed(path, line_no, format!("token id {position} out of sequence")));
        }
        let head: usize = fields[6]
            .parse()
            .map_err(|_| Error::malformed(path, line_no, format!("bad head `{}`", fields[6])))?;
        heads.push(head);
    }
    flush(&doc, &mut heads, start_line)?;
    Ok(out)
}
