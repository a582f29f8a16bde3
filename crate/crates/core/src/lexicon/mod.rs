//! Word-category dictionaries and category ratio scoring.
//!
//! Patterns are literal words, prefix wildcards (`happ*`) or multiword
//! phrases whose last word may carry a wildcard. A token counts toward
//! every category with a matching pattern; a phrase occurrence counts as
//! one hit at its first token. Ratios divide hits by the unigram token
//! count, so each category ratio stays within [0, 1].

mod battery;

pub use battery::{
    compare_categorical, compare_categorical_with, correlate_continuous, correlate_continuous_with, lexical_shift_report, min_max_scale, CategoricalBattery,
    CategoricalRow, CorrelationBattery, CorrelationRow, ShiftReport, ShiftRow,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::tokenize_text;
use crate::corpus::TokenStream;
use crate::error::{Error, Result};
use crate::stats::descriptive::z_scores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconFormat {
    Dic,
    Json,
}

impl LexiconFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "dic" => Some(LexiconFormat::Dic),
            "json" => Some(LexiconFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
enum Word {
    Exact(String),
    Prefix(String),
}

impl Word {
    fn matches(&self, token: &str) -> bool {
        match self {
            Word::Exact(w) => w == token,
            Word::Prefix(p) => token.starts_with(p.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Category {
    pub name: String,
    /// Patterns as written, normalized to lowercase.
    pub patterns: Vec<String>,
}

#[derive(Debug, Clone, Default)]
struct Matcher {
    exact: HashMap<String, Vec<usize>>,
    prefix: HashMap<String, Vec<usize>>,
    prefix_lens: BTreeSet<usize>,
    phrases: Vec<(Vec<Word>, usize)>,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub name: String,
    pub categories: Vec<Category>,
    matcher: Matcher,
}

fn parse_pattern(raw: &str) -> Result<Vec<Word>> {
    let words: Vec<&str> = raw.split_whitespace().collect();
    if words.is_empty() {
        return Err(Error::invalid("empty pattern"));
    }
    let last = words.len() - 1;
    words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let w = w.to_lowercase();
            let stars = w.matches('*').count();
            if stars == 0 {
                return Ok(Word::Exact(w));
            }
            if stars > 1 || !w.ends_with('*') || i != last {
                return Err(Error::invalid(format!("pattern `{raw}`: wildcard allowed only at the end")));
            }
            let stem = w.trim_end_matches('*').to_string();
            if stem.is_empty() {
                return Err(Error::invalid(format!("pattern `{raw}`: bare wildcard")));
            }
            Ok(Word::Prefix(stem))
        })
        .collect()
}

impl Lexicon {
    /// Build from (category, patterns) in the given order.
    pub fn new(name: impl Into<String>, categories: Vec<(String, Vec<String>)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut matcher = Matcher::default();
        let mut cats = Vec::with_capacity(categories.len());
        for (ci, (cname, patterns)) in categories.into_iter().enumerate() {
            if cname.is_empty() || !seen.insert(cname.clone()) {
                return Err(Error::invalid(format!("duplicate or empty category name `{cname}`")));
            }
            let mut normalized = Vec::with_capacity(patterns.len());
            for raw in patterns {
                let words = parse_pattern(&raw)?;
                normalized.push(raw.trim().to_lowercase());
                let slot = |v: &mut Vec<usize>| {
                    if !v.contains(&ci) {
                        v.push(ci);
                    }
                };
                if words.len() > 1 {
                    matcher.phrases.push((words, ci));
                    continue;
                }
                match words.into_iter().next().unwrap() {
                    Word::Exact(w) => slot(matcher.exact.entry(w).or_default()),
                    Word::Prefix(p) => {
                        matcher.prefix_lens.insert(p.len());
                        slot(matcher.prefix.entry(p).or_default());
                    }
                }
            }
            cats.push(Category {
                name: cname,
                patterns: normalized,
            });
        }
        matcher.phrases.dedup();
        Ok(Lexicon {
            name: name.into(),
            categories: cats,
            matcher,
        })
    }

    pub fn category_names(&self) -> Vec<String> {
        self.categories.iter().map(|c| c.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Categories hit by a single token.
    fn token_hits(&self, token: &str, out: &mut [bool]) {
        if let Some(cs) = self.matcher.exact.get(token) {
            cs.iter().for_each(|&c| out[c] = true);
        }
        for &len in &self.matcher.prefix_lens {
            if len > token.len() {
                break;
            }
            if !token.is_char_boundary(len) {
                continue;
            }
            if let Some(cs) = self.matcher.prefix.get(&token[..len]) {
                cs.iter().for_each(|&c| out[c] = true);
            }
        }
    }

    /// Per-category hit counts over a token sequence.
    pub fn hit_counts(&self, tokens: &[String]) -> Vec<usize> {
        let k = self.categories.len();
        let mut counts = vec![0usize; k];
        let mut hit = vec![false; k];
        for i in 0..tokens.len() {
            hit.iter_mut().for_each(|h| *h = false);
            self.token_hits(&tokens[i], &mut hit);
            for (words, c) in &self.matcher.phrases {
                if !hit[*c] && i + words.len() <= tokens.len() && words.iter().zip(&tokens[i..]).all(|(w, t)| w.matches(t)) {
                    hit[*c] = true;
                }
            }
            for c in 0..k {
                counts[c] += usize::from(hit[c]);
            }
        }
        counts
    }
}

#[derive(Deserialize)]
struct JsonLexicon {
    #[serde(default)]
    name: Option<String>,
    categories: BTreeMap<String, Vec<String>>,
}

pub fn load_lexicon(path: impl AsRef<Path>, format: LexiconFormat) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("lexicon").to_string();
    match format {
        LexiconFormat::Dic => parse_dic(&text, &stem, path),
        LexiconFormat::Json => parse_json(&text, &stem, path),
    }
}

pub fn parse_json(text: &str, default_name: &str, path: &Path) -> Result<Lexicon> {
    let j: JsonLexicon = serde_json::from_str(text).map_err(|e| Error::malformed(path, e.line(), e.to_string()))?;
    Lexicon::new(j.name.unwrap_or_else(|| default_name.to_string()), j.categories.into_iter().collect())
}

/// Parse the `%`-delimited dictionary layout: a header mapping numeric ids
/// to category names, then one pattern per line followed by its ids.
pub fn parse_dic(text: &str, name: &str, path: &Path) -> Result<Lexicon> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "%" => {}
        Some((i, _)) => return Err(Error::malformed(path, i + 1, "expected `%` opening the header")),
        None => return Err(Error::malformed(path, 0, "empty dictionary")),
    }
    let mut ids: BTreeMap<u32, usize> = BTreeMap::new();
    let mut cats: Vec<(String, Vec<String>)> = Vec::new();
    let mut closed = false;
    for (i, line) in lines.by_ref() {
        let line = line.trim();
        if line == "%" {
            closed = true;
            break;
        }
        let mut parts = line.split_whitespace();
        let (Some(id), Some(cname), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::malformed(path, i + 1, format!("header line `{line}` is not `id name`")));
        };
        let id: u32 = id
            .parse()
            .map_err(|_| Error::malformed(path, i + 1, format!("category id `{id}` is not a number")))?;
        if ids.insert(id, cats.len()).is_some() {
            return Err(Error::malformed(path, i + 1, format!("category id {id} declared twice")));
        }
        cats.push((cname.to_string(), Vec::new()));
    }
    if !closed {
        return Err(Error::malformed(path, 0, "header is not closed by `%`"));
    }
    for (i, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let n_ids = fields.iter().rev().take_while(|f| f.parse::<u32>().is_ok()).count();
        if n_ids == 0 || n_ids == fields.len() {
            return Err(Error::malformed(path, i + 1, format!("line `{}` needs a pattern and category ids", line.trim())));
        }
        let pattern = fields[..fields.len() - n_ids].join(" ");
        parse_pattern(&pattern).map_err(|e| Error::malformed(path, i + 1, e.to_string()))?;
        for f in &fields[fields.len() - n_ids..] {
            let id: u32 = f.parse().expect("numeric");
            let &c = ids
                .get(&id)
                .ok_or_else(|| Error::malformed(path, i + 1, format!("`{pattern}` references undeclared category {id}")))?;
            cats[c].1.push(pattern.clone());
        }
    }
    Lexicon::new(name, cats)
}

/// The small bundled demonstration dictionary (affect, pronoun, social and
/// cognitive-process categories).
pub fn demo_lexicon() -> Lexicon {
    parse_dic(include_str!("../../data/demo.dic"), "demo", Path::new("demo.dic")).expect("bundled lexicon parses")
}

/// Ratios for one document, aligned with the lexicon's category order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryScores {
    pub document_id: String,
    pub ratios: Vec<f64>,
}

pub fn category_ratios(tokens: &TokenStream, lex: &Lexicon) -> Result<CategoryScores> {
    if tokens.is_empty() {
        return Err(Error::DegenerateDocument(tokens.source_id.clone()));
    }
    let n = tokens.len() as f64;
    Ok(CategoryScores {
        document_id: tokens.source_id.clone(),
        ratios: lex.hit_counts(&tokens.tokens).into_iter().map(|c| c as f64 / n).collect(),
    })
}

/// Convenience for raw text.
pub fn text_ratios(id: &str, text: &str, lex: &Lexicon) -> Result<CategoryScores> {
    category_ratios(&TokenStream::new(id, tokenize_text(text)), lex)
}

/// Category ratios for a whole corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable {
    pub categories: Vec<String>,
    pub rows: Vec<CategoryScores>,
}

impl ScoreTable {
    pub fn build(streams: &[TokenStream], lex: &Lexicon) -> Result<Self> {
        use rayon::prelude::*;
        let rows = streams.par_iter().map(|t| category_ratios(t, lex)).collect::<Result<_>>()?;
        Ok(ScoreTable {
            categories: lex.category_names(),
            rows,
        })
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratios[c]).collect()
    }

    /// z-scored column, or `None` when the category is constant.
    pub fn z_column(&self, c: usize) -> Option<Vec<f64>> {
        z_scores(&self.column(c))
    }

    pub fn index_of(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(words: &[&str]) -> TokenStream {
        TokenStream::from_tokens("d", words)
    }

    #[test]
    fn dic_format() {
        let lex = parse_dic("%\n1\tposemo\n%\nhappy\t1\nhapp*\t1\n", "x", Path::new("x.dic")).unwrap();
        assert_eq!(lex.categories.len(), 1);
        assert_eq!(lex.categories[0].patterns.len(), 2);
        let e = parse_dic("%\n1 posemo\n%\nsad 9\n", "x", Path::new("x.dic")).unwrap_err();
        assert!(e.to_string().contains("9"));
        assert!(parse_dic("%\n1 a\n%\nh*ppy 1\n", "x", Path::new("x.dic")).is_err());
        assert!(parse_dic("1 a\n%\n", "x", Path::new("x.dic")).is_err());
        assert!(parse_dic("%\n1 a\nhappy 1\n", "x", Path::new("x.dic")).is_err());
    }

    #[test]
    fn json_format() {
        let lex = parse_json(r#"{"categories": {"we": ["we", "us", "our"]}}"#, "x", Path::new("x.json")).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.categories[0].patterns.len(), 3);
    }

    #[test]
    fn ratios() {
        let lex = Lexicon::new(
            "t",
            vec![
                ("posemo".into(), vec!["happy".into()]),
                ("wild".into(), vec!["happ*".into()]),
                ("none".into(), vec!["zebra".into()]),
                ("greet".into(), vec!["good morning".into()]),
            ],
        )
        .unwrap();
        let s = category_ratios(&ts(&["happy", "sad", "happy"]), &lex).unwrap();
        assert!((s.ratios[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.ratios[2], 0.0);
        let w = category_ratios(&ts(&["happiness", "happy"]), &lex).unwrap();
        assert_eq!(w.ratios[1], 1.0);
        let p = category_ratios(&ts(&["good", "morning", "all"]), &lex).unwrap();
        assert!((p.ratios[3] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_cover_sums_to_one() {
        let lex = Lexicon::new("t", vec![("a".into(), vec!["x".into()]), ("b".into(), vec!["y".into(), "z".into()])]).unwrap();
        let s = category_ratios(&ts(&["x", "y", "z", "x", "z"]), &lex).unwrap();
        assert!((s.ratios.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn demo_loads() {
        let lex = demo_lexicon();
        assert_eq!(lex.len(), 6);
        let s = text_ratios("d", "Good morning, we love our friends.", &lex).unwrap();
        let social = lex.category_names().iter().position(|n| n == "social").unwrap();
        assert!(s.ratios[social] > 0.0);
    }
}
