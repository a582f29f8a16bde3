use super::Document;
use crate::error::{Error, Result};

/// Normalized word tokens of one document, in surface order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    pub source_id: String,
}

impl TokenStream {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenStream {
            tokens,
            source_id: source_id.into(),
        }
    }

    /// Build a stream from literal tokens, mostly for fixtures.
    pub fn from_tokens<S: AsRef<str>>(source_id: impl Into<String>, tokens: &[S]) -> Self {
        TokenStream::new(source_id, tokens.iter().map(|t| t.as_ref().to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Space-joined rendering.
    pub fn render(&self) -> String {
        self.tokens.join(" ")
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Split text into lowercased word tokens.
///
/// A token is a maximal run of alphabetic characters, optionally joined by
/// single internal apostrophes (`don't`, `o'clock`). Digits, hyphens and
/// all other punctuation separate tokens and are dropped. The typographic
/// apostrophe U+2019 is normalized to `'`.
pub fn tokenize_text(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphabetic() {
            current.extend(c.to_lowercase());
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphabetic())
        {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        i += 1;
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

pub fn tokenize(doc: &Document) -> Result<TokenStream> {
    let tokens = tokenize_text(&doc.text);
    if tokens.is_empty() {
        return Err(Error::DegenerateDocument(doc.id.clone()));
    }
    Ok(TokenStream::new(doc.id.clone(), tokens))
}
