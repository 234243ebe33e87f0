//! Command segmentation.
//!
//! The tokenizer only separates words from punctuation: input is split on
//! whitespace, then punctuation characters at either edge of a chunk are
//! peeled off one character at a time. Interior punctuation stays put, so
//! `08/03/2014`, `U.S` or `pick-up` survive as single tokens.

use std::borrow::Cow;

use unicode_general_category::{get_general_category, GeneralCategory};

use crate::error::ModelError;
use crate::model::Token;

pub(crate) fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Splits `raw` into tokens.
///
/// Fails with [`ModelError::EmptyCommand`] when `raw` holds nothing but
/// whitespace.
pub fn tokenize(raw: &str) -> Result<Vec<Token>, ModelError> {
    let mut tokens = Vec::new();
    for chunk in raw.split_whitespace() {
        split_chunk(chunk, &mut tokens);
    }
    if tokens.is_empty() {
        return Err(ModelError::EmptyCommand);
    }
    Ok(tokens)
}

fn split_chunk(chunk: &str, out: &mut Vec<Token>) {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let lead = chars.iter().take_while(|(_, c)| is_punctuation(*c)).count();
    if lead == chars.len() {
        // all punctuation: one token per character
        out.extend(chars.iter().map(|(_, c)| Token::from_trusted(c.to_string())));
        return;
    }
    let trail = chars.iter().rev().take_while(|(_, c)| is_punctuation(*c)).count();

    for (_, c) in &chars[..lead] {
        out.push(Token::from_trusted(c.to_string()));
    }
    let start = chars[lead].0;
    let end = chars.get(chars.len() - trail).map(|(i, _)| *i).unwrap_or(chunk.len());
    out.push(Token::from_trusted(chunk[start..end].to_string()));
    for (_, c) in &chars[chars.len() - trail..] {
        out.push(Token::from_trusted(c.to_string()));
    }
}

/// Joins tokens with single spaces.
pub fn detokenize<T: AsRef<str>>(tokens: &[T]) -> Result<String, ModelError> {
    if tokens.is_empty() {
        return Err(ModelError::EmptyTokenList);
    }
    Ok(tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" "))
}

/// Token comparison policy shared by the learner and the matcher.
///
/// Comparison is exact by default; `ignore_case` folds both sides to
/// lowercase before comparing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    pub ignore_case: bool,
}

impl MatchOptions {
    pub const EXACT: MatchOptions = MatchOptions { ignore_case: false };

    pub fn ignoring_case() -> Self {
        MatchOptions { ignore_case: true }
    }

    pub fn eq(&self, a: &str, b: &str) -> bool {
        if self.ignore_case {
            a == b || a.to_lowercase() == b.to_lowercase()
        } else {
            a == b
        }
    }

    /// Normalized form used as a hash key.
    pub fn key<'a>(&self, s: &'a str) -> Cow<'a, str> {
        if self.ignore_case {
            Cow::Owned(s.to_lowercase())
        } else {
            Cow::Borrowed(s)
        }
    }

    pub fn seq_eq<A: AsRef<str>, B: AsRef<str>>(&self, a: &[A], b: &[B]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.eq(x.as_ref(), y.as_ref()))
    }
}
