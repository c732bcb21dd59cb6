//! Binary indicator features over a five-token window.

use crate::model::Document;
use std::collections::HashMap;

/// Window offsets looked at around the current token.
pub const WINDOW: [isize; 5] = [-2, -1, 0, 1, 2];

/// Names of the indicators that fire for one token, sorted and deduplicated.
/// Every present feature contributes weight 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<String>);

impl FeatureVector {
    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.binary_search_by(|f| f.as_str().cmp(name)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn is_capitalized(token: &str) -> bool {
    token.chars().next().is_some_and(char::is_uppercase)
}

fn is_digit(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_digit())
}

fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric() && !c.is_whitespace())
}

fn ends_sentence(token: &str) -> bool {
    matches!(token, "." | "!" | "?")
}

fn prefix(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

fn suffix(s: &str, n: usize) -> String {
    let chars: Vec<char> = s.chars().collect();
    chars[chars.len().saturating_sub(n)..].iter().collect()
}

/// Features of `tokens[idx]`. Panics when `idx` is out of range.
pub fn token_features<S: AsRef<str>>(tokens: &[S], idx: usize) -> FeatureVector {
    assert!(idx < tokens.len(), "token index {idx} out of range");
    let mut out = vec!["bias".to_string()];
    for off in WINDOW {
        let pos = idx as isize + off;
        if pos < 0 {
            out.push(format!("{off}:pad=<s>"));
            continue;
        }
        let pos = pos as usize;
        if pos >= tokens.len() {
            out.push(format!("{off}:pad=</s>"));
            continue;
        }
        let tok = tokens[pos].as_ref();
        let lower = tok.to_lowercase();
        out.push(format!("{off}:w={tok}"));
        out.push(format!("{off}:lc={lower}"));
        out.push(format!("{off}:p3={}", prefix(&lower, 3)));
        out.push(format!("{off}:s3={}", suffix(&lower, 3)));
        if is_capitalized(tok) {
            out.push(format!("{off}:cap"));
        }
        if is_digit(tok) {
            out.push(format!("{off}:digit"));
        }
        if is_punctuation(tok) {
            out.push(format!("{off}:punct"));
        }
        if pos == 0 {
            out.push(format!("{off}:first"));
        }
        if pos + 1 == tokens.len() {
            out.push(format!("{off}:last"));
        }
        if pos > 0 && ends_sentence(tokens[pos - 1].as_ref()) {
            out.push(format!("{off}:sent"));
        }
    }
    out.sort();
    out.dedup();
    FeatureVector(out)
}

pub fn extract_features(doc: &Document, idx: usize) -> FeatureVector {
    token_features(&doc.tokens, idx)
}

/// Maps feature names to dense ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Vocabulary {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    /// Ids follow the sorted order of `names`.
    pub fn from_names(mut names: Vec<String>) -> Self {
        names.sort();
        names.dedup();
        let ids = names.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        Vocabulary { names, ids }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Ids of the known features of every token; unknown features are
    /// dropped.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Vec<u32>> {
        (0..tokens.len())
            .map(|i| {
                token_features(tokens, i)
                    .names()
                    .iter()
                    .filter_map(|f| self.ids.get(f).copied())
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_token_is_padded_on_the_left() {
        let f = token_features(&["In", "the", "end"], 0);
        assert!(f.contains("-1:pad=<s>"));
        assert!(f.contains("-2:pad=<s>"));
        assert!(!f.contains("1:pad=</s>"));
        assert!(f.contains("0:first"));
        assert!(f.contains("0:cap"));
    }

    #[test]
    fn capitalization_and_digits() {
        let f = token_features(&["ADHD", "42", ","], 0);
        assert!(f.contains("0:cap"));
        assert!(!f.contains("0:digit"));
        assert!(f.contains("1:digit"));
        assert!(f.contains("2:punct"));
        assert!(f.contains("0:p3=adh"));
        assert!(f.contains("0:s3=dhd"));
    }

    #[test]
    fn sentence_initial_after_full_stop() {
        let f = token_features(&["fine", ".", "Then", "we"], 2);
        assert!(f.contains("0:sent"));
        assert!(f.contains("1:last"));
        assert!(!f.contains("-1:sent"));
    }

    #[test]
    fn short_tokens_keep_whole_affixes() {
        let f = token_features(&["é"], 0);
        assert!(f.contains("0:p3=é"));
        assert!(f.contains("0:s3=é"));
    }

    #[test]
    fn vocabulary_drops_unknown_features() {
        let v = Vocabulary::from_names(token_features(&["a", "b"], 0).names().to_vec());
        let known = v.encode(&["a", "b"]);
        let other = v.encode(&["x", "y"]);
        assert_eq!(known[0].len(), token_features(&["a", "b"], 0).len());
        assert!(other[0].len() < known[0].len());
    }
}
