//! The whitespace+punctuation tokenizer used for every token count.
//!
//! A token is either a maximal run of alphanumeric characters or a single
//! non-whitespace, non-alphanumeric character. `"Women's slim-fit"` is
//! therefore six tokens: `Women ' s slim - fit`.

use alloc::string::String;
use alloc::vec::Vec;

/// Iterator over the tokens of `text`.
pub fn tokens(text: &str) -> impl Iterator<Item = &str> + '_ {
    Tokens { rest: text }
}

struct Tokens<'a> {
    rest: &'a str,
}

impl<'a> Iterator for Tokens<'a> {
    type Item = &'a str;

    fn next(&mut self) -> Option<&'a str> {
        let trimmed = self.rest.trim_start();
        let mut chars = trimmed.char_indices();
        let (_, first) = chars.next()?;
        let end = if first.is_alphanumeric() {
            trimmed
                .char_indices()
                .find(|(_, c)| !c.is_alphanumeric())
                .map(|(i, _)| i)
                .unwrap_or(trimmed.len())
        } else {
            first.len_utf8()
        };
        let (tok, rest) = trimmed.split_at(end);
        self.rest = rest;
        Some(tok)
    }
}

pub fn count_tokens(text: &str) -> usize {
    tokens(text).count()
}

/// Lowercased alphanumeric words, used for lexical matching and similarity.
pub fn words(text: &str) -> Vec<String> {
    tokens(text)
        .filter(|t| t.chars().next().is_some_and(char::is_alphanumeric))
        .map(|t| t.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn splits_words_and_punctuation() {
        let toks: Vec<&str> = tokens("Women's slim-fit, 400g × 3").collect();
        assert_eq!(
            toks,
            vec!["Women", "'", "s", "slim", "-", "fit", ",", "400g", "×", "3"]
        );
    }

    #[test]
    fn empty_and_blank() {
        assert_eq!(count_tokens(""), 0);
        assert_eq!(count_tokens("   \n\t "), 0);
    }

    #[test]
    fn mub_line_count() {
        // [ E - commerce ] [ 2026 - 01 - 28 ] [ Click ] [ 5 ] | Wet Wipes , Milk Powder
        let line = "[E-commerce] [2026-01-28] [Click] [5] | Wet Wipes, Milk Powder";
        assert_eq!(count_tokens(line), 5 + 7 + 3 + 3 + 1 + 5);
    }

    #[test]
    fn words_lowercases_and_drops_punct() {
        assert_eq!(words("Hello, World-2"), vec!["hello", "world", "2"]);
    }
}
