//! Tokenization, diacritic stripping and case-preserving pattern application.
//!
//! Word keys are formed by NFC-normalizing, lowercasing and then folding every
//! character through a [`DiacriticMap`]. Token surfaces are kept exactly as
//! they appear in the source so that restored text can be stitched back
//! together byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Deref, Range};

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

const SPANISH_MAP: &str = include_str!("../data/es.tsv");
const FRENCH_MAP: &str = include_str!("../data/fr.tsv");

/// Sentinel key standing in for every number token.
pub const NUMBER_KEY: &str = "<NUM>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Language {
    Spanish,
    French,
    /// Union of the Spanish and French maps.
    All,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::Spanish => "es",
            Language::French => "fr",
            Language::All => "all",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "es" => Some(Language::Spanish),
            "fr" => Some(Language::French),
            "all" => Some(Language::All),
            _ => None,
        }
    }
}

/// Character folding table from an accented character to its plain spelling.
///
/// Entries are stored lowercase; uppercase input folds through lowercasing
/// first, so `Á` and `á` both become `a`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiacriticMap {
    map: BTreeMap<char, String>,
}

impl DiacriticMap {
    pub fn for_language(lang: Language) -> Self {
        let parse = |src, name| Self::parse(src, name).expect("bundled diacritic map is valid");
        match lang {
            Language::Spanish => parse(SPANISH_MAP, "es.tsv"),
            Language::French => parse(FRENCH_MAP, "fr.tsv"),
            Language::All => {
                let mut map = parse(SPANISH_MAP, "es.tsv");
                map.extend(&parse(FRENCH_MAP, "fr.tsv"));
                map
            }
        }
    }

    /// Parses `accented<TAB>plain` lines. Blank lines and `#` comments are skipped.
    pub fn parse(src: &str, source_name: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (accented, plain) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(source_name, idx + 1, "expected `accented<TAB>plain`"))?;
            let accented: String = accented.nfc().flat_map(char::to_lowercase).collect();
            let mut chars = accented.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::format(
                    source_name,
                    idx + 1,
                    format!("`{accented}` is not a single character"),
                ));
            };
            let plain: String = plain.nfc().flat_map(char::to_lowercase).collect();
            if plain.is_empty() {
                return Err(Error::format(source_name, idx + 1, "empty replacement"));
            }
            map.insert(c, plain);
        }
        let out = DiacriticMap { map };
        out.check_idempotent(source_name)?;
        Ok(out)
    }

    fn check_idempotent(&self, source_name: &str) -> Result<()> {
        for (c, plain) in &self.map {
            if plain.chars().any(|p| self.map.contains_key(&p)) {
                return Err(Error::format(
                    source_name,
                    0,
                    format!("replacement `{plain}` for `{c}` contains a mapped character"),
                ));
            }
        }
        Ok(())
    }

    pub fn extend(&mut self, other: &DiacriticMap) {
        for (c, plain) in &other.map {
            self.map.insert(*c, plain.clone());
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (char, &str)> {
        self.map.iter().map(|(c, p)| (*c, p.as_str()))
    }

    pub fn contains(&self, c: char) -> bool {
        self.map.contains_key(&c)
    }

    fn fold_lower(&self, c: char, out: &mut String) {
        match self.map.get(&c) {
            Some(plain) => out.push_str(plain),
            None => out.push(c),
        }
    }

    /// Lowercase, diacritic-free key for `word`.
    pub fn strip(&self, word: &str) -> WordKey {
        let mut out = String::with_capacity(word.len());
        for c in word.nfc() {
            for lc in c.to_lowercase() {
                self.fold_lower(lc, &mut out);
            }
        }
        WordKey(out)
    }

    /// Removes diacritics but keeps the original casing, the way accents get
    /// lost in transmission. Used to build test input from a reference text.
    pub fn remove_accents(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut buf = String::new();
        for c in text.nfc() {
            let mut lower = c.to_lowercase();
            let lc = lower.next().unwrap_or(c);
            if lower.next().is_none() {
                if let Some(plain) = self.map.get(&lc) {
                    if c.is_uppercase() {
                        buf.clear();
                        buf.extend(plain.chars().flat_map(char::to_uppercase));
                        out.push_str(&buf);
                    } else {
                        out.push_str(plain);
                    }
                    continue;
                }
            }
            out.push(c);
        }
        out
    }

    /// True if any character of `word` is folded by the map.
    pub fn has_diacritics(&self, word: &str) -> bool {
        word.nfc()
            .flat_map(char::to_lowercase)
            .any(|c| self.map.contains_key(&c))
    }

    /// Writes `pattern` with the per-position casing of `original`.
    ///
    /// Both inputs must strip to the same key. Each pattern character takes the
    /// case of the original characters it folds onto, so `COTE` + `côté`
    /// gives `CÔTÉ` and `Cote` + `côté` gives `Côté`.
    pub fn apply_pattern(&self, original: &str, pattern: &str) -> Result<String> {
        let mismatch = || Error::KeyMismatch {
            word: original.to_string(),
            pattern: pattern.to_string(),
        };

        // One flag per folded character of the original.
        let mut upper = Vec::with_capacity(original.len());
        let mut scratch = String::new();
        for c in original.nfc() {
            scratch.clear();
            for lc in c.to_lowercase() {
                self.fold_lower(lc, &mut scratch);
            }
            let is_upper = c.is_uppercase();
            upper.extend(scratch.chars().map(|_| is_upper));
        }

        let mut out = String::with_capacity(pattern.len() + 4);
        let mut pos = 0;
        for pc in pattern.nfc() {
            scratch.clear();
            for lc in pc.to_lowercase() {
                self.fold_lower(lc, &mut scratch);
            }
            let width = scratch.chars().count();
            let flags = upper.get(pos..pos + width).ok_or_else(mismatch)?;
            pos += width;
            if flags.iter().any(|u| *u) {
                out.extend(pc.to_uppercase());
            } else {
                out.extend(pc.to_lowercase());
            }
        }
        if pos != upper.len() || self.strip(original) != self.strip(pattern) {
            return Err(mismatch());
        }
        Ok(out)
    }
}

/// NFC-normalized lowercase form, accents kept.
pub fn lowercase_nfc(word: &str) -> String {
    word.nfc().flat_map(char::to_lowercase).collect()
}

/// Lowercase, diacritic-free form of a word. Only produced by
/// [`DiacriticMap::strip`] or re-read from files written by this crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WordKey(String);

impl WordKey {
    pub fn number() -> Self {
        WordKey(NUMBER_KEY.to_string())
    }

    /// Wraps a string that is already known to be a stripped key.
    pub fn from_stripped(s: impl Into<String>) -> Self {
        WordKey(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Deref for WordKey {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for WordKey {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token<'a> {
    pub surface: &'a str,
    pub span: Range<usize>,
    pub kind: TokenKind,
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02bc}')
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || unicode_combining(c)
}

// Combining marks stay attached to the letter they follow (NFD input).
fn unicode_combining(c: char) -> bool {
    matches!(c, '\u{0300}'..='\u{036f}')
}

fn punct_kind(c: char) -> TokenKind {
    if c.is_ascii_punctuation()
        || matches!(
            c,
            '¿' | '¡' | '«' | '»' | '“' | '”' | '‘' | '’' | '…' | '–' | '—' | '‹' | '›' | '·'
        )
    {
        TokenKind::Punctuation
    } else {
        TokenKind::Other
    }
}

fn core_kind(s: &str) -> TokenKind {
    if s.chars().any(char::is_alphabetic) {
        TokenKind::Word
    } else if s.chars().any(|c| c.is_numeric())
        && s.chars().all(|c| c.is_numeric() || matches!(c, '.' | ',' | '\''))
    {
        TokenKind::Number
    } else {
        TokenKind::Other
    }
}

/// Splits text into word, number and punctuation tokens.
///
/// Whitespace separates chunks. Leading and trailing non-alphanumeric
/// characters of a chunk become single-character tokens. Inside a chunk an
/// apostrophe closes the current token (`l'autre` → `l'`, `autre`); hyphenated
/// compounds stay whole.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut chunk_start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(start) = chunk_start.take() {
                split_chunk(text, start, i, &mut tokens);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(start) = chunk_start {
        split_chunk(text, start, text.len(), &mut tokens);
    }
    tokens
}

/// Tokenizes raw bytes, rejecting invalid UTF-8.
pub fn tokenize_bytes(bytes: &[u8]) -> Result<Vec<Token<'_>>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::InputEncoding {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize(text))
}

fn split_chunk<'a>(text: &'a str, start: usize, end: usize, out: &mut Vec<Token<'a>>) {
    let chunk = &text[start..end];
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();

    let mut lo = 0;
    while lo < chars.len() && !is_word_char(chars[lo].1) {
        lo += 1;
    }
    let mut hi = chars.len();
    while hi > lo {
        let c = chars[hi - 1].1;
        if is_word_char(c) {
            break;
        }
        // elided article keeps its apostrophe: "l'"
        if is_apostrophe(c) && hi - 1 > lo && is_word_char(chars[hi - 2].1) {
            break;
        }
        hi -= 1;
    }

    let byte_at = |i: usize| if i < chars.len() { chars[i].0 } else { chunk.len() };
    let mut push = |from: usize, to: usize, kind: TokenKind| {
        out.push(Token {
            surface: &text[start + from..start + to],
            span: start + from..start + to,
            kind,
        });
    };

    for &(b, c) in &chars[..lo] {
        push(b, b + c.len_utf8(), punct_kind(c));
    }
    if lo < hi {
        let mut piece = byte_at(lo);
        for i in lo..hi {
            let (b, c) = chars[i];
            if is_apostrophe(c) && i + 1 < hi {
                let to = b + c.len_utf8();
                push(piece, to, core_kind(&chunk[piece..to]));
                piece = to;
            }
        }
        let to = byte_at(hi);
        push(piece, to, core_kind(&chunk[piece..to]));
    }
    for &(b, c) in &chars[hi..] {
        push(b, b + c.len_utf8(), punct_kind(c));
    }
}

/// Rebuilds the source from token surfaces and the gaps between their spans.
pub fn detokenize(source: &str, tokens: &[Token<'_>]) -> String {
    let mut out = String::with_capacity(source.len());
    let mut pos = 0;
    for t in tokens {
        out.push_str(&source[pos..t.span.start]);
        out.push_str(t.surface);
        pos = t.span.end;
    }
    out.push_str(&source[pos..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<&str> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn elision_attaches_apostrophe_left() {
        assert_eq!(surfaces("appeler l'autre cote"), ["appeler", "l'", "autre", "cote"]);
        assert_eq!(surfaces("l’Atlantique"), ["l’", "Atlantique"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t").is_empty());
    }

    #[test]
    fn trailing_punctuation_is_split() {
        let toks = tokenize("cote, ouest.");
        let got: Vec<_> = toks.iter().map(|t| (t.surface, t.kind)).collect();
        assert_eq!(
            got,
            [
                ("cote", TokenKind::Word),
                (",", TokenKind::Punctuation),
                ("ouest", TokenKind::Word),
                (".", TokenKind::Punctuation),
            ]
        );
    }

    #[test]
    fn leading_punctuation_and_numbers() {
        let toks = tokenize("¿Qué? 1991 (ver)");
        let got: Vec<_> = toks.iter().map(|t| (t.surface, t.kind)).collect();
        assert_eq!(
            got,
            [
                ("¿", TokenKind::Punctuation),
                ("Qué", TokenKind::Word),
                ("?", TokenKind::Punctuation),
                ("1991", TokenKind::Number),
                ("(", TokenKind::Punctuation),
                ("ver", TokenKind::Word),
                (")", TokenKind::Punctuation),
            ]
        );
    }

    #[test]
    fn hyphenated_compound_is_one_word() {
        assert_eq!(surfaces("peut-être."), ["peut-être", "."]);
    }

    #[test]
    fn invalid_utf8_is_rejected() {
        let err = tokenize_bytes(b"abc \xff def").unwrap_err();
        assert!(matches!(err, Error::InputEncoding { offset: 4 }));
        assert_eq!(tokenize_bytes(b"a b").unwrap().len(), 2);
    }

    #[test]
    fn strip_examples() {
        let map = DiacriticMap::for_language(Language::All);
        assert_eq!(map.strip("côté").as_str(), "cote");
        assert_eq!(map.strip("abc").as_str(), "abc");
        assert_eq!(map.strip("Secretaría").as_str(), "secretaria");
        assert_eq!(map.strip("CÔTÉ").as_str(), "cote");
        assert_eq!(map.strip("cœur").as_str(), "coeur");
        // decomposed input normalizes first
        assert_eq!(map.strip("co\u{302}te\u{301}").as_str(), "cote");
    }

    #[test]
    fn language_maps_differ() {
        let es = DiacriticMap::for_language(Language::Spanish);
        let fr = DiacriticMap::for_language(Language::French);
        assert_eq!(es.strip("año").as_str(), "ano");
        assert_eq!(fr.strip("año").as_str(), "año");
        assert_eq!(es.strip("crème").as_str(), "crème");
        assert_eq!(fr.strip("crème").as_str(), "creme");
    }

    #[test]
    fn apply_pattern_examples() {
        let map = DiacriticMap::for_language(Language::French);
        assert_eq!(map.apply_pattern("COTE", "côté").unwrap(), "CÔTÉ");
        assert_eq!(map.apply_pattern("cote", "cote").unwrap(), "cote");
        assert_eq!(map.apply_pattern("Cote", "côté").unwrap(), "Côté");
        assert_eq!(map.apply_pattern("COEUR", "cœur").unwrap(), "CŒUR");
        assert_eq!(map.apply_pattern("coeur", "cœur").unwrap(), "cœur");
        assert!(matches!(
            map.apply_pattern("cote", "coûta"),
            Err(Error::KeyMismatch { .. })
        ));
        assert!(map.apply_pattern("cotes", "côté").is_err());
    }

    #[test]
    fn remove_accents_keeps_case() {
        let map = DiacriticMap::for_language(Language::All);
        assert_eq!(map.remove_accents("Côté CÔTE, Œuvre año"), "Cote COTE, OEuvre ano");
    }

    #[test]
    fn map_file_parsing() {
        let map = DiacriticMap::parse("# comment\nÅ\ta\n\nø\to\n", "custom").unwrap();
        assert_eq!(map.strip("ÅRØ").as_str(), "aro");
        assert!(DiacriticMap::parse("ab\tc\n", "bad").is_err());
        assert!(DiacriticMap::parse("å\n", "bad").is_err());
        // a replacement that would need a second pass breaks idempotence
        assert!(DiacriticMap::parse("å\tø\nø\to\n", "bad").is_err());
    }

    proptest! {
        #[test]
        fn detokenize_round_trips(text in "[a-zA-Zàéôœñ' ,.;!?¿¡«»\\-\n\t0-9]{0,80}") {
            let toks = tokenize(&text);
            prop_assert_eq!(detokenize(&text, &toks), text.clone());
            let mut last = 0;
            for t in &toks {
                prop_assert!(!t.surface.is_empty());
                prop_assert!(t.span.start >= last);
                last = t.span.end;
            }
        }

        #[test]
        fn detokenize_round_trips_any_string(text in any::<String>()) {
            let toks = tokenize(&text);
            prop_assert_eq!(detokenize(&text, &toks), text.clone());
        }

        #[test]
        fn strip_is_idempotent_and_lowercase(word in "[a-zA-ZàâäçéèêëîïôöùûüÿœÀÉÔáíóúñÑ]{0,12}") {
            let map = DiacriticMap::for_language(Language::All);
            let key = map.strip(&word);
            prop_assert_eq!(map.strip(&key), key.clone());
            prop_assert!(key.chars().all(|c| !c.is_uppercase() && !map.contains(c)));
        }

        #[test]
        fn apply_pattern_preserves_key(
            word in "[a-zA-Zàâçéèêîôùûœ]{1,10}",
            upper in proptest::collection::vec(any::<bool>(), 10),
        ) {
            let map = DiacriticMap::for_language(Language::French);
            let pattern: String = word.to_lowercase();
            let stripped: String = map.remove_accents(&pattern);
            let original: String = stripped
                .chars()
                .zip(upper.iter().cycle())
                .map(|(c, u)| if *u { c.to_ascii_uppercase() } else { c })
                .collect();
            let out = map.apply_pattern(&original, &pattern).unwrap();
            prop_assert_eq!(map.strip(&out), map.strip(&original));
            prop_assert_eq!(out.to_lowercase(), pattern.clone());
        }
    }
}
