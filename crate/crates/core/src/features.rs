//! Collocational evidence around an ambiguous word.
//!
//! Every feature is a plain value: two features are the same evidence iff
//! they compare equal. Features never look at the target word itself, only
//! at its stripped context.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::text::{DiacriticMap, WordKey};

/// Stripped context of one occurrence. `left` is in text order (its last
/// element sits at offset -1), `right` starts at offset +1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    pub left: Vec<WordKey>,
    pub right: Vec<WordKey>,
}

impl Context {
    pub fn new(left: Vec<WordKey>, right: Vec<WordKey>) -> Self {
        Context { left, right }
    }

    /// Word at a nonzero offset from the target.
    pub fn at(&self, offset: i8) -> Option<&WordKey> {
        if offset < 0 {
            let back = (-offset) as usize;
            self.left.len().checked_sub(back).map(|i| &self.left[i])
        } else if offset > 0 {
            self.right.get(offset as usize - 1)
        } else {
            None
        }
    }

    /// Words within ±k of the target.
    pub fn window(&self, k: usize) -> impl Iterator<Item = &WordKey> {
        let left = &self.left[self.left.len().saturating_sub(k)..];
        let right = &self.right[..self.right.len().min(k)];
        left.iter().chain(right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairSpan {
    /// offsets -2, -1
    Left,
    /// offsets -1, +1
    Around,
    /// offsets +1, +2
    Right,
}

impl PairSpan {
    pub const ALL: [PairSpan; 3] = [PairSpan::Left, PairSpan::Around, PairSpan::Right];

    pub fn offsets(self) -> (i8, i8) {
        match self {
            PairSpan::Left => (-2, -1),
            PairSpan::Around => (-1, 1),
            PairSpan::Right => (1, 2),
        }
    }

    pub fn from_offsets(a: i8, b: i8) -> Option<Self> {
        PairSpan::ALL.into_iter().find(|s| s.offsets() == (a, b))
    }
}

/// One slot of a tag pair: the word itself or its tag.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Word(String),
    Tag(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Word(w) => write!(f, "w:{w}"),
            Atom::Tag(t) => write!(f, "t:{t}"),
        }
    }
}

impl Atom {
    pub fn parse(s: &str) -> Option<Self> {
        if let Some(w) = s.strip_prefix("w:") {
            Some(Atom::Word(w.to_string()))
        } else {
            s.strip_prefix("t:").map(|t| Atom::Tag(t.to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    WordAt { offset: i8, word: String },
    Pair { span: PairSpan, first: String, second: String },
    Window(String),
    ClassAt { offset: i8, class: String },
    ClassWindow(String),
    TagAt { offset: i8, tag: String },
    /// A pair where at least one slot is a tag.
    TagPair { span: PairSpan, first: Atom, second: Atom },
    LemmaWindow(String),
    SuffixAt { offset: i8, suffix: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    WordAt,
    Pair,
    Window,
    ClassAt,
    ClassWindow,
    TagAt,
    TagPair,
    LemmaWindow,
    SuffixAt,
}

impl Feature {
    pub fn kind(&self) -> FeatureKind {
        match self {
            Feature::WordAt { .. } => FeatureKind::WordAt,
            Feature::Pair { .. } => FeatureKind::Pair,
            Feature::Window(_) => FeatureKind::Window,
            Feature::ClassAt { .. } => FeatureKind::ClassAt,
            Feature::ClassWindow(_) => FeatureKind::ClassWindow,
            Feature::TagAt { .. } => FeatureKind::TagAt,
            Feature::TagPair { .. } => FeatureKind::TagPair,
            Feature::LemmaWindow(_) => FeatureKind::LemmaWindow,
            Feature::SuffixAt { .. } => FeatureKind::SuffixAt,
        }
    }

    /// Window-type evidence is noisier and gets a higher minimum count.
    pub fn is_windowed(&self) -> bool {
        matches!(
            self,
            Feature::Window(_) | Feature::ClassWindow(_) | Feature::LemmaWindow(_)
        )
    }

    pub fn word_at(offset: i8, word: &str) -> Self {
        Feature::WordAt {
            offset,
            word: word.to_string(),
        }
    }

    pub fn pair(span: PairSpan, first: &str, second: &str) -> Self {
        Feature::Pair {
            span,
            first: first.to_string(),
            second: second.to_string(),
        }
    }

    pub fn window(word: &str) -> Self {
        Feature::Window(word.to_string())
    }
}

fn fmt_offset(o: i8) -> String {
    if o > 0 {
        format!("+{o}")
    } else {
        o.to_string()
    }
}

impl fmt::Display for Feature {
    /// Human-readable evidence, in the style `la _`, `_ du gouvernement`,
    /// `domingo (within ±k)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = |a: &Atom| match a {
            Atom::Word(w) => w.clone(),
            Atom::Tag(t) => t.clone(),
        };
        let pair = |f: &mut fmt::Formatter<'_>, span: PairSpan, a: String, b: String| match span {
            PairSpan::Left => write!(f, "{a} {b} _"),
            PairSpan::Around => write!(f, "{a} _ {b}"),
            PairSpan::Right => write!(f, "_ {a} {b}"),
        };
        let at = |f: &mut fmt::Formatter<'_>, o: i8, v: &str| {
            if o < 0 {
                write!(f, "{v} _")
            } else {
                write!(f, "_ {v}")
            }
        };
        match self {
            Feature::WordAt { offset, word } => at(f, *offset, word),
            Feature::Pair { span, first, second } => pair(f, *span, first.clone(), second.clone()),
            Feature::Window(w) => write!(f, "{w} (within ±k words)"),
            Feature::ClassAt { offset, class } => at(f, *offset, class),
            Feature::ClassWindow(c) => write!(f, "{c} (within ±k words)"),
            Feature::TagAt { offset, tag } => at(f, *offset, tag),
            Feature::TagPair { span, first, second } => pair(f, *span, atom(first), atom(second)),
            Feature::LemmaWindow(l) => write!(f, "lemma {l} (within ±k words)"),
            Feature::SuffixAt { offset, suffix } => at(f, *offset, &format!("-{suffix}")),
        }
    }
}

/// Which feature families to emit and how wide the window is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureConfig {
    pub window: usize,
    pub word_at: bool,
    pub pairs: bool,
    pub window_words: bool,
    pub classes: bool,
    pub tags: bool,
    pub lemmas: bool,
    /// Suffix lengths for `SuffixAt`; empty disables suffix features.
    pub suffix_lengths: Vec<usize>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window: 20,
            word_at: true,
            pairs: true,
            window_words: true,
            classes: true,
            tags: true,
            lemmas: true,
            suffix_lengths: Vec::new(),
        }
    }
}

impl FeatureConfig {
    pub fn with_window(&self, window: usize) -> Self {
        FeatureConfig {
            window,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Config("window size must be at least 1".into()));
        }
        if !(self.word_at
            || self.pairs
            || self.window_words
            || self.classes
            || self.tags
            || self.lemmas
            || !self.suffix_lengths.is_empty())
        {
            return Err(Error::Config("no feature kind enabled".into()));
        }
        if self.suffix_lengths.contains(&0) {
            return Err(Error::Config("suffix length must be positive".into()));
        }
        Ok(())
    }
}

/// Named word classes; a word may belong to any number of them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordClassSet {
    classes: BTreeMap<String, BTreeSet<WordKey>>,
    by_word: HashMap<WordKey, Vec<String>>,
}

impl WordClassSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, class: &str, member: WordKey) {
        if self
            .classes
            .entry(class.to_string())
            .or_default()
            .insert(member.clone())
        {
            let list = self.by_word.entry(member).or_default();
            list.push(class.to_string());
            list.sort();
        }
    }

    /// `CLASSNAME<TAB>member1 member2 ...` per line; members are stripped to keys.
    pub fn parse(src: &str, source_name: &str, map: &DiacriticMap) -> Result<Self> {
        let mut set = Self::new();
        for (line_no, name, rest) in tab_lines(src, source_name)? {
            if name.chars().any(char::is_whitespace) {
                return Err(Error::format(source_name, line_no, "class name contains whitespace"));
            }
            for m in rest.split_whitespace() {
                set.add(name, map.strip(m));
            }
        }
        Ok(set)
    }

    pub fn classes_of(&self, word: &str) -> &[String] {
        self.by_word.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, class: &str, word: &str) -> bool {
        self.classes.get(class).is_some_and(|m| m.contains(word))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<WordKey>)> {
        self.classes.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn to_lines(&self) -> Vec<String> {
        self.classes
            .iter()
            .map(|(name, members)| {
                let m: Vec<&str> = members.iter().map(|k| k.as_str()).collect();
                format!("{name}\t{}", m.join(" "))
            })
            .collect()
    }
}

/// All classes containing `word`; empty if none.
pub fn class_lookup<'a>(word: &str, classes: &'a WordClassSet) -> &'a [String] {
    classes.classes_of(word)
}

/// Coarse part-of-speech possibilities per word, from a dictionary rather
/// than a tagger. Multiply-listed words get one union tag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TagLexicon {
    tags: BTreeMap<WordKey, BTreeSet<String>>,
    union: HashMap<WordKey, String>,
}

impl TagLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: WordKey, tag: &str) {
        let set = self.tags.entry(word.clone()).or_default();
        set.insert(tag.to_string());
        let joined = set.iter().map(String::as_str).collect::<Vec<_>>().join("-");
        self.union.insert(word, joined);
    }

    /// `word<TAB>TAG1,TAG2` per line.
    pub fn parse(src: &str, source_name: &str, map: &DiacriticMap) -> Result<Self> {
        let mut lex = Self::new();
        for (line_no, word, rest) in tab_lines(src, source_name)? {
            let key = map.strip(word);
            let mut any = false;
            for tag in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                if tag.chars().any(char::is_whitespace) {
                    return Err(Error::format(source_name, line_no, "tag contains whitespace"));
                }
                lex.insert(key.clone(), tag);
                any = true;
            }
            if !any {
                return Err(Error::format(source_name, line_no, "no tags listed"));
            }
        }
        Ok(lex)
    }

    pub fn union_tag(&self, word: &str) -> Option<&str> {
        self.union.get(word).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn to_lines(&self) -> Vec<String> {
        self.tags
            .iter()
            .map(|(w, t)| {
                let t: Vec<&str> = t.iter().map(String::as_str).collect();
                format!("{w}\t{}", t.join(","))
            })
            .collect()
    }
}

/// Single tag if unambiguous, sorted hyphen-joined union if several, `None`
/// for unlisted words.
pub fn union_tag<'a>(word: &str, tags: &'a TagLexicon) -> Option<&'a str> {
    tags.union_tag(word)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaLexicon {
    lemmas: BTreeMap<WordKey, String>,
}

impl LemmaLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: WordKey, lemma: &str) {
        self.lemmas.insert(word, lemma.to_string());
    }

    /// `word<TAB>lemma` per line; both sides are stripped to keys.
    pub fn parse(src: &str, source_name: &str, map: &DiacriticMap) -> Result<Self> {
        let mut lex = Self::new();
        for (line_no, word, rest) in tab_lines(src, source_name)? {
            let lemma = rest.trim();
            if lemma.is_empty() || lemma.chars().any(char::is_whitespace) {
                return Err(Error::format(source_name, line_no, "expected a single lemma"));
            }
            lex.insert(map.strip(word), map.strip(lemma).as_str());
        }
        Ok(lex)
    }

    pub fn lemma<'a>(&'a self, word: &'a str) -> &'a str {
        self.lemmas.get(word).map(String::as_str).unwrap_or(word)
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    pub fn to_lines(&self) -> Vec<String> {
        self.lemmas.iter().map(|(w, l)| format!("{w}\t{l}")).collect()
    }
}

fn tab_lines<'a>(src: &'a str, source_name: &str) -> Result<Vec<(usize, &'a str, &'a str)>> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (head, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(source_name, idx + 1, "missing TAB separator"))?;
        let head = head.trim();
        if head.is_empty() {
            return Err(Error::format(source_name, idx + 1, "empty first column"));
        }
        out.push((idx + 1, head, rest));
    }
    Ok(out)
}

/// External lexical resources available to feature extraction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicons {
    pub classes: WordClassSet,
    pub tags: Option<TagLexicon>,
    pub lemmas: Option<LemmaLexicon>,
}

fn suffix_of(word: &str, len: usize) -> Option<String> {
    let n = word.chars().count();
    (n > len).then(|| word.chars().skip(n - len).collect())
}

/// Emits the deduplicated, sorted feature set for a context.
pub fn extract_features(ctx: &Context, cfg: &FeatureConfig, lex: &Lexicons) -> Vec<Feature> {
    let mut out = Vec::with_capacity(2 * cfg.window + 16);
    let tags = lex.tags.as_ref().filter(|_| cfg.tags);
    let lemmas = lex.lemmas.as_ref().filter(|_| cfg.lemmas);

    for offset in [-1i8, 1] {
        let Some(w) = ctx.at(offset) else { continue };
        if cfg.word_at {
            out.push(Feature::word_at(offset, w));
        }
        if cfg.classes {
            for c in lex.classes.classes_of(w) {
                out.push(Feature::ClassAt {
                    offset,
                    class: c.clone(),
                });
            }
        }
        if let Some(t) = tags.and_then(|t| t.union_tag(w)) {
            out.push(Feature::TagAt {
                offset,
                tag: t.to_string(),
            });
        }
        for &len in &cfg.suffix_lengths {
            if let Some(suffix) = suffix_of(w, len) {
                out.push(Feature::SuffixAt { offset, suffix });
            }
        }
    }

    if cfg.pairs || tags.is_some() {
        for span in PairSpan::ALL {
            let (a, b) = span.offsets();
            let (Some(wa), Some(wb)) = (ctx.at(a), ctx.at(b)) else {
                continue;
            };
            if cfg.pairs {
                out.push(Feature::pair(span, wa, wb));
            }
            if let Some(tags) = tags {
                let ta = tags.union_tag(wa);
                let tb = tags.union_tag(wb);
                let word = |w: &WordKey| Atom::Word(w.to_string());
                let tag = |t: &str| Atom::Tag(t.to_string());
                let mut push = |first, second| {
                    out.push(Feature::TagPair {
                        span,
                        first,
                        second,
                    })
                };
                if let Some(ta) = ta {
                    push(tag(ta), word(wb));
                }
                if let Some(tb) = tb {
                    push(word(wa), tag(tb));
                }
                if let (Some(ta), Some(tb)) = (ta, tb) {
                    push(tag(ta), tag(tb));
                }
            }
        }
    }

    for w in ctx.window(cfg.window) {
        if cfg.window_words {
            out.push(Feature::Window(w.to_string()));
        }
        if cfg.classes {
            for c in lex.classes.classes_of(w) {
                out.push(Feature::ClassWindow(c.clone()));
            }
        }
        if let Some(l) = lemmas {
            out.push(Feature::LemmaWindow(l.lemma(w).to_string()));
        }
    }

    out.sort_unstable();
    out.dedup();
    out
}

/// Features that are present in every context where `feature` is present,
/// given the configuration and lexicons. Does not include `feature` itself.
pub fn implied_features(feature: &Feature, cfg: &FeatureConfig, lex: &Lexicons) -> BTreeSet<Feature> {
    let mut seen = BTreeSet::new();
    let mut todo = vec![feature.clone()];
    while let Some(f) = todo.pop() {
        for g in direct_implications(&f, cfg, lex) {
            if g != *feature && seen.insert(g.clone()) {
                todo.push(g);
            }
        }
    }
    seen
}

fn direct_implications(f: &Feature, cfg: &FeatureConfig, lex: &Lexicons) -> Vec<Feature> {
    let tags = lex.tags.as_ref().filter(|_| cfg.tags);
    let lemmas = lex.lemmas.as_ref().filter(|_| cfg.lemmas);
    let mut out = Vec::new();

    // everything implied by "word w is at offset o"
    let word_present = |out: &mut Vec<Feature>, offset: i8, w: &str| {
        if cfg.word_at && offset.abs() == 1 {
            out.push(Feature::word_at(offset, w));
        }
        if cfg.window_words && cfg.window >= offset.unsigned_abs() as usize {
            out.push(Feature::window(w));
        }
        if cfg.window >= offset.unsigned_abs() as usize {
            if cfg.classes {
                out.extend(lex.classes.classes_of(w).iter().map(|c| Feature::ClassWindow(c.clone())));
            }
            if let Some(l) = lemmas {
                out.push(Feature::LemmaWindow(l.lemma(w).to_string()));
            }
        }
        if offset.abs() == 1 {
            if cfg.classes {
                out.extend(lex.classes.classes_of(w).iter().map(|c| Feature::ClassAt {
                    offset,
                    class: c.clone(),
                }));
            }
            if let Some(t) = tags.and_then(|t| t.union_tag(w)) {
                out.push(Feature::TagAt {
                    offset,
                    tag: t.to_string(),
                });
            }
            for &len in &cfg.suffix_lengths {
                if let Some(suffix) = suffix_of(w, len) {
                    out.push(Feature::SuffixAt { offset, suffix });
                }
            }
        }
    };

    match f {
        Feature::WordAt { offset, word } => word_present(&mut out, *offset, word),
        Feature::Pair { span, first, second } => {
            let (a, b) = span.offsets();
            word_present(&mut out, a, first);
            word_present(&mut out, b, second);
            if let Some(t) = tags {
                let (ta, tb) = (t.union_tag(first), t.union_tag(second));
                let mk = |x: Atom, y: Atom| Feature::TagPair {
                    span: *span,
                    first: x,
                    second: y,
                };
                if let Some(ta) = ta {
                    out.push(mk(Atom::Tag(ta.into()), Atom::Word(second.clone())));
                }
                if let Some(tb) = tb {
                    out.push(mk(Atom::Word(first.clone()), Atom::Tag(tb.into())));
                }
                if let (Some(ta), Some(tb)) = (ta, tb) {
                    out.push(mk(Atom::Tag(ta.into()), Atom::Tag(tb.into())));
                }
            }
        }
        Feature::TagPair { span, first, second } => {
            let (a, b) = span.offsets();
            for (offset, atom) in [(a, first), (b, second)] {
                match atom {
                    Atom::Word(w) => word_present(&mut out, offset, w),
                    Atom::Tag(t) if offset.abs() == 1 => out.push(Feature::TagAt {
                        offset,
                        tag: t.clone(),
                    }),
                    Atom::Tag(_) => {}
                }
            }
            if let Some(t) = tags {
                let lift = |atom: &Atom| match atom {
                    Atom::Word(w) => t.union_tag(w).map(|x| Atom::Tag(x.to_string())),
                    Atom::Tag(_) => None,
                };
                if let Some(x) = lift(first) {
                    out.push(Feature::TagPair {
                        span: *span,
                        first: x,
                        second: second.clone(),
                    });
                }
                if let Some(y) = lift(second) {
                    out.push(Feature::TagPair {
                        span: *span,
                        first: first.clone(),
                        second: y,
                    });
                }
            }
        }
        Feature::Window(w) => {
            if cfg.classes {
                out.extend(lex.classes.classes_of(w).iter().map(|c| Feature::ClassWindow(c.clone())));
            }
            if let Some(l) = lemmas {
                out.push(Feature::LemmaWindow(l.lemma(w).to_string()));
            }
        }
        Feature::ClassAt { class, .. } => {
            if cfg.window >= 1 {
                out.push(Feature::ClassWindow(class.clone()));
            }
        }
        Feature::SuffixAt { offset, suffix } => {
            let n = suffix.chars().count();
            for &len in cfg.suffix_lengths.iter().filter(|&&l| l < n) {
                out.push(Feature::SuffixAt {
                    offset: *offset,
                    suffix: suffix.chars().skip(n - len).collect(),
                });
            }
        }
        Feature::ClassWindow(_) | Feature::TagAt { .. } | Feature::LemmaWindow(_) => {}
    }
    out
}

pub(crate) fn offset_str(o: i8) -> String {
    fmt_offset(o)
}
