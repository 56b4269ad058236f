//! Runtime restoration: table lookup, list dispatch and first-match classification.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::corpus::{context_at, is_doc_end, is_doc_start, CorpusWord, PatternEntry, PatternId, PatternTable};
use crate::decision_list::{DecisionEntry, DecisionList, Interpolation, Smoothing};
use crate::features::{Context, FeatureConfig, Lexicons};
use crate::text::{lowercase_nfc, tokenize, DiacriticMap, TokenKind, WordKey, NUMBER_KEY};

/// Assignment of a key to a class list; `slots[j]` is the key's pattern for class slot `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassAssignment {
    pub class: String,
    pub slots: Vec<PatternId>,
}

/// Settings a model was trained with, kept for inspection and the model file.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSettings {
    pub language: String,
    pub features: FeatureConfig,
    pub smoothing: Smoothing,
    pub interpolation: Interpolation,
    pub min_count: u64,
    pub prune_cv: bool,
    pub prune_unused: bool,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            language: "all".into(),
            features: FeatureConfig::default(),
            smoothing: Smoothing::default(),
            interpolation: Interpolation::default(),
            min_count: 1,
            prune_cv: true,
            prune_unused: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    pub settings: ModelSettings,
    pub map: DiacriticMap,
    pub table: PatternTable,
    pub lexicons: Lexicons,
    pub word_lists: BTreeMap<WordKey, DecisionList>,
    pub class_lists: BTreeMap<String, DecisionList>,
    pub class_assignment: BTreeMap<WordKey, ClassAssignment>,
}

/// How a key is handled at runtime.
#[derive(Clone, Copy, Debug)]
pub enum Dispatch<'a> {
    Unknown,
    Single(&'a str),
    Word(&'a PatternEntry, &'a DecisionList),
    Class(&'a PatternEntry, &'a DecisionList, &'a [PatternId]),
    /// Ambiguous key whose list is missing: falls back to the majority pattern.
    Orphan(&'a PatternEntry),
}

/// Result of classifying one ambiguous occurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision<'a> {
    pub pattern: PatternId,
    pub form: &'a str,
    pub list: Option<&'a DecisionList>,
    /// Matched entry; `None` means DEFAULT.
    pub entry: Option<&'a DecisionEntry>,
}

impl Model {
    pub fn dispatch(&self, key: &str) -> Dispatch<'_> {
        let Some(entry) = self.table.get(key) else {
            return Dispatch::Unknown;
        };
        if !entry.is_ambiguous() {
            return Dispatch::Single(entry.majority());
        }
        if let Some(a) = self.class_assignment.get(key) {
            if let Some(list) = self.class_lists.get(&a.class) {
                return Dispatch::Class(entry, list, &a.slots);
            }
        }
        match self.word_lists.get(key) {
            Some(list) => Dispatch::Word(entry, list),
            None => Dispatch::Orphan(entry),
        }
    }

    /// Classifies an occurrence of `key` given the stripped words of its document.
    pub fn decide(&self, key: &str, words: &[CorpusWord], idx: usize) -> Option<Decision<'_>> {
        self.decide_with(key, words, idx, classify_with_entry)
    }

    /// As [`Model::decide`] but summing all matching evidence.
    pub fn decide_combined(&self, key: &str, words: &[CorpusWord], idx: usize) -> Option<Decision<'_>> {
        self.decide_with(key, words, idx, |l, c, x| (classify_combined(l, c, x), None))
    }

    fn decide_with<'a>(
        &'a self,
        key: &str,
        words: &[CorpusWord],
        idx: usize,
        classify: impl Fn(&'a DecisionList, &Context, &Lexicons) -> (PatternId, Option<&'a DecisionEntry>),
    ) -> Option<Decision<'a>> {
        let (entry, list, slots) = match self.dispatch(key) {
            Dispatch::Unknown | Dispatch::Single(_) => return None,
            Dispatch::Orphan(entry) => {
                return Some(Decision {
                    pattern: PatternId(0),
                    form: entry.majority(),
                    list: None,
                    entry: None,
                })
            }
            Dispatch::Word(e, l) => (e, l, None),
            Dispatch::Class(e, l, s) => (e, l, Some(s)),
        };
        let ctx = context_at(words, idx, list.window());
        let (label, matched) = classify(list, &ctx, &self.lexicons);
        let pattern = match slots {
            Some(s) => s.get(label.index()).copied().unwrap_or(PatternId(0)),
            None => label,
        };
        let form = entry.form(pattern).unwrap_or_else(|| entry.majority());
        Some(Decision {
            pattern,
            form,
            list: Some(list),
            entry: matched,
        })
    }
}

/// First-match classification; DEFAULT when nothing matches.
pub fn classify(list: &DecisionList, ctx: &Context, lex: &Lexicons) -> PatternId {
    list.classify_features(&list.features(ctx, lex))
}

pub fn classify_with_entry<'a>(
    list: &'a DecisionList,
    ctx: &Context,
    lex: &Lexicons,
) -> (PatternId, Option<&'a DecisionEntry>) {
    match list.first_match(&list.features(ctx, lex)) {
        Some(i) => (list.entries()[i].classification, Some(&list.entries()[i])),
        None => (list.default(), None),
    }
}

/// Sums the log-likelihoods of every matching entry per classification and
/// returns the largest total. Ties go to the first-match answer.
pub fn classify_combined(list: &DecisionList, ctx: &Context, lex: &Lexicons) -> PatternId {
    let feats = list.features(ctx, lex);
    let best = list.classify_features(&feats);
    let mut score = vec![0.0f64; list.labels().len()];
    let mut any = false;
    for f in &feats {
        if let Some(e) = list.first_match(std::slice::from_ref(f)).map(|i| &list.entries()[i]) {
            score[e.classification.index()] += e.log_likelihood;
            any = true;
        }
    }
    if !any {
        return best;
    }
    let mut winner = best;
    for (i, s) in score.iter().enumerate() {
        if *s > score[winner.index()] {
            winner = PatternId(i as u16);
        }
    }
    winner
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RestoreOptions {
    /// Leave tokens that already carry diacritics untouched.
    pub trust_existing: bool,
}

/// Per-ambiguous-token record for `--trace`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceLine {
    pub offset: usize,
    pub key: WordKey,
    pub evidence: Option<String>,
    pub log_likelihood: Option<f64>,
    pub pattern: String,
}

/// Restores accents in `text`. Lines of the form `<doc ...>` and `</doc>`
/// delimit documents; they and all non-word bytes pass through unchanged.
pub fn restore(text: &str, model: &Model, opts: RestoreOptions) -> String {
    restore_traced(text, model, opts).0
}

pub fn restore_traced(text: &str, model: &Model, opts: RestoreOptions) -> (String, Vec<TraceLine>) {
    let segments = split_documents(text);
    let done: Vec<(String, Vec<TraceLine>)> = segments
        .par_iter()
        .map(|seg| match seg {
            Segment::Marker(s) => (s.to_string(), Vec::new()),
            Segment::Text(start, s) => {
                let (out, mut trace) = restore_document(s, model, opts);
                for t in &mut trace {
                    t.offset += start;
                }
                (out, trace)
            }
        })
        .collect();
    let mut out = String::with_capacity(text.len() + text.len() / 8);
    let mut trace = Vec::new();
    for (s, t) in done {
        out.push_str(&s);
        trace.extend(t);
    }
    (out, trace)
}

enum Segment<'a> {
    Marker(&'a str),
    Text(usize, &'a str),
}

fn is_marker(line: &str) -> bool {
    is_doc_start(line) || is_doc_end(line)
}

fn split_documents(text: &str) -> Vec<Segment<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut pos = 0;
    for line in text.split_inclusive('\n') {
        if is_marker(line) {
            if pos > start {
                out.push(Segment::Text(start, &text[start..pos]));
            }
            out.push(Segment::Marker(line));
            start = pos + line.len();
        }
        pos += line.len();
    }
    if pos > start {
        out.push(Segment::Text(start, &text[start..pos]));
    }
    out
}

/// Restores one document: every word sees the whole document as context.
pub fn restore_document(text: &str, model: &Model, opts: RestoreOptions) -> (String, Vec<TraceLine>) {
    let tokens = tokenize(text);
    let mut words = Vec::new();
    let mut word_token = Vec::new();
    for (ti, t) in tokens.iter().enumerate() {
        match t.kind {
            TokenKind::Word => {
                words.push(CorpusWord {
                    form: lowercase_nfc(t.surface),
                    key: model.map.strip(t.surface),
                    is_number: false,
                });
                word_token.push(ti);
            }
            TokenKind::Number => {
                words.push(CorpusWord {
                    form: NUMBER_KEY.into(),
                    key: WordKey::number(),
                    is_number: true,
                });
                word_token.push(ti);
            }
            _ => {}
        }
    }

    let mut replaced: Vec<Option<String>> = vec![None; tokens.len()];
    let mut trace = Vec::new();
    for (wi, w) in words.iter().enumerate() {
        if w.is_number {
            continue;
        }
        let tok = &tokens[word_token[wi]];
        if opts.trust_existing && model.map.has_diacritics(tok.surface) {
            continue;
        }
        let form = match model.dispatch(&w.key) {
            Dispatch::Unknown => continue,
            Dispatch::Single(form) => form,
            _ => {
                let Some(d) = model.decide(&w.key, &words, wi) else { continue };
                trace.push(TraceLine {
                    offset: tok.span.start,
                    key: w.key.clone(),
                    evidence: d.entry.map(|e| e.feature.to_string()),
                    log_likelihood: d.entry.map(|e| e.log_likelihood),
                    pattern: d.form.to_string(),
                });
                d.form
            }
        };
        if let Ok(s) = model.map.apply_pattern(tok.surface, form) {
            if s != tok.surface {
                replaced[word_token[wi]] = Some(s);
            }
        }
    }

    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (t, r) in tokens.iter().zip(&replaced) {
        if let Some(r) = r {
            out.push_str(&text[last..t.span.start]);
            out.push_str(r);
            last = t.span.end;
        }
    }
    out.push_str(&text[last..]);
    (out, trace)
}

impl TraceLine {
    pub fn to_line(&self) -> String {
        let ll = self
            .log_likelihood
            .map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        let ev = self.evidence.as_deref().unwrap_or("DEFAULT");
        format!("{}\t{}\t{}\t{}\t{}", self.offset, self.key, ev, ll, self.pattern)
    }
}
