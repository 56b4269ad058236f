//! Corpus ingestion, the accent-pattern table and training-context collection.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::Context;
use crate::text::{tokenize, DiacriticMap, TokenKind, WordKey};

/// One line (or one marked document) of raw corpus text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextUnit {
    pub doc: usize,
    pub text: String,
}

/// Raw text before tokenization, kept in units small enough to fold on.
///
/// Files containing `<doc ...>` marker lines are split into documents at the
/// markers and each document is one unit. Unmarked files contribute one unit
/// per line, all sharing the file's document id, so contiguous lines of a file
/// are rejoined into one document for context windows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawCorpus {
    pub units: Vec<TextUnit>,
    pub marked: bool,
    next_doc: usize,
}

pub(crate) fn is_doc_start(line: &str) -> bool {
    let t = line.trim_start();
    t.get(..4).is_some_and(|h| h.eq_ignore_ascii_case("<doc"))
}

pub(crate) fn is_doc_end(line: &str) -> bool {
    line.trim().eq_ignore_ascii_case("</doc>")
}

impl RawCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_text(text: &str) -> Self {
        let mut c = Self::new();
        c.add_text(text);
        c
    }

    pub fn add_text(&mut self, text: &str) {
        if text.lines().any(is_doc_start) {
            self.marked = true;
            let mut current: Option<String> = None;
            for line in text.lines() {
                if is_doc_start(line) {
                    self.flush_doc(current.take());
                    current = Some(String::new());
                } else if is_doc_end(line) {
                    self.flush_doc(current.take());
                } else {
                    let doc = current.get_or_insert_with(String::new);
                    doc.push_str(line);
                    doc.push('\n');
                }
            }
            self.flush_doc(current);
        } else {
            let doc = self.next_doc;
            self.next_doc += 1;
            for line in text.lines() {
                if !line.trim().is_empty() {
                    self.units.push(TextUnit {
                        doc,
                        text: line.to_string(),
                    });
                }
            }
        }
    }

    fn flush_doc(&mut self, doc: Option<String>) {
        if let Some(text) = doc {
            if !text.trim().is_empty() {
                self.units.push(TextUnit {
                    doc: self.next_doc,
                    text,
                });
                self.next_doc += 1;
            }
        }
    }

    /// Reads files, or every regular file below a directory, in sorted path order.
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Self> {
        let mut files = Vec::new();
        for p in paths {
            collect_files(p.as_ref(), &mut files)?;
        }
        let mut corpus = Self::new();
        for f in files {
            let bytes = fs::read(&f).map_err(|source| Error::Io {
                path: f.clone(),
                source,
            })?;
            let text = String::from_utf8(bytes).map_err(|e| Error::InputEncoding {
                offset: e.utf8_error().valid_up_to(),
            })?;
            corpus.add_text(&text);
        }
        Ok(corpus)
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Texts of the documents, joining consecutive units of the same document.
    pub fn documents(&self) -> Vec<String> {
        let mut docs: Vec<String> = Vec::new();
        let mut last = None;
        for u in &self.units {
            if last == Some(u.doc) {
                let d = docs.last_mut().expect("previous unit exists");
                d.push('\n');
                d.push_str(&u.text);
            } else {
                docs.push(u.text.clone());
            }
            last = Some(u.doc);
        }
        docs
    }

    /// Selects units by index range, keeping document ids.
    pub fn select(&self, keep: impl Fn(usize) -> bool) -> RawCorpus {
        RawCorpus {
            units: self
                .units
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, u)| u.clone())
                .collect(),
            marked: self.marked,
            next_doc: self.next_doc,
        }
    }

    /// Contiguous `folds`-way partition: returns (train, test) per fold.
    ///
    /// A document split between the two sides of a fold becomes two separate
    /// documents, so no context window reaches across the boundary.
    pub fn folds(&self, folds: usize) -> Result<Vec<(RawCorpus, RawCorpus)>> {
        let n = self.units.len();
        if folds < 2 || n < folds {
            return Err(Error::TooFewFolds { folds, units: n });
        }
        let bounds: Vec<usize> = (0..=folds).map(|f| f * n / folds).collect();
        Ok((0..folds)
            .map(|f| {
                let (lo, hi) = (bounds[f], bounds[f + 1]);
                let mut train = self.select(|i| i < lo || i >= hi);
                // keep the block before and after the test slice apart
                for u in train.units.iter_mut().skip(lo) {
                    u.doc += self.next_doc;
                }
                train.next_doc = self.next_doc * 2;
                (train, self.select(|i| i >= lo && i < hi))
            })
            .collect())
    }
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let meta = fs::metadata(path).map_err(io_err)?;
    if meta.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io_err)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()
            .map_err(io_err)?;
        entries.sort();
        for e in entries {
            collect_files(&e, out)?;
        }
    } else {
        out.push(path.to_path_buf());
    }
    Ok(())
}

/// A word token as seen by training: its lowercase accented form and its key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusWord {
    pub form: String,
    pub key: WordKey,
    pub is_number: bool,
}

/// Tokenized corpus: per document, the word and number tokens in order.
/// Punctuation does not appear, so windows and pairs count words only.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub documents: Vec<Vec<CorpusWord>>,
}

impl Corpus {
    pub fn from_documents<S: AsRef<str> + Sync>(docs: &[S], map: &DiacriticMap) -> Self {
        let documents = docs
            .par_iter()
            .map(|d| word_stream(d.as_ref(), map))
            .collect();
        Corpus { documents }
    }

    pub fn from_raw(raw: &RawCorpus, map: &DiacriticMap) -> Self {
        Self::from_documents(&raw.documents(), map)
    }

    pub fn word_count(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }
}

pub fn word_stream(text: &str, map: &DiacriticMap) -> Vec<CorpusWord> {
    tokenize(text)
        .into_iter()
        .filter_map(|t| match t.kind {
            TokenKind::Word => {
                let key = map.strip(t.surface);
                let form = crate::text::lowercase_nfc(t.surface);
                Some(CorpusWord {
                    form,
                    key,
                    is_number: false,
                })
            }
            TokenKind::Number => Some(CorpusWord {
                form: crate::text::NUMBER_KEY.to_string(),
                key: WordKey::number(),
                is_number: true,
            }),
            _ => None,
        })
        .collect()
}

/// Index of an accent pattern within its key's entry. Ids follow descending
/// corpus frequency, so id 0 is the majority pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PatternId(pub u16);

impl PatternId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternCount {
    pub form: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternEntry {
    patterns: Vec<PatternCount>,
    total: u64,
}

impl PatternEntry {
    /// Sorts by descending count, ties by form, and drops zero counts.
    pub fn new(mut patterns: Vec<PatternCount>) -> Self {
        patterns.retain(|p| p.count > 0);
        patterns.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.form.cmp(&b.form)));
        let total = patterns.iter().map(|p| p.count).sum();
        PatternEntry { patterns, total }
    }

    pub fn patterns(&self) -> &[PatternCount] {
        &self.patterns
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn freq(&self, id: PatternId) -> f64 {
        self.patterns[id.index()].count as f64 / self.total as f64
    }

    pub fn is_ambiguous(&self) -> bool {
        self.patterns.len() >= 2
    }

    pub fn majority(&self) -> &str {
        &self.patterns[0].form
    }

    pub fn form(&self, id: PatternId) -> Option<&str> {
        self.patterns.get(id.index()).map(|p| p.form.as_str())
    }

    pub fn id_of(&self, form: &str) -> Option<PatternId> {
        self.patterns
            .iter()
            .position(|p| p.form == form)
            .map(|i| PatternId(i as u16))
    }

    pub fn forms(&self) -> Vec<String> {
        self.patterns.iter().map(|p| p.form.clone()).collect()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.patterns.iter().map(|p| p.count).collect()
    }
}

/// Per key, the accent patterns observed in an accented corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternTable {
    entries: BTreeMap<WordKey, PatternEntry>,
}

impl PatternTable {
    pub fn insert(&mut self, key: WordKey, entry: PatternEntry) {
        if !entry.patterns.is_empty() {
            self.entries.insert(key, entry);
        }
    }

    pub fn get(&self, key: &str) -> Option<&PatternEntry> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WordKey, &PatternEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_ambiguous(&self, key: &str) -> bool {
        self.get(key).is_some_and(PatternEntry::is_ambiguous)
    }

    pub fn ambiguous_keys(&self) -> impl Iterator<Item = &WordKey> {
        self.entries
            .iter()
            .filter(|(_, e)| e.is_ambiguous())
            .map(|(k, _)| k)
    }
}

/// Shard-local pattern counts; merging is associative.
#[derive(Clone, Debug, Default)]
pub struct PatternCounts {
    counts: HashMap<WordKey, HashMap<String, u64>>,
}

impl PatternCounts {
    pub fn add_document(&mut self, doc: &[CorpusWord]) {
        for w in doc.iter().filter(|w| !w.is_number) {
            *self
                .counts
                .entry(w.key.clone())
                .or_default()
                .entry(w.form.clone())
                .or_insert(0) += 1;
        }
    }

    pub fn merge(mut self, other: PatternCounts) -> PatternCounts {
        let (mut big, small) = if self.counts.len() >= other.counts.len() {
            (std::mem::take(&mut self.counts), other.counts)
        } else {
            (other.counts, std::mem::take(&mut self.counts))
        };
        for (key, forms) in small {
            let slot = big.entry(key).or_default();
            for (form, n) in forms {
                *slot.entry(form).or_insert(0) += n;
            }
        }
        PatternCounts { counts: big }
    }

    pub fn into_table(self, min_count: u64) -> PatternTable {
        let mut table = PatternTable::default();
        for (key, forms) in self.counts {
            let total: u64 = forms.values().sum();
            if total < min_count {
                continue;
            }
            let entry = PatternEntry::new(
                forms
                    .into_iter()
                    .map(|(form, count)| PatternCount { form, count })
                    .collect(),
            );
            table.insert(key, entry);
        }
        table
    }
}

/// Counts accent patterns per key, keeping keys seen at least `min_count` times.
pub fn build_pattern_table(corpus: &Corpus, min_count: u64) -> PatternTable {
    corpus
        .documents
        .par_iter()
        .fold(PatternCounts::default, |mut acc, doc| {
            acc.add_document(doc);
            acc
        })
        .reduce(PatternCounts::default, PatternCounts::merge)
        .into_table(min_count)
}

/// One labeled occurrence of an ambiguous key with its stripped context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainingInstance {
    pub label: PatternId,
    pub target: WordKey,
    pub context: Context,
}

/// Context of the word at `idx`: up to `k` word keys on each side, within the document.
pub fn context_at(doc: &[CorpusWord], idx: usize, k: usize) -> Context {
    let lo = idx.saturating_sub(k);
    let hi = (idx + 1 + k).min(doc.len());
    Context {
        left: doc[lo..idx].iter().map(|w| w.key.clone()).collect(),
        right: doc[idx + 1..hi].iter().map(|w| w.key.clone()).collect(),
    }
}

/// Labeled contexts for every occurrence of `key`. Empty if the key is not
/// in the table.
pub fn collect_contexts(
    corpus: &Corpus,
    table: &PatternTable,
    key: &str,
    k: usize,
) -> Vec<TrainingInstance> {
    let Some(entry) = table.get(key) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for doc in &corpus.documents {
        for (i, w) in doc.iter().enumerate() {
            if w.key.as_str() != key {
                continue;
            }
            if let Some(label) = entry.id_of(&w.form) {
                out.push(TrainingInstance {
                    label,
                    target: w.key.clone(),
                    context: context_at(doc, i, k),
                });
            }
        }
    }
    out
}

/// Labeled contexts for all ambiguous keys in one pass over the corpus.
pub fn collect_all_contexts(
    corpus: &Corpus,
    table: &PatternTable,
    k: usize,
) -> BTreeMap<WordKey, Vec<TrainingInstance>> {
    corpus
        .documents
        .par_iter()
        .fold(BTreeMap::<WordKey, Vec<TrainingInstance>>::new, |mut acc, doc| {
            for (i, w) in doc.iter().enumerate() {
                let Some(entry) = table.get(&w.key).filter(|e| e.is_ambiguous()) else {
                    continue;
                };
                if let Some(label) = entry.id_of(&w.form) {
                    acc.entry(w.key.clone()).or_default().push(TrainingInstance {
                        label,
                        target: w.key.clone(),
                        context: context_at(doc, i, k),
                    });
                }
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, mut v) in b {
                a.entry(k).or_default().append(&mut v);
            }
            a
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Language;

    fn fr() -> DiacriticMap {
        DiacriticMap::for_language(Language::French)
    }

    fn repeated(parts: &[(&str, usize)]) -> String {
        let mut s = String::new();
        for (w, n) in parts {
            for _ in 0..*n {
                s.push_str(w);
                s.push(' ');
            }
        }
        s
    }

    #[test]
    fn cote_histogram() {
        let text = repeated(&[("côté", 2645), ("côte", 1040), ("cote", 99), ("coté", 15)]);
        let corpus = Corpus::from_documents(&[text], &fr());
        let table = build_pattern_table(&corpus, 2);
        let e = table.get("cote").unwrap();
        let forms: Vec<_> = e.patterns().iter().map(|p| (p.form.as_str(), p.count)).collect();
        assert_eq!(forms, [("côté", 2645), ("côte", 1040), ("cote", 99), ("coté", 15)]);
        // printed table: 69% / 28% / 3% / <1%
        for (i, pct) in [69.0, 28.0, 3.0].into_iter().enumerate() {
            assert!((e.freq(PatternId(i as u16)) * 100.0 - pct).abs() <= 1.0);
        }
        assert!(e.freq(PatternId(3)) < 0.01);
        let sum: f64 = (0..4).map(|i| e.freq(PatternId(i))).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(table.is_ambiguous("cote"));
    }

    #[test]
    fn single_pattern_key() {
        let text = repeated(&[("coût", 330)]);
        let table = build_pattern_table(&Corpus::from_documents(&[text], &fr()), 2);
        let e = table.get("cout").unwrap();
        assert_eq!(e.patterns().len(), 1);
        assert_eq!(e.freq(PatternId(0)), 1.0);
        assert!(!e.is_ambiguous());
    }

    #[test]
    fn empty_corpus_gives_empty_table() {
        let corpus = Corpus::from_documents::<&str>(&[], &fr());
        assert!(build_pattern_table(&corpus, 2).is_empty());
    }

    #[test]
    fn min_count_drops_rare_keys() {
        let corpus = Corpus::from_documents(&["rare côte côte côté"], &fr());
        let table = build_pattern_table(&corpus, 2);
        assert!(table.get("rare").is_none());
        assert!(table.get("cote").is_some());
        assert!(build_pattern_table(&corpus, 1).get("rare").is_some());
    }

    #[test]
    fn numbers_are_not_tabled() {
        let corpus = Corpus::from_documents(&["1991 1991 côte"], &fr());
        let table = build_pattern_table(&corpus, 1);
        assert!(table.get(crate::text::NUMBER_KEY).is_none());
    }

    #[test]
    fn context_window() {
        let doc = "il faut du laisser de côté faute de temps, dit-il. Puis la côte ouest";
        let corpus = Corpus::from_documents(&[doc], &fr());
        let table = build_pattern_table(&corpus, 1);
        let inst = collect_contexts(&corpus, &table, "cote", 3);
        assert_eq!(inst.len(), 2);
        let first = &inst[0];
        assert_eq!(table.get("cote").unwrap().form(first.label), Some("côté"));
        let keys = |v: &[WordKey]| v.iter().map(|k| k.to_string()).collect::<Vec<_>>();
        assert_eq!(keys(&first.context.left), ["du", "laisser", "de"]);
        // punctuation does not count toward the window
        assert_eq!(keys(&first.context.right), ["faute", "de", "temps"]);
        assert_eq!(keys(&inst[1].context.right), ["ouest"]);
    }

    #[test]
    fn document_start_truncates_left() {
        let corpus = Corpus::from_documents(&["côte ouest verte", "passe côté"], &fr());
        let table = build_pattern_table(&corpus, 1);
        let inst = collect_contexts(&corpus, &table, "cote", 3);
        assert!(inst[0].context.left.is_empty());
        assert_eq!(inst[0].context.right.len(), 2);
        // second document does not see the first
        assert_eq!(inst[1].context.left.len(), 1);
        assert!(inst[1].context.right.is_empty());
    }

    #[test]
    fn absent_key_gives_no_instances() {
        let corpus = Corpus::from_documents(&["la maison"], &fr());
        let table = build_pattern_table(&corpus, 1);
        assert!(collect_contexts(&corpus, &table, "cote", 3).is_empty());
    }

    #[test]
    fn instance_counts_match_table() {
        let docs = ["la côte est belle, du côté de la côte", "côté cote côte"];
        let corpus = Corpus::from_documents(&docs, &fr());
        let table = build_pattern_table(&corpus, 1);
        let all = collect_all_contexts(&corpus, &table, 5);
        let inst = &all[&WordKey::from_stripped("cote")];
        let entry = table.get("cote").unwrap();
        for (i, p) in entry.patterns().iter().enumerate() {
            let n = inst.iter().filter(|x| x.label == PatternId(i as u16)).count() as u64;
            assert_eq!(n, p.count);
        }
        assert!(inst.iter().all(|x| x.target.as_str() == "cote"));
        assert_eq!(inst, &collect_contexts(&corpus, &table, "cote", 5));
    }

    #[test]
    fn raw_corpus_documents_and_folds() {
        let raw = RawCorpus::from_text("a\nb\nc\nd\ne\n");
        assert!(!raw.marked);
        assert_eq!(raw.documents(), ["a\nb\nc\nd\ne"]);
        let folds = raw.folds(5).unwrap();
        assert_eq!(folds.len(), 5);
        let (train, test) = &folds[2];
        assert_eq!(test.documents(), ["c"]);
        assert_eq!(train.documents(), ["a\nb", "d\ne"]);
        assert!(matches!(raw.folds(6), Err(Error::TooFewFolds { .. })));
        assert!(matches!(raw.folds(1), Err(Error::TooFewFolds { .. })));
    }

    #[test]
    fn marked_documents() {
        let raw = RawCorpus::from_text("<doc id=1>\nun deux\ntrois\n</doc>\n<doc id=2>\nquatre\n</doc>\n");
        assert!(raw.marked);
        assert_eq!(raw.units.len(), 2);
        assert_eq!(raw.documents(), ["un deux\ntrois\n", "quatre\n"]);
    }
}
