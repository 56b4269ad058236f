//! Text model format. Hand-editable: one section per table, one decision
//! list per `[LIST]` block, entries in rank order. Fields are tab-separated.
//!
//! ```text
//! accentdl-model  1
//! [HEADER]
//! language  fr
//! ...
//! [LIST]
//! target  word  cote
//! window  20
//! labels  côté  côte
//! 9.5849  côte  word  -1  la  0,766
//! default  côté
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::{PatternCount, PatternEntry, PatternId, PatternTable};
use crate::decision_list::{DecisionEntry, DecisionList, Interpolation, ListTarget, Smoothing};
use crate::error::{Error, Result};
use crate::features::{offset_str, Atom, Feature, FeatureConfig, LemmaLexicon, PairSpan, TagLexicon, WordClassSet};
use crate::restorer::{ClassAssignment, Model, ModelSettings};
use crate::text::{DiacriticMap, WordKey};

pub const MAGIC: &str = "accentdl-model";
pub const VERSION: u32 = 1;

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn feature_flags(cfg: &FeatureConfig) -> String {
    let flags = [
        ("word_at", cfg.word_at),
        ("pairs", cfg.pairs),
        ("window", cfg.window_words),
        ("classes", cfg.classes),
        ("tags", cfg.tags),
        ("lemmas", cfg.lemmas),
    ];
    flags
        .iter()
        .filter(|(_, on)| *on)
        .map(|(n, _)| *n)
        .collect::<Vec<_>>()
        .join(",")
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn span_str(span: PairSpan) -> String {
    let (a, b) = span.offsets();
    format!("{},{}", offset_str(a), offset_str(b))
}

fn feature_columns(f: &Feature) -> String {
    match f {
        Feature::WordAt { offset, word } => format!("word\t{}\t{word}", offset_str(*offset)),
        Feature::Pair { span, first, second } => format!("pair\t{}\t{first}\t{second}", span_str(*span)),
        Feature::Window(w) => format!("window\t{w}"),
        Feature::ClassAt { offset, class } => format!("class\t{}\t{class}", offset_str(*offset)),
        Feature::ClassWindow(c) => format!("classwindow\t{c}"),
        Feature::TagAt { offset, tag } => format!("tag\t{}\t{tag}", offset_str(*offset)),
        Feature::TagPair { span, first, second } => format!("tagpair\t{}\t{first}\t{second}", span_str(*span)),
        Feature::LemmaWindow(l) => format!("lemma\t{l}"),
        Feature::SuffixAt { offset, suffix } => format!("suffix\t{}\t{suffix}", offset_str(*offset)),
    }
}

fn write_list(out: &mut String, list: &DecisionList) {
    let _ = writeln!(out, "[LIST]");
    match list.target() {
        ListTarget::Word(w) => {
            let _ = writeln!(out, "target\tword\t{w}");
        }
        ListTarget::Class(c) => {
            let _ = writeln!(out, "target\tclass\t{c}");
        }
    }
    let _ = writeln!(out, "window\t{}", list.window());
    let _ = writeln!(out, "labels\t{}", list.labels().join("\t"));
    for e in list.entries() {
        let _ = writeln!(
            out,
            "{:.4}\t{}\t{}\t{}",
            e.log_likelihood,
            list.label(e.classification),
            feature_columns(&e.feature),
            join(&e.counts, ",")
        );
    }
    let _ = writeln!(out, "default\t{}", list.label(list.default()));
}

pub fn serialize(model: &Model) -> String {
    let s = &model.settings;
    let mut out = format!("{MAGIC}\t{VERSION}\n[HEADER]\n");
    let _ = writeln!(out, "language\t{}", s.language);
    let _ = writeln!(out, "window\t{}", s.features.window);
    let _ = writeln!(out, "alpha\t{}", s.smoothing.alpha());
    let _ = writeln!(out, "beta_gamma\t{},{}", s.interpolation.beta(), s.interpolation.gamma());
    let _ = writeln!(out, "features\t{}", feature_flags(&s.features));
    let _ = writeln!(out, "suffixes\t{}", join(&s.features.suffix_lengths, ","));
    let _ = writeln!(out, "min_count\t{}", s.min_count);
    let _ = writeln!(out, "prune_cv\t{}", on_off(s.prune_cv));
    let _ = writeln!(out, "prune_unused\t{}", on_off(s.prune_unused));

    out.push_str("[MAP]\n");
    for (c, plain) in model.map.entries() {
        let _ = writeln!(out, "{c}\t{plain}");
    }
    out.push_str("[PATTERNS]\n");
    for (k, e) in model.table.iter() {
        let cols: Vec<String> = e.patterns().iter().map(|p| format!("{}\t{}", p.form, p.count)).collect();
        let _ = writeln!(out, "{k}\t{}", cols.join("\t"));
    }
    let lines = |out: &mut String, name: &str, v: Vec<String>| {
        let _ = writeln!(out, "[{name}]");
        for l in v {
            let _ = writeln!(out, "{l}");
        }
    };
    lines(&mut out, "CLASSES", model.lexicons.classes.to_lines());
    if let Some(t) = &model.lexicons.tags {
        lines(&mut out, "TAGS", t.to_lines());
    }
    if let Some(l) = &model.lexicons.lemmas {
        lines(&mut out, "LEMMAS", l.to_lines());
    }
    out.push_str("[ASSIGN]\n");
    for (k, a) in &model.class_assignment {
        let slots: Vec<u16> = a.slots.iter().map(|p| p.0).collect();
        let _ = writeln!(out, "{k}\t{}\t{}", a.class, join(&slots, ","));
    }
    for list in model.class_lists.values() {
        write_list(&mut out, list);
    }
    for list in model.word_lists.values() {
        write_list(&mut out, list);
    }
    out
}

pub fn save(model: &Model, path: &Path) -> Result<()> {
    fs::write(path, serialize(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> Result<Model> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| Error::InputEncoding {
        offset: e.utf8_error().valid_up_to(),
    })?;
    parse(&text, &path.display().to_string())
}

struct Parser<'a> {
    name: &'a str,
}

impl Parser<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::format(self.name, line, msg)
    }

    fn num<T: std::str::FromStr>(&self, line: usize, s: &str, what: &str) -> Result<T> {
        s.trim()
            .parse()
            .map_err(|_| self.err(line, format!("invalid {what} `{s}`")))
    }

    fn offset(&self, line: usize, s: &str) -> Result<i8> {
        let o: i8 = self.num(line, s.trim_start_matches('+'), "offset")?;
        if o == 0 {
            return Err(self.err(line, "offset must be nonzero"));
        }
        Ok(o)
    }

    fn span(&self, line: usize, s: &str) -> Result<PairSpan> {
        let (a, b) = s.split_once(',').ok_or_else(|| self.err(line, "span must be `a,b`"))?;
        PairSpan::from_offsets(self.offset(line, a)?, self.offset(line, b)?)
            .ok_or_else(|| self.err(line, format!("unknown pair span `{s}`")))
    }

    fn atom(&self, line: usize, s: &str) -> Result<Atom> {
        Atom::parse(s).ok_or_else(|| self.err(line, format!("pair slot `{s}` needs a w: or t: prefix")))
    }

    fn feature(&self, line: usize, cols: &[&str]) -> Result<Feature> {
        let want = |n: usize| {
            if cols.len() == n {
                Ok(())
            } else {
                Err(self.err(line, format!("`{}` evidence takes {} fields", cols[0], n - 1)))
            }
        };
        let f = match cols[0] {
            "word" => {
                want(3)?;
                Feature::word_at(self.offset(line, cols[1])?, cols[2])
            }
            "pair" => {
                want(4)?;
                Feature::pair(self.span(line, cols[1])?, cols[2], cols[3])
            }
            "window" => {
                want(2)?;
                Feature::window(cols[1])
            }
            "class" => {
                want(3)?;
                Feature::ClassAt {
                    offset: self.offset(line, cols[1])?,
                    class: cols[2].into(),
                }
            }
            "classwindow" => {
                want(2)?;
                Feature::ClassWindow(cols[1].into())
            }
            "tag" => {
                want(3)?;
                Feature::TagAt {
                    offset: self.offset(line, cols[1])?,
                    tag: cols[2].into(),
                }
            }
            "tagpair" => {
                want(4)?;
                Feature::TagPair {
                    span: self.span(line, cols[1])?,
                    first: self.atom(line, cols[2])?,
                    second: self.atom(line, cols[3])?,
                }
            }
            "lemma" => {
                want(2)?;
                Feature::LemmaWindow(cols[1].into())
            }
            "suffix" => {
                want(3)?;
                Feature::SuffixAt {
                    offset: self.offset(line, cols[1])?,
                    suffix: cols[2].into(),
                }
            }
            other => return Err(self.err(line, format!("unknown evidence kind `{other}`"))),
        };
        Ok(f)
    }
}

#[derive(Default)]
struct ListDraft {
    start: usize,
    target: Option<ListTarget>,
    window: Option<usize>,
    labels: Vec<String>,
    entries: Vec<(usize, f64, String, Feature, Vec<u32>)>,
    default: Option<(usize, String)>,
}

fn finish_list(p: &Parser<'_>, d: ListDraft, base: &FeatureConfig) -> Result<DecisionList> {
    let target = d.target.ok_or_else(|| p.err(d.start, "list has no target line"))?;
    let window = d.window.ok_or_else(|| p.err(d.start, "list has no window line"))?;
    if d.labels.len() < 2 {
        return Err(p.err(d.start, "list needs at least two labels"));
    }
    let label_id = |line: usize, s: &str| {
        d.labels
            .iter()
            .position(|l| l == s)
            .map(|i| PatternId(i as u16))
            .ok_or_else(|| p.err(line, format!("`{s}` is not one of the list labels")))
    };
    let mut entries = Vec::with_capacity(d.entries.len());
    for (line, ll, class, feature, counts) in d.entries {
        if counts.len() != d.labels.len() {
            return Err(p.err(line, "count list length differs from label count"));
        }
        entries.push(DecisionEntry {
            feature,
            log_likelihood: ll,
            classification: label_id(line, &class)?,
            counts,
        });
    }
    let (dline, dlabel) = d.default.ok_or_else(|| p.err(d.start, "list has no default line"))?;
    let default = label_id(dline, &dlabel)?;
    Ok(DecisionList::new(target, d.labels, base.with_window(window), entries, default))
}

/// Parses a model; errors carry the source name and 1-based line number.
pub fn parse(src: &str, source_name: &str) -> Result<Model> {
    let p = Parser { name: source_name };
    let lines: Vec<&str> = src.lines().map(|l| l.trim_end_matches('\r')).collect();
    let first = lines.first().copied().unwrap_or_default();
    match first.split_once('\t') {
        Some((MAGIC, v)) if v.trim() == VERSION.to_string() => {}
        Some((MAGIC, v)) => return Err(p.err(1, format!("unsupported model version `{v}`"))),
        _ => return Err(p.err(1, format!("not a model file (expected `{MAGIC}<TAB>{VERSION}`)"))),
    }

    // Section bodies padded to keep line numbers aligned with the file.
    let mut sections: BTreeMap<&str, String> = BTreeMap::new();
    let mut section = "";
    let mut lists: Vec<ListDraft> = Vec::new();
    let mut header: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, &line) in lines.iter().enumerate().skip(1) {
        let n = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name {
                "HEADER" | "MAP" | "PATTERNS" | "CLASSES" | "TAGS" | "LEMMAS" | "ASSIGN" => name,
                "LIST" => {
                    lists.push(ListDraft {
                        start: n,
                        ..Default::default()
                    });
                    "LIST"
                }
                other => return Err(p.err(n, format!("unknown section `{other}`"))),
            };
            if section != "LIST" {
                sections.entry(section).or_default();
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        match section {
            "" => return Err(p.err(n, "content before the first section")),
            "HEADER" => {
                let (k, v) = line.split_once('\t').ok_or_else(|| p.err(n, "expected `name<TAB>value`"))?;
                header.insert(k, (n, v));
            }
            "LIST" => {
                let d = lists.last_mut().expect("inside a list");
                match cols[0] {
                    "target" => {
                        d.target = Some(match cols.get(1..) {
                            Some(["word", w]) => ListTarget::Word(WordKey::from_stripped(*w)),
                            Some(["class", c]) => ListTarget::Class(c.to_string()),
                            _ => return Err(p.err(n, "expected `target<TAB>word|class<TAB>name`")),
                        })
                    }
                    "window" => d.window = Some(p.num(n, cols.get(1).copied().unwrap_or(""), "window")?),
                    "labels" => d.labels = cols[1..].iter().map(|s| s.to_string()).collect(),
                    "default" => d.default = Some((n, cols.get(1).copied().unwrap_or("").to_string())),
                    ll => {
                        let ll: f64 = p.num(n, ll, "log-likelihood")?;
                        if cols.len() < 5 {
                            return Err(p.err(n, "entry needs LL, label, evidence and counts"));
                        }
                        let counts = cols[cols.len() - 1]
                            .split(',')
                            .map(|c| p.num(n, c, "count"))
                            .collect::<Result<Vec<u32>>>()?;
                        let feature = p.feature(n, &cols[2..cols.len() - 1])?;
                        d.entries.push((n, ll, cols[1].to_string(), feature, counts));
                    }
                }
            }
            _ => {
                let body = sections.get_mut(section).expect("section exists");
                let pad = n - 1 - body.matches('\n').count();
                body.push_str(&"\n".repeat(pad));
                body.push_str(line);
                body.push('\n');
            }
        }
    }

    let get = |k: &str| header.get(k).copied().ok_or_else(|| p.err(2, format!("header lacks `{k}`")));
    let settings = {
        let (ln, window) = get("window")?;
        let (la, alpha) = get("alpha")?;
        let (lb, bg) = get("beta_gamma")?;
        let (lf, flags) = get("features")?;
        let (ls, suffixes) = get("suffixes")?;
        let (lm, min_count) = get("min_count")?;
        let flag = |k: &str| -> Result<bool> {
            let (l, v) = get(k)?;
            match v.trim() {
                "on" => Ok(true),
                "off" => Ok(false),
                other => Err(p.err(l, format!("`{k}` must be on or off, got `{other}`"))),
            }
        };
        let flags: Vec<&str> = flags.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        for f in &flags {
            if !["word_at", "pairs", "window", "classes", "tags", "lemmas"].contains(f) {
                return Err(p.err(lf, format!("unknown feature kind `{f}`")));
            }
        }
        let features = FeatureConfig {
            window: p.num(ln, window, "window")?,
            word_at: flags.contains(&"word_at"),
            pairs: flags.contains(&"pairs"),
            window_words: flags.contains(&"window"),
            classes: flags.contains(&"classes"),
            tags: flags.contains(&"tags"),
            lemmas: flags.contains(&"lemmas"),
            suffix_lengths: suffixes
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| p.num(ls, s, "suffix length"))
                .collect::<Result<_>>()?,
        };
        let (b, g) = bg.split_once(',').ok_or_else(|| p.err(lb, "expected `beta,gamma`"))?;
        ModelSettings {
            language: get("language")?.1.trim().to_string(),
            features,
            smoothing: Smoothing::new(p.num(la, alpha, "alpha")?).map_err(|e| p.err(la, e.to_string()))?,
            interpolation: Interpolation::new(p.num(lb, b, "beta")?, p.num(lb, g, "gamma")?)
                .map_err(|e| p.err(lb, e.to_string()))?,
            min_count: p.num(lm, min_count, "min_count")?,
            prune_cv: flag("prune_cv")?,
            prune_unused: flag("prune_unused")?,
        }
    };

    let body = |s: &str| sections.get(s).map(String::as_str);
    let map = DiacriticMap::parse(body("MAP").unwrap_or(""), source_name)?;

    let mut table = PatternTable::default();
    for (i, line) in body("PATTERNS").unwrap_or("").lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 || cols.len().is_multiple_of(2) {
            return Err(p.err(i + 1, "expected `key<TAB>form<TAB>count...`"));
        }
        let patterns = cols[1..]
            .chunks(2)
            .map(|c| {
                Ok(PatternCount {
                    form: c[0].to_string(),
                    count: p.num(i + 1, c[1], "count")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        table.insert(WordKey::from_stripped(cols[0]), PatternEntry::new(patterns));
    }

    let lexicons = crate::features::Lexicons {
        classes: WordClassSet::parse(body("CLASSES").unwrap_or(""), source_name, &map)?,
        tags: body("TAGS").map(|s| TagLexicon::parse(s, source_name, &map)).transpose()?,
        lemmas: body("LEMMAS").map(|s| LemmaLexicon::parse(s, source_name, &map)).transpose()?,
    };

    let mut class_assignment = BTreeMap::new();
    for (i, line) in body("ASSIGN").unwrap_or("").lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [key, class, slots] = cols[..] else {
            return Err(p.err(i + 1, "expected `key<TAB>class<TAB>slot patterns`"));
        };
        let slots = slots
            .split(',')
            .map(|s| p.num(i + 1, s, "pattern id").map(PatternId))
            .collect::<Result<Vec<_>>>()?;
        class_assignment.insert(
            WordKey::from_stripped(key),
            ClassAssignment {
                class: class.to_string(),
                slots,
            },
        );
    }

    let mut word_lists = BTreeMap::new();
    let mut class_lists = BTreeMap::new();
    for d in lists {
        let start = d.start;
        let list = finish_list(&p, d, &settings.features)?;
        let dup = match list.target().clone() {
            ListTarget::Word(w) => word_lists.insert(w, list).is_some(),
            ListTarget::Class(c) => class_lists.insert(c, list).is_some(),
        };
        if dup {
            return Err(p.err(start, "duplicate list target"));
        }
    }
    for (k, a) in &class_assignment {
        if !class_lists.contains_key(&a.class) {
            return Err(p.err(2, format!("`{k}` assigned to missing class list `{}`", a.class)));
        }
    }

    Ok(Model {
        settings,
        map,
        table,
        lexicons,
        word_lists,
        class_lists,
        class_assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Lexicons;
    use crate::text::Language;

    fn sample() -> Model {
        let map = DiacriticMap::for_language(Language::Spanish);
        let mut table = PatternTable::default();
        let pc = |f: &str, c| PatternCount { form: f.into(), count: c };
        table.insert(
            WordKey::from_stripped("terminara"),
            PatternEntry::new(vec![pc("terminara", 31), pc("terminará", 13)]),
        );
        table.insert(
            WordKey::from_stripped("llegara"),
            PatternEntry::new(vec![pc("llegará", 10), pc("llegara", 4)]),
        );
        let lexicons = Lexicons {
            classes: WordClassSet::parse("WEEKDAY\tdomingo lunes\n", "c", &map).unwrap(),
            tags: Some(TagLexicon::parse("de\tPREP\nque\tCONJ,PRON\n", "t", &map).unwrap()),
            lemmas: Some(LemmaLexicon::parse("fue\tser\n", "l", &map).unwrap()),
        };
        let features = FeatureConfig {
            suffix_lengths: vec![2],
            ..Default::default()
        };
        let e = |f: Feature, ll: f64, c: u16, counts: Vec<u32>| DecisionEntry {
            feature: f,
            log_likelihood: ll,
            classification: PatternId(c),
            counts,
        };
        let word = DecisionList::sorted(
            ListTarget::Word(WordKey::from_stripped("terminara")),
            vec!["terminara".into(), "terminará".into()],
            features.with_window(4),
            vec![
                e(
                    Feature::TagPair {
                        span: PairSpan::Left,
                        first: Atom::Tag("PREP".into()),
                        second: Atom::Word("que".into()),
                    },
                    (31.1f64 / 0.1).log2(),
                    0,
                    vec![31, 0],
                ),
                e(Feature::pair(PairSpan::Around, "que", "el"), 3.1, 1, vec![0, 2]),
                e(Feature::word_at(1, "el"), 2.0, 1, vec![1, 4]),
                e(Feature::window("domingo"), 1.1, 1, vec![0, 5]),
                e(Feature::ClassAt { offset: -1, class: "WEEKDAY".into() }, 1.0, 0, vec![3, 1]),
                e(Feature::TagAt { offset: 1, tag: "CONJ-PRON".into() }, 0.9, 0, vec![3, 1]),
                e(Feature::LemmaWindow("ser".into()), 0.8, 0, vec![3, 1]),
                e(Feature::SuffixAt { offset: -1, suffix: "os".into() }, 0.7, 0, vec![3, 1]),
            ],
            PatternId(0),
        );
        let class = DecisionList::sorted(
            ListTarget::Class("ARA".into()),
            vec!["ara".into(), "ará".into()],
            features.clone(),
            vec![e(Feature::ClassWindow("WEEKDAY".into()), 6.6432, 1, vec![0, 9])],
            PatternId(1),
        );
        let mut model = Model {
            settings: ModelSettings {
                language: "es".into(),
                features,
                smoothing: Smoothing::new(0.15).unwrap(),
                interpolation: Interpolation::new(0.7, 0.3).unwrap(),
                min_count: 2,
                prune_cv: true,
                prune_unused: true,
            },
            map,
            table,
            lexicons,
            ..Default::default()
        };
        model.word_lists.insert(WordKey::from_stripped("terminara"), word);
        model.class_lists.insert("ARA".into(), class);
        model.class_assignment.insert(
            WordKey::from_stripped("llegara"),
            ClassAssignment {
                class: "ARA".into(),
                slots: vec![PatternId(1), PatternId(0)],
            },
        );
        model
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let text = serialize(&m);
        let back = parse(&text, "m").unwrap();
        assert_eq!(back, m);
        assert_eq!(serialize(&back), text);
        assert!(text.contains("8.2808\tterminara\ttagpair\t-2,-1\tt:PREP\tw:que\t31,0\n"));
    }

    #[test]
    fn hand_edit_reloads() {
        let text = serialize(&sample()).replace("2.0000\tterminará\tword\t+1\tel", "2.0000\tterminara\tword\t+1\tel");
        let m = parse(&text, "m").unwrap();
        let e = &m.word_lists[&WordKey::from_stripped("terminara")].entries()[2];
        assert_eq!(e.classification, PatternId(0));
    }

    fn err_line(text: &str) -> usize {
        match parse(text, "m") {
            Err(Error::Format { line, .. }) => line,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = serialize(&sample());
        let nth = |pat: &str| text.lines().position(|l| l.starts_with(pat)).unwrap() + 1;
        assert_eq!(err_line("hello"), 1);
        assert_eq!(err_line(&text.replace("accentdl-model\t1", "accentdl-model\t9")), 1);
        let bad = text.replace("3.1000\tterminará\tpair", "3.1000\tterminará\tpear");
        assert_eq!(err_line(&bad), nth("3.1000"));
        let bad = text.replace("default\tterminara", "default\tnope");
        assert_eq!(err_line(&bad), nth("default\tterminara"));
        let bad = text.replace("llegara\tllegará\t10", "llegara\tllegará\tten");
        assert_eq!(err_line(&bad), nth("llegara\tllegará"));
        let bad = text.replace("que\tCONJ", "que CONJ");
        assert_eq!(err_line(&bad), nth("que\tCONJ"));
        let bad = text.replace("alpha\t0.15", "alpha\t0");
        assert_eq!(err_line(&bad), nth("alpha"));
    }
}
