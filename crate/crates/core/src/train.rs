//! Training pipeline: pattern table, contexts, per-word lists with window
//! selection and pruning, then optional class lists.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{build_pattern_table, collect_all_contexts, Corpus, PatternTable, RawCorpus, TrainingInstance};
use crate::decision_list::{
    accuracy, build_class_list, build_list, interpolate_residual, prune_cross_validation, prune_subsumption,
    prune_unused, select_list, AmbiguityClassSpec, BuildOptions, ClassMember, DecisionList, Interpolation,
    ListChoice, ListTarget, QuotaPolicy,
};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, Lexicons};
use crate::restorer::{ClassAssignment, Model, ModelSettings};
use crate::text::{DiacriticMap, Language, WordKey};

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub language: Language,
    pub map: DiacriticMap,
    /// Feature families; its window is used for class lists and as the
    /// fallback when a word has no held-out data.
    pub features: FeatureConfig,
    /// Windows tried for word lists, chosen by held-out accuracy.
    pub window_candidates: Vec<usize>,
    pub build: BuildOptions,
    pub interpolation: Interpolation,
    pub prune_cv: bool,
    pub prune_unused: bool,
    pub min_count: u64,
    /// Fraction of each word's occurrences held out for selection and pruning.
    pub holdout: f64,
    pub seed: u64,
    pub lexicons: Lexicons,
    pub class_specs: Vec<AmbiguityClassSpec>,
    pub quota: QuotaPolicy,
    pub class_delta: f64,
}

impl TrainConfig {
    pub fn new(language: Language) -> Self {
        TrainConfig {
            language,
            map: DiacriticMap::for_language(language),
            features: FeatureConfig::default(),
            window_candidates: vec![4, 20],
            build: BuildOptions::default(),
            interpolation: Interpolation::default(),
            prune_cv: true,
            prune_unused: false,
            min_count: 1,
            holdout: 0.1,
            seed: 0,
            lexicons: Lexicons::default(),
            class_specs: Vec::new(),
            quota: QuotaPolicy::Median,
            class_delta: 0.01,
        }
    }

    /// Restricts word lists to a single window.
    pub fn with_window(mut self, k: usize) -> Self {
        self.window_candidates = vec![k];
        self.features.window = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        if self.window_candidates.is_empty() || self.window_candidates.contains(&0) {
            return Err(Error::Config("window candidates must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.holdout) {
            return Err(Error::Config(format!("holdout fraction {} not in [0, 1)", self.holdout)));
        }
        if self.min_count == 0 {
            return Err(Error::Config("min count must be at least 1".into()));
        }
        for spec in &self.class_specs {
            spec.validate(&self.map)?;
        }
        Ok(())
    }

    fn settings(&self) -> ModelSettings {
        ModelSettings {
            language: self.language.code().to_string(),
            features: self.features.clone(),
            smoothing: self.build.smoothing,
            interpolation: self.interpolation,
            min_count: self.min_count,
            prune_cv: self.prune_cv,
            prune_unused: self.prune_unused,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrainReport {
    pub words: usize,
    pub keys: usize,
    pub ambiguous_keys: usize,
    pub word_lists: usize,
    pub class_lists: usize,
    pub class_members: usize,
    pub entries: usize,
    /// Number of word lists per chosen window.
    pub windows: BTreeMap<usize, usize>,
    pub warnings: Vec<String>,
}

struct KeyData {
    key: WordKey,
    labels: Vec<String>,
    global: Vec<u64>,
    train: Vec<TrainingInstance>,
    holdout: Vec<TrainingInstance>,
}

impl KeyData {
    fn all(&self) -> Vec<TrainingInstance> {
        self.train.iter().chain(&self.holdout).cloned().collect()
    }
}

fn split(mut instances: Vec<TrainingInstance>, frac: f64, seed: u64) -> (Vec<TrainingInstance>, Vec<TrainingInstance>) {
    let n_hold = (instances.len() as f64 * frac).floor() as usize;
    if n_hold == 0 {
        return (instances, Vec::new());
    }
    let mut order: Vec<usize> = (0..instances.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut held = vec![false; instances.len()];
    for &i in &order[..n_hold] {
        held[i] = true;
    }
    let mut train = Vec::with_capacity(instances.len() - n_hold);
    let mut holdout = Vec::with_capacity(n_hold);
    for (i, inst) in instances.drain(..).enumerate() {
        if held[i] {
            holdout.push(inst);
        } else {
            train.push(inst);
        }
    }
    (train, holdout)
}

/// Interpolation and subsumption pruning.
fn prepare(list: DecisionList, train: &[TrainingInstance], global: &[u64], cfg: &TrainConfig) -> DecisionList {
    let list = interpolate_residual(&list, train, &cfg.lexicons, cfg.interpolation, cfg.build.smoothing, global);
    prune_subsumption(&list, &cfg.lexicons)
}

/// The optional cv and space pruning.
fn prune(list: &DecisionList, cv: &[TrainingInstance], cfg: &TrainConfig) -> Result<DecisionList> {
    let mut list = list.clone();
    if cfg.prune_cv {
        list = prune_cross_validation(&list, cv, &cfg.lexicons).0;
    }
    if cfg.prune_unused {
        list = prune_unused(&list, cv, &cfg.lexicons)?;
    }
    Ok(list)
}

/// Held-out accuracy of `list` pruned on `train` alone, so the held-out
/// data scores the list without having shaped it.
fn holdout_score(
    list: &DecisionList,
    train: &[TrainingInstance],
    holdout: &[TrainingInstance],
    cfg: &TrainConfig,
) -> Result<Option<f64>> {
    if holdout.is_empty() {
        return Ok(None);
    }
    Ok(accuracy(&prune(list, train, cfg)?, holdout, &cfg.lexicons))
}

struct WordOutcome {
    list: DecisionList,
    holdout_accuracy: Option<f64>,
}

fn train_word(kd: &KeyData, cfg: &TrainConfig) -> Result<WordOutcome> {
    let mut candidates = cfg.window_candidates.clone();
    candidates.sort_unstable();
    candidates.dedup();
    if kd.holdout.is_empty() {
        let k = if candidates.contains(&cfg.features.window) {
            cfg.features.window
        } else {
            *candidates.last().expect("validated")
        };
        candidates = vec![k];
    }
    let mut best: Option<(Option<f64>, DecisionList)> = None;
    for k in candidates {
        let list = build_list(
            ListTarget::Word(kd.key.clone()),
            kd.labels.clone(),
            &kd.global,
            &kd.train,
            &cfg.features.with_window(k),
            &cfg.lexicons,
            &cfg.build,
        )?;
        let list = prepare(list, &kd.train, &kd.global, cfg);
        let acc = holdout_score(&list, &kd.train, &kd.holdout, cfg)?;
        if best.as_ref().is_none_or(|(a, _)| acc.unwrap_or(0.0) > a.unwrap_or(0.0)) {
            best = Some((acc, list));
        }
    }
    let (holdout_accuracy, list) = best.expect("at least one candidate");
    Ok(WordOutcome {
        list: prune(&list, &kd.all(), cfg)?,
        holdout_accuracy,
    })
}

/// Runs the full pipeline on a raw corpus.
pub fn train(raw: &RawCorpus, cfg: &TrainConfig) -> Result<(Model, TrainReport)> {
    train_corpus(&Corpus::from_raw(raw, &cfg.map), cfg)
}

pub fn train_corpus(corpus: &Corpus, cfg: &TrainConfig) -> Result<(Model, TrainReport)> {
    cfg.validate()?;
    let words = corpus.word_count();
    if words == 0 {
        return Err(Error::EmptyCorpus);
    }
    let table = build_pattern_table(corpus, cfg.min_count);
    let max_k = cfg
        .window_candidates
        .iter()
        .copied()
        .chain([cfg.features.window])
        .max()
        .expect("nonempty");
    let contexts = collect_all_contexts(corpus, &table, max_k);

    let keyed: Vec<KeyData> = contexts
        .into_iter()
        .enumerate()
        .map(|(i, (key, instances))| {
            let entry = table.get(&key).expect("contexts come from the table");
            let (train, holdout) = split(
                instances,
                cfg.holdout,
                cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64),
            );
            KeyData {
                labels: entry.forms(),
                global: entry.counts(),
                key,
                train,
                holdout,
            }
        })
        .collect();

    let outcomes: Vec<WordOutcome> = keyed.par_iter().map(|kd| train_word(kd, cfg)).collect::<Result<_>>()?;
    let mut report = TrainReport {
        words,
        keys: table.len(),
        ambiguous_keys: table.ambiguous_keys().count(),
        ..Default::default()
    };
    if report.ambiguous_keys == 0 {
        report.warnings.push("corpus has no ambiguous words; model holds patterns only".into());
    }

    let word_acc: BTreeMap<WordKey, Option<f64>> = keyed
        .iter()
        .zip(&outcomes)
        .map(|(kd, o)| (kd.key.clone(), o.holdout_accuracy))
        .collect();
    let mut word_lists: BTreeMap<WordKey, DecisionList> =
        keyed.iter().map(|kd| kd.key.clone()).zip(outcomes.into_iter().map(|o| o.list)).collect();
    let (class_lists, class_assignment) = train_classes(&keyed, &table, &word_acc, cfg, &mut report.warnings);
    for k in class_assignment.keys() {
        word_lists.remove(k);
    }

    report.word_lists = word_lists.len();
    report.class_lists = class_lists.len();
    report.class_members = class_assignment.len();
    for l in word_lists.values() {
        *report.windows.entry(l.window()).or_default() += 1;
    }
    report.entries = word_lists.values().chain(class_lists.values()).map(DecisionList::len).sum();

    let model = Model {
        settings: cfg.settings(),
        map: cfg.map.clone(),
        table,
        lexicons: cfg.lexicons.clone(),
        word_lists,
        class_lists,
        class_assignment,
    };
    Ok((model, report))
}

type ClassOutcome = (BTreeMap<String, DecisionList>, BTreeMap<WordKey, ClassAssignment>);

fn train_classes(
    keyed: &[KeyData],
    table: &PatternTable,
    word_acc: &BTreeMap<WordKey, Option<f64>>,
    cfg: &TrainConfig,
    warnings: &mut Vec<String>,
) -> ClassOutcome {
    let mut lists = BTreeMap::new();
    let mut assignment = BTreeMap::new();
    for spec in &cfg.class_specs {
        let mut members = Vec::new();
        let mut holdouts = Vec::new();
        for kd in keyed {
            if assignment.contains_key(&kd.key) || !spec.is_member(&kd.key) {
                continue;
            }
            let entry = table.get(&kd.key).expect("key in table");
            if let Some(slots) = spec.slot_map(&kd.key, entry, &cfg.map) {
                members.push(ClassMember {
                    key: kd.key.clone(),
                    instances: &kd.train,
                    slots,
                });
                holdouts.push(&kd.holdout);
            }
        }
        if let Some(listed) = &spec.members {
            for m in listed {
                if !members.iter().any(|c| &c.key == m) {
                    warnings.push(format!("class {}: `{m}` is not an ambiguous word matching its suffixes", spec.name));
                }
            }
        }
        let list = match build_class_list(spec, &members, &cfg.features, &cfg.lexicons, &cfg.build, cfg.quota) {
            Ok(l) => l,
            Err(e) => {
                warnings.push(e.to_string());
                continue;
            }
        };
        let pooled_train: Vec<TrainingInstance> = members.iter().flat_map(|m| m.to_slots(m.instances)).collect();
        let pooled_cv: Vec<TrainingInstance> = members
            .iter()
            .zip(&holdouts)
            .flat_map(|(m, h)| m.to_slots(m.instances).into_iter().chain(m.to_slots(h)))
            .collect();
        let mut slot_counts = vec![0u64; spec.slots.len()];
        for i in &pooled_train {
            slot_counts[i.label.index()] += 1;
        }
        let list = prepare(list, &pooled_train, &slot_counts, cfg);
        let scored = prune(&list, &pooled_train, cfg);
        let list = scored.and_then(|scored| Ok((scored, prune(&list, &pooled_cv, cfg)?)));
        let (scored, list) = match list {
            Ok(l) => l,
            Err(e) => {
                warnings.push(format!("class {}: {e}", spec.name));
                continue;
            }
        };
        let mut used = false;
        for (m, h) in members.iter().zip(&holdouts) {
            let word_acc = word_acc[&m.key].unwrap_or(1.0);
            let class_acc = accuracy(&scored, &m.to_slots(h), &cfg.lexicons).unwrap_or(1.0);
            if select_list(word_acc, class_acc, cfg.class_delta) == ListChoice::Class {
                assignment.insert(
                    m.key.clone(),
                    ClassAssignment {
                        class: spec.name.clone(),
                        slots: m.slots.clone(),
                    },
                );
                used = true;
            }
        }
        if used {
            lists.insert(spec.name.clone(), list);
        }
    }
    (lists, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Feature;

    fn corpus(lines: &[&str]) -> RawCorpus {
        let mut text = String::new();
        for l in lines {
            text.push_str(&format!("<doc>\n{l}\n</doc>\n"));
        }
        RawCorpus::from_text(&text)
    }

    fn cote_lines() -> Vec<String> {
        let mut v = Vec::new();
        for i in 0..40 {
            v.push(format!("sur la côte ouest mot{}", i % 7));
            v.push(format!("de l'autre côté du pont mot{}", i % 5));
            v.push(format!("le côté droit mot{}", i % 3));
        }
        v
    }

    #[test]
    fn trains_word_lists() {
        let lines = cote_lines();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let cfg = TrainConfig::new(Language::French);
        let (model, report) = train(&corpus(&refs), &cfg).unwrap();
        assert_eq!(report.ambiguous_keys, 1);
        let list = &model.word_lists[&WordKey::from_stripped("cote")];
        assert!(list.is_sorted());
        assert_eq!(list.default(), PatternId(0));
        assert_eq!(list.label(PatternId(0)), "côté");
        let top = &list.entries()[0];
        assert_eq!(list.label(top.classification), "côte");
        assert!(matches!(top.feature, Feature::WordAt { .. } | Feature::Window(_) | Feature::Pair { .. }));
        let restored = crate::restorer::restore("la cote ouest", &model, Default::default());
        assert_eq!(restored, "la côte ouest");
    }

    use crate::corpus::PatternId;

    #[test]
    fn deterministic_for_seed() {
        let lines = cote_lines();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let cfg = TrainConfig::new(Language::French);
        let a = train(&corpus(&refs), &cfg).unwrap().0;
        let b = train(&corpus(&refs), &cfg).unwrap().0;
        assert_eq!(crate::model_file::serialize(&a), crate::model_file::serialize(&b));
    }

    #[test]
    fn empty_and_unambiguous_corpora() {
        let cfg = TrainConfig::new(Language::French);
        assert!(matches!(train(&corpus(&["", " ! "]), &cfg), Err(Error::EmptyCorpus)));
        let (m, r) = train(&corpus(&["il a été là", "été"]), &cfg).unwrap();
        assert!(m.word_lists.is_empty());
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(m.table.len(), 4);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = TrainConfig::new(Language::French);
        cfg.min_count = 0;
        assert!(matches!(train(&corpus(&["côte"]), &cfg), Err(Error::Config(_))));
        let cfg = TrainConfig::new(Language::French).with_window(0);
        assert!(train(&corpus(&["côte"]), &cfg).is_err());
    }

    #[test]
    fn class_lists_pool_members() {
        let mut lines = Vec::new();
        for w in ["terminara", "llegara", "pagara", "hablara"] {
            let fut = w.replace("ara", "ará");
            for i in 0..30 {
                lines.push(format!("el domingo {fut} x{i}"));
                lines.push(format!("antes de que {w} y{i}"));
            }
        }
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let mut cfg = TrainConfig::new(Language::Spanish);
        let map = cfg.map.clone();
        cfg.class_specs = AmbiguityClassSpec::parse_file("ARA\tara,ará\n", "s", &map).unwrap();
        let (model, report) = train(&corpus(&refs), &cfg).unwrap();
        assert_eq!(report.class_members, 4);
        assert!(model.word_lists.is_empty());
        assert_eq!(model.class_lists.len(), 1);
        let out = crate::restorer::restore("el domingo llegara", &model, Default::default());
        assert_eq!(out, "el domingo llegará");
        let out = crate::restorer::restore("antes de que pagara", &model, Default::default());
        assert_eq!(out, "antes de que pagara");
        let text = crate::model_file::serialize(&model);
        assert_eq!(crate::model_file::parse(&text, "m").unwrap(), model);
    }
}
