//! Decision lists: counting collocational distributions, ranking evidence by
//! smoothed log-likelihood, optional residual interpolation, pruning, and
//! class-pooled lists for families of similar ambiguities.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::corpus::{PatternEntry, PatternId, TrainingInstance};
use crate::error::{Error, Result};
use crate::features::{extract_features, implied_features, Feature, FeatureConfig, Lexicons};
use crate::text::{lowercase_nfc, DiacriticMap, WordKey};

/// Additive smoothing constant added to every count before taking ratios.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Smoothing {
    alpha: f64,
}

impl Smoothing {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Smoothing { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing { alpha: 0.1 }
    }
}

/// Mixing weights between global and residual estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interpolation {
    beta: f64,
    gamma: f64,
}

impl Interpolation {
    pub const GLOBAL_ONLY: Interpolation = Interpolation {
        beta: 1.0,
        gamma: 0.0,
    };

    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if !ok(beta) || !ok(gamma) || (beta + gamma - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "beta and gamma must be in [0, 1] and sum to 1, got {beta} and {gamma}"
            )));
        }
        Ok(Interpolation { beta, gamma })
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    pub fn gamma(self) -> f64 {
        self.gamma
    }
}

impl Default for Interpolation {
    fn default() -> Self {
        Self::GLOBAL_ONLY
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Minimum total count for positional (word, pair, class, tag, suffix) features.
    pub min_positional: u32,
    /// Minimum total count for window features.
    pub min_windowed: u32,
    /// Skip pairs whose single-word component already has a one-sided distribution.
    pub suppress_dependent_pairs: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            min_positional: 1,
            min_windowed: 2,
            suppress_dependent_pairs: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildOptions {
    pub smoothing: Smoothing,
    pub counting: CountOptions,
}

/// Per-feature pattern counts over a set of training instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureDistribution {
    n_patterns: usize,
    counts: HashMap<Feature, Vec<u32>>,
}

impl FeatureDistribution {
    pub fn n_patterns(&self) -> usize {
        self.n_patterns
    }

    pub fn get(&self, f: &Feature) -> Option<&[u32]> {
        self.counts.get(f).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Feature, &[u32])> {
        self.counts.iter().map(|(f, c)| (f, c.as_slice()))
    }
}

fn one_sided(counts: &[u32]) -> bool {
    counts.iter().filter(|&&c| c > 0).count() == 1
}

/// Counts, for every feature of every instance, how often it occurs with each label.
pub fn count_distributions(
    instances: &[TrainingInstance],
    n_patterns: usize,
    cfg: &FeatureConfig,
    lex: &Lexicons,
    opts: &CountOptions,
) -> Result<FeatureDistribution> {
    if instances.is_empty() {
        return Err(Error::InsufficientTrainingData("no training instances".into()));
    }
    let mut counts: HashMap<Feature, Vec<u32>> = HashMap::new();
    for inst in instances {
        let label = inst.label.index();
        if label >= n_patterns {
            return Err(Error::InsufficientTrainingData(format!(
                "label {label} out of range for {n_patterns} patterns"
            )));
        }
        for f in extract_features(&inst.context, cfg, lex) {
            counts.entry(f).or_insert_with(|| vec![0; n_patterns])[label] += 1;
        }
    }

    if opts.suppress_dependent_pairs && cfg.word_at {
        let unambiguous_word = |offset: i8, w: &str| {
            counts
                .get(&Feature::word_at(offset, w))
                .is_some_and(|c| one_sided(c))
        };
        let dependent: Vec<Feature> = counts
            .keys()
            .filter(|f| match f {
                Feature::Pair { span, first, second } => {
                    let (a, b) = span.offsets();
                    (a.abs() == 1 && unambiguous_word(a, first))
                        || (b.abs() == 1 && unambiguous_word(b, second))
                }
                _ => false,
            })
            .cloned()
            .collect();
        for f in dependent {
            counts.remove(&f);
        }
    }

    counts.retain(|f, c| {
        let total: u32 = c.iter().sum();
        let min = if f.is_windowed() {
            opts.min_windowed
        } else {
            opts.min_positional
        };
        total >= min.max(1)
    });
    Ok(FeatureDistribution { n_patterns, counts })
}

/// Best label and its log-likelihood against the strongest competitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Score {
    pub classification: PatternId,
    pub log_likelihood: f64,
}

/// Orders labels for argmax ties: higher global count first, then lower id.
fn better_label(a: usize, b: usize, global: &[u64]) -> bool {
    let ga = global.get(a).copied().unwrap_or(0);
    let gb = global.get(b).copied().unwrap_or(0);
    ga > gb || (ga == gb && a < b)
}

fn argmax_runner_up<T: Copy + PartialOrd>(values: &[T], global: &[u64]) -> (usize, Option<usize>) {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] || (values[i] == values[best] && better_label(i, best, global)) {
            best = i;
        }
    }
    let mut runner: Option<usize> = None;
    for i in (0..values.len()).filter(|&i| i != best) {
        runner = match runner {
            None => Some(i),
            Some(r) if values[i] > values[r] => Some(i),
            r => r,
        };
    }
    (best, runner)
}

/// `log2((c_best + α) / (c_runner_up + α))`. With two patterns this is the
/// absolute log ratio of the smoothed conditional probabilities.
pub fn log_likelihood(counts: &[u32], smoothing: Smoothing, global: &[u64]) -> Score {
    let alpha = smoothing.alpha();
    let (best, runner) = argmax_runner_up(counts, global);
    let top = counts.get(best).copied().unwrap_or(0) as f64 + alpha;
    let second = runner.map_or(0.0, |r| counts[r] as f64) + alpha;
    Score {
        classification: PatternId(best as u16),
        log_likelihood: (top / second).log2(),
    }
}

/// What a list disambiguates: one word, or a pooled ambiguity class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ListTarget {
    Word(WordKey),
    Class(String),
}

impl fmt::Display for ListTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListTarget::Word(w) => write!(f, "word {w}"),
            ListTarget::Class(c) => write!(f, "class {c}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecisionEntry {
    pub feature: Feature,
    pub log_likelihood: f64,
    pub classification: PatternId,
    pub counts: Vec<u32>,
}

impl DecisionEntry {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

/// Entries compare equal when their log-likelihoods agree to four decimals,
/// the precision kept in model files.
impl PartialEq for DecisionEntry {
    fn eq(&self, other: &Self) -> bool {
        self.feature == other.feature
            && self.classification == other.classification
            && self.counts == other.counts
            && round4(self.log_likelihood) == round4(other.log_likelihood)
    }
}

pub(crate) fn round4(x: f64) -> i64 {
    (x * 1e4).round() as i64
}

/// Rank order: log-likelihood descending, then larger raw total, then feature.
pub fn entry_order(a: &DecisionEntry, b: &DecisionEntry) -> Ordering {
    b.log_likelihood
        .total_cmp(&a.log_likelihood)
        .then_with(|| b.total().cmp(&a.total()))
        .then_with(|| a.feature.cmp(&b.feature))
}

/// Ordered evidence for one ambiguity, applied by first match, with a
/// DEFAULT classification when nothing matches.
#[derive(Clone, Debug)]
pub struct DecisionList {
    target: ListTarget,
    labels: Vec<String>,
    config: FeatureConfig,
    entries: Vec<DecisionEntry>,
    default: PatternId,
    index: HashMap<Feature, usize>,
}

impl PartialEq for DecisionList {
    fn eq(&self, other: &Self) -> bool {
        self.target == other.target
            && self.labels == other.labels
            && self.config == other.config
            && self.entries == other.entries
            && self.default == other.default
    }
}

impl DecisionList {
    /// Keeps `entries` in the given order; first occurrence wins for duplicate features.
    pub fn new(
        target: ListTarget,
        labels: Vec<String>,
        config: FeatureConfig,
        entries: Vec<DecisionEntry>,
        default: PatternId,
    ) -> Self {
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            index.entry(e.feature.clone()).or_insert(i);
        }
        DecisionList {
            target,
            labels,
            config,
            entries,
            default,
            index,
        }
    }

    pub fn sorted(
        target: ListTarget,
        labels: Vec<String>,
        config: FeatureConfig,
        mut entries: Vec<DecisionEntry>,
        default: PatternId,
    ) -> Self {
        entries.sort_by(entry_order);
        Self::new(target, labels, config, entries, default)
    }

    /// A list holding only its DEFAULT.
    pub fn default_only(target: ListTarget, labels: Vec<String>, config: FeatureConfig, default: PatternId) -> Self {
        Self::new(target, labels, config, Vec::new(), default)
    }

    pub fn target(&self) -> &ListTarget {
        &self.target
    }

    /// Display names of the pattern ids (accent patterns or class slots).
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn window(&self) -> usize {
        self.config.window
    }

    pub fn entries(&self) -> &[DecisionEntry] {
        &self.entries
    }

    pub fn default(&self) -> PatternId {
        self.default
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn label(&self, id: PatternId) -> &str {
        &self.labels[id.index()]
    }

    pub fn features(&self, ctx: &crate::features::Context, lex: &Lexicons) -> Vec<Feature> {
        extract_features(ctx, &self.config, lex)
    }

    /// Index of the highest entry whose feature is in `features`.
    pub fn first_match(&self, features: &[Feature]) -> Option<usize> {
        features.iter().filter_map(|f| self.index.get(f).copied()).min()
    }

    pub fn classify_features(&self, features: &[Feature]) -> PatternId {
        self.first_match(features)
            .map_or(self.default, |i| self.entries[i].classification)
    }

    fn retain(&self, keep: impl Fn(usize) -> bool) -> DecisionList {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, e)| e.clone())
            .collect();
        Self::new(
            self.target.clone(),
            self.labels.clone(),
            self.config.clone(),
            entries,
            self.default,
        )
    }

    pub fn is_sorted(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| entry_order(&w[0], &w[1]) == Ordering::Less)
    }
}

/// Index of the most frequent label, ties toward the lower id.
pub fn majority(global: &[u64]) -> PatternId {
    let (best, _) = argmax_runner_up(global, global);
    PatternId(best as u16)
}

/// Builds the sorted list over global statistics.
///
/// `global` holds the target's overall pattern counts; it decides the
/// DEFAULT and breaks argmax ties.
pub fn build_list(
    target: ListTarget,
    labels: Vec<String>,
    global: &[u64],
    instances: &[TrainingInstance],
    cfg: &FeatureConfig,
    lex: &Lexicons,
    opts: &BuildOptions,
) -> Result<DecisionList> {
    let default = majority(global);
    let dist = count_distributions(instances, labels.len(), cfg, lex, &opts.counting)?;
    let distinct: HashSet<PatternId> = instances.iter().map(|i| i.label).collect();
    if distinct.len() < 2 {
        return Ok(DecisionList::default_only(target, labels, cfg.clone(), default));
    }
    let entries = dist
        .counts
        .into_iter()
        .map(|(feature, counts)| {
            let score = log_likelihood(&counts, opts.smoothing, global);
            DecisionEntry {
                feature,
                log_likelihood: score.log_likelihood,
                classification: score.classification,
                counts,
            }
        })
        .collect();
    Ok(DecisionList::sorted(target, labels, cfg.clone(), entries, default))
}

/// For each entry, label counts of the instances whose first match it is.
///
/// These are exactly the residual instances (unmatched by every higher entry)
/// that contain the entry's feature.
pub fn residual_counts(list: &DecisionList, instances: &[TrainingInstance], lex: &Lexicons) -> Vec<Vec<u32>> {
    let n = list.labels.len();
    let mut out = vec![vec![0u32; n]; list.len()];
    for inst in instances {
        let feats = list.features(&inst.context, lex);
        if let Some(i) = list.first_match(&feats) {
            out[i][inst.label.index()] += 1;
        }
    }
    out
}

/// Re-estimates every entry as `β·global + γ·residual` and re-sorts.
pub fn interpolate_residual(
    list: &DecisionList,
    instances: &[TrainingInstance],
    lex: &Lexicons,
    ic: Interpolation,
    smoothing: Smoothing,
    global: &[u64],
) -> DecisionList {
    if ic.gamma() == 0.0 {
        return list.clone();
    }
    let alpha = smoothing.alpha();
    let n = list.labels.len() as f64;
    let residual = residual_counts(list, instances, lex);
    let probs = |c: &[u32]| -> Vec<f64> {
        let total: f64 = c.iter().map(|&x| x as f64).sum();
        c.iter().map(|&x| (x as f64 + alpha) / (total + n * alpha)).collect()
    };
    let entries = list
        .entries
        .iter()
        .zip(&residual)
        .map(|(e, r)| {
            let pg = probs(&e.counts);
            let pr = probs(r);
            let mixed: Vec<f64> = pg
                .iter()
                .zip(&pr)
                .map(|(g, r)| ic.beta() * g + ic.gamma() * r)
                .collect();
            let (best, runner) = argmax_runner_up(&mixed, global);
            let ll = runner.map_or(0.0, |r| (mixed[best] / mixed[r]).log2());
            DecisionEntry {
                feature: e.feature.clone(),
                log_likelihood: ll,
                classification: PatternId(best as u16),
                counts: e.counts.clone(),
            }
        })
        .collect();
    DecisionList::sorted(
        list.target.clone(),
        list.labels.clone(),
        list.config.clone(),
        entries,
        list.default,
    )
}

/// Drops entries shadowed by a higher entry that is present whenever they are
/// (a word under its class, tag or lemma; a pair under one of its words).
pub fn prune_subsumption(list: &DecisionList, lex: &Lexicons) -> DecisionList {
    let mut above: HashSet<&Feature> = HashSet::with_capacity(list.len());
    let mut keep = Vec::with_capacity(list.len());
    for e in &list.entries {
        let shadowed = implied_features(&e.feature, &list.config, lex)
            .iter()
            .any(|g| above.contains(g));
        keep.push(!shadowed);
        above.insert(&e.feature);
    }
    list.retain(|i| keep[i])
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CvStats {
    pub passes: usize,
    pub removed: usize,
}

const MAX_CV_PASSES: usize = 10;

/// Removes entries that, as first match, classify more cv instances wrongly
/// than rightly. Repeats until nothing changes (at most ten passes).
pub fn prune_cross_validation(
    list: &DecisionList,
    cv: &[TrainingInstance],
    lex: &Lexicons,
) -> (DecisionList, CvStats) {
    let feats: Vec<Vec<Feature>> = cv.iter().map(|i| list.features(&i.context, lex)).collect();
    let mut current = list.clone();
    let mut stats = CvStats::default();
    while stats.passes < MAX_CV_PASSES {
        stats.passes += 1;
        let mut right = vec![0usize; current.len()];
        let mut wrong = vec![0usize; current.len()];
        for (inst, f) in cv.iter().zip(&feats) {
            if let Some(i) = current.first_match(f) {
                if current.entries[i].classification == inst.label {
                    right[i] += 1;
                } else {
                    wrong[i] += 1;
                }
            }
        }
        let bad: Vec<bool> = (0..current.len()).map(|i| wrong[i] > right[i]).collect();
        let n_bad = bad.iter().filter(|b| **b).count();
        if n_bad == 0 {
            break;
        }
        stats.removed += n_bad;
        current = current.retain(|i| !bad[i]);
    }
    (current, stats)
}

/// Removes entries that are never the first match on the cv instances.
pub fn prune_unused(list: &DecisionList, cv: &[TrainingInstance], lex: &Lexicons) -> Result<DecisionList> {
    if cv.is_empty() {
        return Err(Error::InsufficientCvData);
    }
    let mut used = vec![false; list.len()];
    for inst in cv {
        if let Some(i) = list.first_match(&list.features(&inst.context, lex)) {
            used[i] = true;
        }
    }
    Ok(list.retain(|i| used[i]))
}

/// Fraction of instances the list labels correctly; `None` for an empty set.
pub fn accuracy(list: &DecisionList, instances: &[TrainingInstance], lex: &Lexicons) -> Option<f64> {
    if instances.is_empty() {
        return None;
    }
    let correct = instances
        .iter()
        .filter(|i| list.classify_features(&list.features(&i.context, lex)) == i.label)
        .count();
    Some(correct as f64 / instances.len() as f64)
}

/// A family of words sharing one suffix-level accent ambiguity, e.g.
/// `-ara/-ará`. Slot `j` of the class corresponds to suffix `slots[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityClassSpec {
    pub name: String,
    pub slots: Vec<String>,
    /// Explicit members; `None` means every aligned ambiguous key.
    pub members: Option<Vec<WordKey>>,
}

impl AmbiguityClassSpec {
    /// `NAME<TAB>suffix1,suffix2[<TAB>member1 member2 ...]` per line.
    pub fn parse_file(src: &str, source_name: &str, map: &DiacriticMap) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let name = cols.next().unwrap_or_default().trim();
            let slots: Vec<String> = cols
                .next()
                .unwrap_or_default()
                .split(',')
                .map(|s| lowercase_nfc(s.trim().trim_start_matches('-')))
                .filter(|s| !s.is_empty())
                .collect();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::format(source_name, idx + 1, "missing or invalid class name"));
            }
            let members = cols
                .next()
                .map(|m| m.split_whitespace().map(|w| map.strip(w)).collect());
            let spec = AmbiguityClassSpec {
                name: name.to_string(),
                slots,
                members,
            };
            spec.validate(map)
                .map_err(|e| Error::format(source_name, idx + 1, e.to_string()))?;
            out.push(spec);
        }
        Ok(out)
    }

    pub fn validate(&self, map: &DiacriticMap) -> Result<()> {
        let err = |message: &str| Error::AmbiguityClass {
            name: self.name.clone(),
            message: message.to_string(),
        };
        if self.slots.len() < 2 {
            return Err(err("needs at least two suffix slots"));
        }
        let base = map.strip(&self.slots[0]);
        if self.slots.iter().any(|s| map.strip(s) != base) {
            return Err(err("slot suffixes must share one de-accented spelling"));
        }
        let distinct: HashSet<&String> = self.slots.iter().collect();
        if distinct.len() != self.slots.len() {
            return Err(err("duplicate slot suffix"));
        }
        Ok(())
    }

    /// Pattern id of `entry` for each slot, if the key's patterns align
    /// one-to-one with the slots.
    pub fn slot_map(&self, key: &str, entry: &PatternEntry, map: &DiacriticMap) -> Option<Vec<PatternId>> {
        let plain = map.strip(&self.slots[0]);
        if !key.ends_with(plain.as_str()) || entry.patterns().len() != self.slots.len() {
            return None;
        }
        let stem_chars = key.chars().count() - plain.chars().count();
        let mut out = Vec::with_capacity(self.slots.len());
        for slot in &self.slots {
            let hits: Vec<usize> = entry
                .patterns()
                .iter()
                .enumerate()
                .filter(|(_, p)| p.form.chars().skip(stem_chars).collect::<String>() == *slot)
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [i] => out.push(PatternId(*i as u16)),
                _ => return None,
            }
        }
        let distinct: HashSet<&PatternId> = out.iter().collect();
        (distinct.len() == out.len()).then_some(out)
    }

    pub fn is_member(&self, key: &WordKey) -> bool {
        self.members.as_ref().is_none_or(|m| m.contains(key))
    }
}

/// How many contexts each member may contribute to the pooled training set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QuotaPolicy {
    /// Cap every member at the (lower) median member count.
    #[default]
    Median,
    Fixed(usize),
    Unlimited,
}

impl QuotaPolicy {
    pub fn quota(self, counts: &[usize]) -> usize {
        match self {
            QuotaPolicy::Median => {
                let mut c = counts.to_vec();
                c.sort_unstable();
                c.get((c.len().max(1) - 1) / 2).copied().unwrap_or(0)
            }
            QuotaPolicy::Fixed(n) => n,
            QuotaPolicy::Unlimited => usize::MAX,
        }
    }
}

/// Training data of one class member: its instances labelled with the
/// member's own pattern ids, and its slot mapping.
#[derive(Clone, Debug)]
pub struct ClassMember<'a> {
    pub key: WordKey,
    pub instances: &'a [TrainingInstance],
    pub slots: Vec<PatternId>,
}

impl ClassMember<'_> {
    /// Relabels instances from member pattern ids to class slot ids.
    pub fn to_slots(&self, instances: &[TrainingInstance]) -> Vec<TrainingInstance> {
        instances
            .iter()
            .filter_map(|i| {
                let slot = self.slots.iter().position(|p| *p == i.label)?;
                Some(TrainingInstance {
                    label: PatternId(slot as u16),
                    target: i.target.clone(),
                    context: i.context.clone(),
                })
            })
            .collect()
    }
}

/// Evenly spaced subsample of at most `quota` items, keeping order.
pub fn cap_evenly<T: Clone>(items: &[T], quota: usize) -> Vec<T> {
    if items.len() <= quota {
        return items.to_vec();
    }
    (0..quota).map(|i| items[i * items.len() / quota].clone()).collect()
}

/// Pools members' contexts, each capped by the quota policy, and builds one
/// list over class slots.
pub fn pooled_class_instances(members: &[ClassMember<'_>], quota: QuotaPolicy) -> Vec<TrainingInstance> {
    let counts: Vec<usize> = members.iter().map(|m| m.instances.len()).collect();
    let q = quota.quota(&counts);
    members
        .iter()
        .flat_map(|m| m.to_slots(&cap_evenly(m.instances, q)))
        .collect()
}

pub fn build_class_list(
    spec: &AmbiguityClassSpec,
    members: &[ClassMember<'_>],
    cfg: &FeatureConfig,
    lex: &Lexicons,
    opts: &BuildOptions,
    quota: QuotaPolicy,
) -> Result<DecisionList> {
    let trained: Vec<ClassMember<'_>> = members
        .iter()
        .filter(|m| !m.instances.is_empty())
        .cloned()
        .collect();
    if trained.len() < 2 {
        return Err(Error::AmbiguityClass {
            name: spec.name.clone(),
            message: format!("needs at least two members with training data, found {}", trained.len()),
        });
    }
    let pooled = pooled_class_instances(&trained, quota);
    let mut global = vec![0u64; spec.slots.len()];
    for i in &pooled {
        global[i.label.index()] += 1;
    }
    build_list(
        ListTarget::Class(spec.name.clone()),
        spec.slots.clone(),
        &global,
        &pooled,
        cfg,
        lex,
        opts,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListChoice {
    Word,
    Class,
}

/// Prefers the general class list unless it trails the word list by more than `delta`.
pub fn select_list(word_acc: f64, class_acc: f64, delta: f64) -> ListChoice {
    if class_acc + 1e-12 >= word_acc - delta {
        ListChoice::Class
    } else {
        ListChoice::Word
    }
}
