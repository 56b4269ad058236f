//! Agreement with reference accents: strip, restore, compare.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::corpus::{word_stream, PatternTable, RawCorpus};
use crate::error::{Error, Result};
use crate::restorer::{restore_document, Model, RestoreOptions};
use crate::text::{lowercase_nfc, tokenize, TokenKind, WordKey};

/// Token counts: tested, agreeing with the reference, and matching the
/// training-majority pattern.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub n: u64,
    pub agree: u64,
    pub prior: u64,
}

impl Tally {
    pub fn agreement(&self) -> Option<f64> {
        (self.n > 0).then(|| self.agree as f64 / self.n as f64)
    }

    pub fn prior(&self) -> Option<f64> {
        (self.n > 0).then(|| self.prior as f64 / self.n as f64)
    }

    pub fn add(&mut self, other: &Tally) {
        self.n += other.n;
        self.agree += other.agree;
        self.prior += other.prior;
    }

    fn record(&mut self, agree: bool, prior: bool) {
        self.n += 1;
        self.agree += agree as u64;
        self.prior += prior as u64;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyRow {
    pub patterns: Vec<String>,
    pub tally: Tally,
}

/// Per-key rows for ambiguous words plus aggregates. Tokens whose key was not
/// seen in training are kept apart and excluded from agreement and prior.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalReport {
    pub rows: BTreeMap<WordKey, KeyRow>,
    pub ambiguous: Tally,
    pub unambiguous: Tally,
    pub unseen: Tally,
}

impl EvalReport {
    pub fn seen(&self) -> Tally {
        let mut t = self.ambiguous;
        t.add(&self.unambiguous);
        t
    }

    pub fn agreement(&self) -> Option<f64> {
        self.seen().agreement()
    }

    pub fn prior(&self) -> Option<f64> {
        self.seen().prior()
    }

    /// Occurrence-weighted merge.
    pub fn merge(&mut self, other: &EvalReport) {
        for (k, row) in &other.rows {
            let mine = self.rows.entry(k.clone()).or_default();
            for p in &row.patterns {
                if !mine.patterns.contains(p) {
                    mine.patterns.push(p.clone());
                }
            }
            mine.tally.add(&row.tally);
        }
        self.ambiguous.add(&other.ambiguous);
        self.unambiguous.add(&other.unambiguous);
        self.unseen.add(&other.unseen);
    }

    /// `key<TAB>N<TAB>agreement<TAB>prior`, one row per ambiguous key.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("key\tN\tagreement\tprior\n");
        for (k, r) in &self.rows {
            let _ = writeln!(
                out,
                "{k}\t{}\t{:.4}\t{:.4}",
                r.tally.n,
                r.tally.agreement().unwrap_or(0.0),
                r.tally.prior().unwrap_or(0.0)
            );
        }
        out
    }

    pub fn render(&self) -> String {
        let pct = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{:.1}%", v * 100.0));
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>8} {:>10} {:>8}  patterns", "word", "N", "agreement", "prior");
        for (k, r) in &self.rows {
            let _ = writeln!(
                out,
                "{:<24} {:>8} {:>10} {:>8}  {}",
                k.as_str(),
                r.tally.n,
                pct(r.tally.agreement()),
                pct(r.tally.prior()),
                r.patterns.join("/")
            );
        }
        let _ = writeln!(out);
        for (name, t) in [
            ("ambiguous tokens", self.ambiguous),
            ("unambiguous tokens", self.unambiguous),
            ("all seen tokens", self.seen()),
        ] {
            let _ = writeln!(
                out,
                "{name:<24} {:>8} {:>10} {:>8}",
                t.n,
                pct(t.agreement()),
                pct(t.prior())
            );
        }
        let _ = writeln!(
            out,
            "{:<24} {:>8} {:>10}",
            "unseen tokens",
            self.unseen.n,
            pct(self.unseen.agreement())
        );
        out
    }
}

/// Fraction of occurrences whose form is their key's training-majority pattern.
/// Occurrences of keys absent from `table` are counted separately.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorBaseline {
    pub prior: Option<f64>,
    pub seen: u64,
    pub unseen: u64,
}

pub fn prior_baseline<'a>(
    table: &PatternTable,
    test: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> PriorBaseline {
    let (mut seen, mut hits, mut unseen) = (0u64, 0u64, 0u64);
    for (key, form) in test {
        match table.get(key) {
            Some(e) => {
                seen += 1;
                hits += (e.majority() == form) as u64;
            }
            None => unseen += 1,
        }
    }
    PriorBaseline {
        prior: (seen > 0).then(|| hits as f64 / seen as f64),
        seen,
        unseen,
    }
}

fn evaluate_document(model: &Model, doc: &str) -> EvalReport {
    let mut report = EvalReport::default();
    let stripped = model.map.remove_accents(doc);
    let (restored, _) = restore_document(&stripped, model, RestoreOptions::default());
    let words = |s: &str| -> Vec<String> {
        tokenize(s)
            .into_iter()
            .filter(|t| t.kind == TokenKind::Word)
            .map(|t| t.surface.to_string())
            .collect()
    };
    let original = words(doc);
    let output = words(&restored);
    debug_assert_eq!(original.len(), output.len());
    for (orig, got) in original.iter().zip(&output) {
        let key = model.map.strip(orig);
        let form = lowercase_nfc(orig);
        let agree = lowercase_nfc(got) == form;
        match model.table.get(&key) {
            None => report.unseen.record(agree, false),
            Some(e) => {
                let prior = e.majority() == form;
                if e.is_ambiguous() {
                    report.ambiguous.record(agree, prior);
                    let row = report.rows.entry(key).or_insert_with(|| KeyRow {
                        patterns: e.forms(),
                        tally: Tally::default(),
                    });
                    row.tally.record(agree, prior);
                } else {
                    report.unambiguous.record(agree, prior);
                }
            }
        }
    }
    report
}

/// Strips `test`, restores it with `model` and measures agreement with the original.
pub fn evaluate_split(model: &Model, test: &RawCorpus) -> Result<EvalReport> {
    evaluate_documents(model, &test.documents())
}

pub fn evaluate_documents<S: AsRef<str> + Sync>(model: &Model, docs: &[S]) -> Result<EvalReport> {
    let report = docs
        .par_iter()
        .map(|d| evaluate_document(model, d.as_ref()))
        .reduce(EvalReport::default, |mut a, b| {
            a.merge(&b);
            a
        });
    if report.seen().n + report.unseen.n == 0 {
        return Err(Error::EmptyTestSet);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KFoldReport {
    pub folds: Vec<EvalReport>,
    pub merged: EvalReport,
}

impl KFoldReport {
    /// Unweighted mean of per-fold ambiguous-token agreement.
    pub fn mean_fold_agreement(&self) -> Option<f64> {
        let v: Vec<f64> = self.folds.iter().filter_map(|r| r.ambiguous.agreement()).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Trains on each `folds - 1` blocks and tests on the remaining one; folds
/// run in parallel and merge by occurrence count.
pub fn kfold<F>(corpus: &RawCorpus, folds: usize, train: F) -> Result<KFoldReport>
where
    F: Fn(&RawCorpus) -> Result<Model> + Sync,
{
    let splits = corpus.folds(folds)?;
    let folds: Vec<EvalReport> = splits
        .par_iter()
        .map(|(tr, te)| evaluate_split(&train(tr)?, te))
        .collect::<Result<_>>()?;
    let mut merged = EvalReport::default();
    for f in &folds {
        merged.merge(f);
    }
    Ok(KFoldReport { folds, merged })
}

/// Outcome of single-best-evidence vs. summed-evidence classification on
/// each ambiguous token. With more than two patterns the classifiers can
/// disagree with neither correct.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComparisonTable {
    pub both_correct: u64,
    pub both_wrong: u64,
    pub best_only: u64,
    pub combined_only: u64,
    pub disagree_neither: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignTest {
    pub p_value: f64,
    pub z: f64,
}

impl ComparisonTable {
    pub fn n(&self) -> u64 {
        self.both_correct + self.both_wrong + self.best_only + self.combined_only + self.disagree_neither
    }

    pub fn disagreements(&self) -> u64 {
        self.best_only + self.combined_only + self.disagree_neither
    }

    /// Cells as fractions of all compared tokens, in field order.
    pub fn fractions(&self) -> [f64; 5] {
        let n = self.n().max(1) as f64;
        [
            self.both_correct,
            self.both_wrong,
            self.best_only,
            self.combined_only,
            self.disagree_neither,
        ]
        .map(|c| c as f64 / n)
    }

    /// Two-sided binomial sign test on the disagreements where exactly one
    /// classifier is right.
    pub fn sign_test(&self) -> SignTest {
        let m = self.best_only + self.combined_only;
        if m == 0 {
            return SignTest { p_value: 1.0, z: 0.0 };
        }
        let b = Binomial::new(0.5, m).expect("valid binomial");
        let k = self.best_only.min(self.combined_only);
        let p_value = (2.0 * b.cdf(k)).min(1.0);
        let z = (self.best_only as f64 - self.combined_only as f64) / (m as f64).sqrt();
        SignTest { p_value, z }
    }

    pub fn merge(&mut self, o: &ComparisonTable) {
        self.both_correct += o.both_correct;
        self.both_wrong += o.both_wrong;
        self.best_only += o.best_only;
        self.combined_only += o.combined_only;
        self.disagree_neither += o.disagree_neither;
    }

    pub fn render(&self) -> String {
        let f = self.fractions();
        let s = self.sign_test();
        let mut out = String::new();
        for (name, v, c) in [
            ("both classifications correct", f[0], self.both_correct),
            ("both classifications wrong", f[1], self.both_wrong),
            ("single best evidence correct", f[2], self.best_only),
            ("combined evidence correct", f[3], self.combined_only),
            ("disagree, neither correct", f[4], self.disagree_neither),
        ] {
            let _ = writeln!(out, "{name:<30} {:>6.2}% {c:>8}", v * 100.0);
        }
        let _ = writeln!(out, "sign test: p = {:.4}, z = {:.2}", s.p_value, s.z);
        out
    }
}

fn compare_document(model: &Model, doc: &str) -> ComparisonTable {
    let mut t = ComparisonTable::default();
    let reference = word_stream(doc, &model.map);
    let stripped = word_stream(&model.map.remove_accents(doc), &model.map);
    for (i, (r, w)) in reference.iter().zip(&stripped).enumerate() {
        let (Some(best), Some(comb)) = (model.decide(&w.key, &stripped, i), model.decide_combined(&w.key, &stripped, i))
        else {
            continue;
        };
        if best.list.is_none() {
            continue;
        }
        let (b, c) = (best.form == r.form, comb.form == r.form);
        match (best.pattern == comb.pattern, b, c) {
            (true, true, _) => t.both_correct += 1,
            (true, false, _) => t.both_wrong += 1,
            (false, true, _) => t.best_only += 1,
            (false, false, true) => t.combined_only += 1,
            (false, false, false) => t.disagree_neither += 1,
        }
    }
    t
}

/// Classifies every ambiguous test token both ways and tallies the outcomes.
pub fn compare_best_vs_combined(model: &Model, test: &RawCorpus) -> ComparisonTable {
    test.documents()
        .par_iter()
        .map(|d| compare_document(model, d))
        .reduce(ComparisonTable::default, |mut a, b| {
            a.merge(&b);
            a
        })
}
