//! Planted corpora with a known answer: each ambiguous key has one trigger
//! word per accent pattern, placed within ±window of every occurrence.

use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub keys: usize,
    pub occurrences: usize,
    /// Probability that an occurrence carries the pattern its trigger does not predict.
    pub noise: f64,
    /// Probability that an occurrence gets a trigger at all.
    pub trigger_rate: f64,
    /// Maximum trigger distance; also the context length on each side.
    pub window: usize,
    /// Filler vocabulary size; fillers are drawn with Zipfian frequencies.
    pub fillers: usize,
    /// Zipf exponent; 0 gives uniform fillers.
    pub zipf: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            keys: 10,
            occurrences: 10_000,
            noise: 0.0,
            trigger_rate: 1.0,
            window: 8,
            fillers: 2000,
            zipf: 1.0,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedKey {
    pub key: String,
    /// Plain and accented forms.
    pub forms: [String; 2],
    pub triggers: [String; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthCorpus {
    /// One `<doc>` block per occurrence.
    pub text: String,
    pub keys: Vec<PlantedKey>,
}

const CONSONANTS: &[u8] = b"bcdfghjklmnpqrstvwxz";

/// Distinct consonant-only code for `i`.
fn code(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push(CONSONANTS[i % CONSONANTS.len()] as char);
        i /= CONSONANTS.len();
        if i == 0 {
            return s;
        }
    }
}

pub fn planted_keys(n: usize) -> Vec<PlantedKey> {
    (0..n)
        .map(|i| {
            let stem = format!("ka{}", code(i));
            PlantedKey {
                key: format!("{stem}ara"),
                forms: [format!("{stem}ara"), format!("{stem}ará")],
                triggers: [format!("tu{}", code(i)), format!("te{}", code(i))],
            }
        })
        .collect()
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.keys == 0 || cfg.window == 0 || cfg.fillers == 0 {
        return Err(Error::Config("keys, window and fillers must be positive".into()));
    }
    if !(cfg.zipf >= 0.0 && cfg.zipf.is_finite()) {
        return Err(Error::Config(format!("zipf exponent {} must be finite and >= 0", cfg.zipf)));
    }
    for (name, p) in [("noise rate", cfg.noise), ("trigger rate", cfg.trigger_rate)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("{name} {p} not in [0, 1]")));
        }
    }
    let keys = planted_keys(cfg.keys);
    let fillers: Vec<String> = (0..cfg.fillers).map(|i| format!("fi{}", code(i))).collect();
    let weights = (1..=cfg.fillers).map(|r| (r as f64).powf(-cfg.zipf));
    let pick = WeightedIndex::new(weights).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut text = String::new();
    for n in 0..cfg.occurrences {
        let k = &keys[n % keys.len()];
        let label = rng.gen_range(0..2usize);
        let form = if rng.gen_bool(cfg.noise) { 1 - label } else { label };
        let mut left: Vec<&str> = (0..cfg.window).map(|_| fillers[pick.sample(&mut rng)].as_str()).collect();
        let mut right: Vec<&str> = (0..cfg.window).map(|_| fillers[pick.sample(&mut rng)].as_str()).collect();
        if rng.gen_bool(cfg.trigger_rate) {
            let dist = rng.gen_range(1..=cfg.window);
            if rng.gen_bool(0.5) {
                left[cfg.window - dist] = &k.triggers[label];
            } else {
                right[dist - 1] = &k.triggers[label];
            }
        }
        let _ = writeln!(
            text,
            "<doc id=\"{n}\">\n{} {} {}\n</doc>",
            left.join(" "),
            k.forms[form],
            right.join(" ")
        );
    }
    Ok(SynthCorpus { text, keys })
}
