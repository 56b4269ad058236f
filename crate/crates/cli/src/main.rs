//! `accentdl`: train, apply, evaluate and inspect decision-list accent restorers.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use accentdl::corpus::RawCorpus;
use accentdl::decision_list::{AmbiguityClassSpec, DecisionList, Interpolation, ListTarget, Smoothing};
use accentdl::evaluation::{compare_best_vs_combined, evaluate_split, ComparisonTable, EvalReport};
use accentdl::features::{LemmaLexicon, Lexicons, TagLexicon, WordClassSet};
use accentdl::model_file;
use accentdl::restorer::{restore_traced, Dispatch, Model, RestoreOptions};
use accentdl::synth::{generate, SynthConfig};
use accentdl::text::Language;
use accentdl::train::{train, TrainConfig, TrainReport};

use config::FileConfig;

const EXIT_NOT_FOUND: u8 = 1;
// 2 is clap's usage error
const EXIT_IO: u8 = 3;
const EXIT_DATA: u8 = 4;
const EXIT_FORMAT: u8 = 5;
const EXIT_CONFIG: u8 = 6;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<accentdl::Error> for Failure {
    fn from(e: accentdl::Error) -> Self {
        use accentdl::Error as E;
        let code = match &e {
            E::Io { .. } => EXIT_IO,
            E::EmptyCorpus
            | E::InsufficientTrainingData(_)
            | E::InsufficientCvData
            | E::TooFewFolds { .. }
            | E::EmptyTestSet => EXIT_DATA,
            E::InputEncoding { .. } | E::Format { .. } | E::KeyMismatch { .. } => EXIT_FORMAT,
            E::Config(_) | E::AmbiguityClass { .. } => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "accentdl", version, about = "Accent restoration with decision lists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from accented text.
    Train {
        #[command(flatten)]
        opts: TrainArgs,
        /// Where to write the model.
        #[arg(short, long)]
        model: PathBuf,
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
    },
    /// Restore accents in text (stdin when no input is given).
    Restore {
        #[arg(short, long)]
        model: PathBuf,
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print one line per ambiguous token to stderr: offset, key, evidence, LL, pattern.
        #[arg(long)]
        trace: bool,
        /// Leave words that already carry accents as they are.
        #[arg(long)]
        trust_existing: bool,
    },
    /// Cross-validated evaluation against the corpus's own accents.
    Eval {
        #[command(flatten)]
        opts: TrainArgs,
        /// Number of folds [default: 5].
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        folds: Option<u64>,
        /// Also write the per-word table as TSV.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Compare single-best evidence with summed evidence.
        #[arg(long)]
        compare: bool,
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
    },
    /// Print the decision list used for a word.
    Inspect {
        #[arg(short, long)]
        model: PathBuf,
        word: String,
    },
    /// Write a planted test corpus with a known answer.
    Synth {
        #[arg(long, default_value_t = 10)]
        keys: usize,
        #[arg(long, default_value_t = 10_000)]
        occurrences: usize,
        /// Probability that the form disagrees with its trigger.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Probability that an occurrence has a trigger.
        #[arg(long, default_value_t = 1.0)]
        trigger_rate: f64,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long, default_value_t = 2000)]
        fillers: usize,
        #[arg(long, default_value_t = 1.0)]
        zipf: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        matches!(s, Switch::On)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Lang {
    Es,
    Fr,
    All,
}

impl From<Lang> for Language {
    fn from(l: Lang) -> Language {
        match l {
            Lang::Es => Language::Spanish,
            Lang::Fr => Language::French,
            Lang::All => Language::All,
        }
    }
}

#[derive(Args, Debug, Default)]
struct TrainArgs {
    /// Diacritic inventory [default: all].
    #[arg(long, value_enum)]
    lang: Option<Lang>,
    /// Fixed context window; by default each word picks 4 or 20 on held-out data.
    #[arg(short = 'k', long)]
    window: Option<usize>,
    /// Additive smoothing constant [default: 0.1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Residual interpolation weights `B,G` [default: 1,0].
    #[arg(long, value_parser = parse_pair)]
    beta_gamma: Option<(f64, f64)>,
    /// [default: on]
    #[arg(long, value_enum)]
    prune_cv: Option<Switch>,
    /// [default: off]
    #[arg(long, value_enum)]
    prune_unused: Option<Switch>,
    /// Word classes: `CLASS<TAB>word word ...` per line.
    #[arg(long)]
    classes: Option<PathBuf>,
    /// Part-of-speech tags: `word<TAB>TAG,TAG` per line.
    #[arg(long)]
    tags: Option<PathBuf>,
    /// Lemmas: `word<TAB>lemma` per line.
    #[arg(long)]
    lemmas: Option<PathBuf>,
    /// Ambiguity classes: `NAME<TAB>suffix,suffix[<TAB>members]` per line.
    #[arg(long)]
    classes_spec: Option<PathBuf>,
    /// Drop words seen fewer than N times [default: 1].
    #[arg(long)]
    min_count: Option<u64>,
    /// Seed for the held-out split [default: 0].
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected B,G")?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(a)?, num(b)?))
}

/// Writes data to stdout; a closed pipe (`| head`) ends output quietly.
fn emit(data: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match out.write_all(data.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::io(Path::new("<stdout>"), e)),
        _ => Ok(()),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn build_config(args: &TrainArgs, file: &FileConfig) -> CliResult<TrainConfig> {
    let language = match (args.lang, &file.lang) {
        (Some(l), _) => l.into(),
        (None, Some(code)) => {
            Language::from_code(code).ok_or_else(|| Failure::config(format!("unknown language `{code}`")))?
        }
        (None, None) => Language::All,
    };
    let mut cfg = TrainConfig::new(language);
    if let Some(k) = args.window.or(file.window) {
        cfg = cfg.with_window(k);
    }
    if let Some(alpha) = args.alpha.or(file.alpha) {
        cfg.build.smoothing = Smoothing::new(alpha)?;
        if !(0.1..=0.25).contains(&alpha) {
            eprintln!("warning: alpha {alpha} is outside the usual range 0.1 to 0.25");
        }
    }
    if let Some((b, g)) = args.beta_gamma.or(file.beta_gamma.map(|[b, g]| (b, g))) {
        cfg.interpolation = Interpolation::new(b, g)?;
    }
    if let Some(on) = args.prune_cv.map(bool::from).or(file.prune_cv) {
        cfg.prune_cv = on;
    }
    if let Some(on) = args.prune_unused.map(bool::from).or(file.prune_unused) {
        cfg.prune_unused = on;
    }
    if let Some(n) = args.min_count.or(file.min_count) {
        cfg.min_count = n;
    }
    if let Some(s) = args.seed.or(file.seed) {
        cfg.seed = s;
    }
    let pick = |a: &Option<PathBuf>, f: &Option<PathBuf>| a.clone().or_else(|| f.clone());
    let mut lex = Lexicons::default();
    if let Some(p) = pick(&args.classes, &file.classes) {
        lex.classes = WordClassSet::parse(&read_text(&p)?, &p.display().to_string(), &cfg.map)?;
    }
    if let Some(p) = pick(&args.tags, &file.tags) {
        lex.tags = Some(TagLexicon::parse(&read_text(&p)?, &p.display().to_string(), &cfg.map)?);
    }
    if let Some(p) = pick(&args.lemmas, &file.lemmas) {
        lex.lemmas = Some(LemmaLexicon::parse(&read_text(&p)?, &p.display().to_string(), &cfg.map)?);
    }
    cfg.lexicons = lex;
    if let Some(p) = pick(&args.classes_spec, &file.classes_spec) {
        cfg.class_specs = AmbiguityClassSpec::parse_file(&read_text(&p)?, &p.display().to_string(), &cfg.map)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_corpus(paths: &[PathBuf]) -> CliResult<RawCorpus> {
    let raw = RawCorpus::load(paths)?;
    if raw.is_empty() {
        return Err(accentdl::Error::EmptyCorpus.into());
    }
    Ok(raw)
}

fn summary(r: &TrainReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "words\t{}", r.words);
    let _ = writeln!(out, "keys\t{}", r.keys);
    let _ = writeln!(out, "ambiguous keys\t{}", r.ambiguous_keys);
    let _ = writeln!(out, "word lists\t{}", r.word_lists);
    let _ = writeln!(out, "class lists\t{} ({} members)", r.class_lists, r.class_members);
    let _ = writeln!(out, "list entries\t{}", r.entries);
    for (k, n) in &r.windows {
        let _ = writeln!(out, "window {k}\t{n} lists");
    }
    out
}

fn cmd_train(opts: &TrainArgs, model_path: &Path, corpus: &[PathBuf]) -> CliResult<()> {
    let cfg = build_config(opts, &FileConfig::from_env().map_err(Failure::config)?)?;
    let raw = load_corpus(corpus)?;
    let (model, report) = train(&raw, &cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    model_file::save(&model, model_path)?;
    emit(&summary(&report))
}

fn cmd_restore(
    model_path: &Path,
    input: Option<&Path>,
    output: Option<&Path>,
    trace: bool,
    trust_existing: bool,
) -> CliResult<()> {
    let model = model_file::load(model_path)?;
    let bytes = match input {
        Some(p) => fs::read(p).map_err(|e| Failure::io(p, e))?,
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::io(Path::new("<stdin>"), e))?;
            buf
        }
    };
    let text = String::from_utf8(bytes).map_err(|e| accentdl::Error::InputEncoding {
        offset: e.utf8_error().valid_up_to(),
    })?;
    let (restored, lines) = restore_traced(&text, &model, RestoreOptions { trust_existing });
    if trace {
        let mut err = io::stderr().lock();
        for l in &lines {
            let _ = writeln!(err, "{}", l.to_line());
        }
    }
    match output {
        Some(p) => fs::write(p, restored).map_err(|e| Failure::io(p, e)),
        None => emit(&restored),
    }
}

fn cmd_eval(
    opts: &TrainArgs,
    folds: Option<u64>,
    report_path: Option<&Path>,
    compare: bool,
    corpus: &[PathBuf],
) -> CliResult<()> {
    let file = FileConfig::from_env().map_err(Failure::config)?;
    let folds = match folds {
        Some(n) => n as usize,
        None => file.folds.unwrap_or(5),
    };
    if folds < 2 {
        return Err(Failure::config(format!("folds must be at least 2, got {folds}")));
    }
    let cfg = build_config(opts, &file)?;
    let raw = load_corpus(corpus)?;
    let splits = raw.folds(folds)?;
    let results: Vec<CliResult<(EvalReport, ComparisonTable)>> = std::thread::scope(|s| {
        let handles: Vec<_> = splits
            .iter()
            .map(|(tr, te)| {
                let cfg = &cfg;
                s.spawn(move || -> CliResult<_> {
                    let (model, _) = train(tr, cfg)?;
                    let report = evaluate_split(&model, te)?;
                    let table = if compare {
                        compare_best_vs_combined(&model, te)
                    } else {
                        ComparisonTable::default()
                    };
                    Ok((report, table))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fold thread panicked")).collect()
    });
    let mut merged = EvalReport::default();
    let mut table = ComparisonTable::default();
    let mut fold_agreement = Vec::new();
    for r in results {
        let (report, t) = r?;
        fold_agreement.extend(report.ambiguous.agreement());
        merged.merge(&report);
        table.merge(&t);
    }
    let mut out = merged.render();
    if !fold_agreement.is_empty() {
        let mean = fold_agreement.iter().sum::<f64>() / fold_agreement.len() as f64;
        let _ = writeln!(out, "mean fold agreement on ambiguous tokens: {:.1}%", mean * 100.0);
    }
    if compare {
        let _ = writeln!(out);
        out.push_str(&table.render());
    }
    emit(&out)?;
    if let Some(p) = report_path {
        fs::write(p, merged.to_tsv()).map_err(|e| Failure::io(p, e))?;
    }
    Ok(())
}

/// Three-column rendering: LogL, evidence, classification.
fn render_list(list: &DecisionList, label: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>8}  {:<40}  classification", "LogL", "evidence");
    for e in list.entries() {
        let ev = e.feature.to_string();
        let counts: Vec<String> = e.counts.iter().map(u32::to_string).collect();
        let _ = writeln!(
            out,
            "{:>8.2}  {:<40}  => {}  [{}]",
            e.log_likelihood,
            ev,
            label(e.classification.index()),
            counts.join(",")
        );
    }
    let _ = writeln!(out, "{:>8}  {:<40}  => {}", "", "DEFAULT", label(list.default().index()));
    out
}

fn nearest_keys<'a>(word: &str, keys: impl Iterator<Item = &'a str>, n: usize) -> Vec<&'a str> {
    let mut scored: Vec<(usize, &str)> = keys.map(|k| (strsim::levenshtein(word, k), k)).collect();
    scored.sort();
    scored.into_iter().take(n).map(|(_, k)| k).collect()
}

fn cmd_inspect(model_path: &Path, word: &str) -> CliResult<()> {
    let model: Model = model_file::load(model_path)?;
    let key = model.map.strip(word);
    let mut out = String::new();
    match model.dispatch(key.as_str()) {
        Dispatch::Unknown => {
            let near = nearest_keys(key.as_str(), model.table.iter().map(|(k, _)| k.as_str()), 5);
            return Err(Failure {
                code: EXIT_NOT_FOUND,
                message: if near.is_empty() {
                    format!("`{key}` is not in the model, which has no words")
                } else {
                    format!("`{key}` is not in the model; nearest: {}", near.join(", "))
                },
            });
        }
        Dispatch::Single(form) => {
            let _ = writeln!(out, "{key}: unambiguous, always `{form}`");
        }
        Dispatch::Orphan(entry) => {
            let _ = writeln!(out, "{key}: no list; always the majority `{}`", entry.majority());
        }
        Dispatch::Word(entry, list) => {
            let forms: Vec<String> = entry
                .patterns()
                .iter()
                .map(|p| format!("{} ({})", p.form, p.count))
                .collect();
            let _ = writeln!(out, "{key}: {}; window ±{}", forms.join(", "), list.window());
            out.push_str(&render_list(list, |i| list.labels()[i].clone()));
        }
        Dispatch::Class(entry, list, slots) => {
            let name = match list.target() {
                ListTarget::Class(c) => c.as_str(),
                ListTarget::Word(w) => w.as_str(),
            };
            let _ = writeln!(out, "{key}: uses class list {name}; window ±{}", list.window());
            let form = |i: usize| {
                let slot = &list.labels()[i];
                match slots.get(i).and_then(|&p| entry.form(p)) {
                    Some(f) => format!("{f} (-{slot})"),
                    None => format!("-{slot}"),
                }
            };
            out.push_str(&render_list(list, form));
        }
    }
    emit(&out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    keys: usize,
    occurrences: usize,
    noise: f64,
    trigger_rate: f64,
    window: usize,
    fillers: usize,
    zipf: f64,
    seed: u64,
    output: Option<&Path>,
) -> CliResult<()> {
    let corpus = generate(&SynthConfig {
        keys,
        occurrences,
        noise,
        trigger_rate,
        window,
        fillers,
        zipf,
        seed,
    })?;
    for k in &corpus.keys {
        eprintln!("{}\t{} <- {}\t{} <- {}", k.key, k.forms[0], k.triggers[0], k.forms[1], k.triggers[1]);
    }
    match output {
        Some(p) => fs::write(p, corpus.text).map_err(|e| Failure::io(p, e)),
        None => emit(&corpus.text),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train { opts, model, corpus } => cmd_train(&opts, &model, &corpus),
        Command::Restore {
            model,
            input,
            output,
            trace,
            trust_existing,
        } => cmd_restore(&model, input.as_deref(), output.as_deref(), trace, trust_existing),
        Command::Eval {
            opts,
            folds,
            report,
            compare,
            corpus,
        } => cmd_eval(&opts, folds, report.as_deref(), compare, &corpus),
        Command::Inspect { model, word } => cmd_inspect(&model, &word),
        Command::Synth {
            keys,
            occurrences,
            noise,
            trigger_rate,
            window,
            fillers,
            zipf,
            seed,
            output,
        } => cmd_synth(
            keys,
            occurrences,
            noise,
            trigger_rate,
            window,
            fillers,
            zipf,
            seed,
            output.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("accentdl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("0.7,0.3").unwrap(), (0.7, 0.3));
        assert_eq!(parse_pair(" 1 , 0 ").unwrap(), (1.0, 0.0));
        assert!(parse_pair("0.7").is_err());
        assert!(parse_pair("a,b").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig {
            lang: Some("fr".into()),
            window: Some(8),
            alpha: Some(0.2),
            prune_cv: Some(false),
            ..Default::default()
        };
        let args = TrainArgs {
            window: Some(4),
            prune_cv: Some(Switch::On),
            ..Default::default()
        };
        let cfg = build_config(&args, &file).unwrap();
        assert_eq!(cfg.language, Language::French);
        assert_eq!(cfg.window_candidates, vec![4]);
        assert_eq!(cfg.build.smoothing.alpha(), 0.2);
        assert!(cfg.prune_cv);
        assert!(!cfg.prune_unused);
    }

    #[test]
    fn defaults_without_file() {
        let cfg = build_config(&TrainArgs::default(), &FileConfig::default()).unwrap();
        assert_eq!(cfg.language, Language::All);
        assert_eq!(cfg.window_candidates, vec![4, 20]);
        assert!(cfg.prune_cv && !cfg.prune_unused);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = [
            TrainArgs {
                alpha: Some(0.0),
                ..Default::default()
            },
            TrainArgs {
                beta_gamma: Some((0.5, 0.6)),
                ..Default::default()
            },
            TrainArgs {
                window: Some(0),
                ..Default::default()
            },
        ];
        for a in &bad {
            assert_eq!(build_config(a, &FileConfig::default()).unwrap_err().code, EXIT_CONFIG);
        }
        let file = FileConfig {
            lang: Some("de".into()),
            ..Default::default()
        };
        assert_eq!(build_config(&TrainArgs::default(), &file).unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn nearest_by_edit_distance() {
        let keys = ["cote", "cotes", "peche", "marche"];
        assert_eq!(nearest_keys("cotx", keys.iter().copied(), 2), vec!["cote", "cotes"]);
    }

    #[test]
    fn exit_codes_by_error() {
        let code = |e: accentdl::Error| Failure::from(e).code;
        assert_eq!(code(accentdl::Error::EmptyCorpus), EXIT_DATA);
        assert_eq!(code(accentdl::Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(code(accentdl::Error::InputEncoding { offset: 3 }), EXIT_FORMAT);
    }
}
