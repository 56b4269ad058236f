use accentdl::corpus::RawCorpus;
use accentdl::decision_list::AmbiguityClassSpec;
use accentdl::evaluation::{evaluate_split, kfold};
use accentdl::model_file;
use accentdl::restorer::{restore, RestoreOptions};
use accentdl::synth::{generate, SynthConfig};
use accentdl::text::{DiacriticMap, Language};
use accentdl::train::{train, TrainConfig};

fn planted(keys: usize, occurrences: usize) -> RawCorpus {
    let s = generate(&SynthConfig {
        keys,
        occurrences,
        ..Default::default()
    })
    .unwrap();
    RawCorpus::from_text(&s.text)
}

#[test]
fn saved_model_restores_like_the_trained_one() {
    let raw = planted(4, 800);
    let (model, _) = train(&raw, &TrainConfig::new(Language::Spanish)).unwrap();
    let dir = tempfile_dir();
    let path = dir.join("m.model");
    model_file::save(&model, &path).unwrap();
    let loaded = model_file::load(&path).unwrap();
    assert_eq!(loaded, model);

    let stripped = model.map.remove_accents(&raw.documents().join("\n"));
    let opts = RestoreOptions::default();
    assert_eq!(restore(&stripped, &loaded, opts), restore(&stripped, &model, opts));
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("accentdl-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn kfold_merge_counts_every_ambiguous_occurrence() {
    let raw = planted(3, 1500);
    let cfg = TrainConfig::new(Language::Spanish);
    let r = kfold(&raw, 3, |tr| train(tr, &cfg).map(|(m, _)| m)).unwrap();
    assert_eq!(r.folds.len(), 3);
    let by_fold: u64 = r.folds.iter().map(|f| f.ambiguous.n).sum();
    assert_eq!(r.merged.ambiguous.n, by_fold);
    assert_eq!(r.merged.ambiguous.n, 1500);
    let a = r.merged.ambiguous.agreement().unwrap();
    assert!(a >= 0.99, "{a}");
}

#[test]
fn class_list_serves_a_rare_member() {
    // one frequent member teaches the class; the rare one borrows its list
    let mut text = String::new();
    for i in 0..60 {
        text.push_str(&format!("<doc>\nsi terminara hoy {i}\n</doc>\n<doc>\nel lunes terminará {i}\n</doc>\n"));
        text.push_str(&format!("<doc>\nsi llegara hoy {i}\n</doc>\n<doc>\nel lunes llegará {i}\n</doc>\n"));
    }
    text.push_str("<doc>\nsi acabara\n</doc>\n<doc>\nel martes acabará\n</doc>\n");
    let raw = RawCorpus::from_text(&text);
    let mut cfg = TrainConfig::new(Language::Spanish);
    cfg.class_specs = AmbiguityClassSpec::parse_file(
        "ARA\tara,ará\tterminara llegara acabara\n",
        "spec",
        &DiacriticMap::for_language(Language::Spanish),
    )
    .unwrap();
    let (model, report) = train(&raw, &cfg).unwrap();
    assert_eq!(report.class_lists, 1);
    assert!(model.class_assignment.keys().any(|k| k.as_str() == "acabara"));
    let out = restore("el lunes acabara", &model, RestoreOptions::default());
    assert_eq!(out, "el lunes acabará");

    let test = RawCorpus::from_text("<doc>\nsi acabara hoy\n</doc>\n<doc>\nel lunes acabará\n</doc>\n");
    let r = evaluate_split(&model, &test).unwrap();
    assert_eq!(r.ambiguous.n, 2);
    assert_eq!(r.ambiguous.agreement(), Some(1.0));
}
