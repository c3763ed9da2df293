//! Runs the checked-in fuzz seed corpora through the same checks as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use disputebench_core::annotate::{classify_segment, parse_label, segment_utterance};
use disputebench_core::corpus::{dialogue_to_line, parse_dialogue_line, parse_unvalidated};
use disputebench_core::gateway::Checkpoint;
use disputebench_core::negotiation::{parse_action, strip_action_lines, Action};
use disputebench_core::persona::{AdjectiveLexicon, TraitDistribution};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_action_seeds() {
    let mut parsed = 0;
    for (_, text) in seeds("parse_action") {
        if let Ok(action) = parse_action(&text) {
            parsed += 1;
            if let Action::Submit(a) = action {
                assert_eq!(parse_action(&a.to_submission_line()), Ok(Action::Submit(a)));
            }
        }
        strip_action_lines(&text);
    }
    assert!(parsed > 0);
}

#[test]
fn dialogue_line_seeds() {
    let mut valid = 0;
    for (name, line) in seeds("dialogue_line") {
        let _ = parse_unvalidated(&line);
        match parse_dialogue_line(&line) {
            Ok(d) => {
                valid += 1;
                assert_eq!(parse_dialogue_line(&dialogue_to_line(&d)).unwrap(), d, "{name}");
            }
            Err(_) => assert!(name.starts_with("bad"), "{name} should parse"),
        }
    }
    assert!(valid >= 3);
}

#[test]
fn segment_utterance_seeds() {
    for (_, text) in seeds("segment_utterance") {
        for s in segment_utterance(&text) {
            assert!(!s.text.trim().is_empty());
            classify_segment(&s.text);
        }
    }
}

#[test]
fn llm_label_seeds() {
    for (name, reply) in seeds("llm_label") {
        if let Some(s) = parse_label(&reply) {
            assert_eq!(parse_label(s.name()), Some(s), "{name}");
        }
    }
}

#[test]
fn persona_file_seeds() {
    for (name, text) in seeds("lexicon") {
        assert_eq!(
            AdjectiveLexicon::from_json_str(&text).is_ok(),
            !name.starts_with("bad"),
            "{name}"
        );
    }
    for (name, text) in seeds("distribution") {
        match TraitDistribution::from_json_str(&text) {
            Ok(d) => assert_eq!(TraitDistribution::from_json_str(&d.to_json_string()).unwrap(), d),
            Err(_) => assert!(name.starts_with("bad"), "{name} should parse"),
        }
    }
}

#[test]
fn checkpoint_seeds() {
    for (name, line) in seeds("checkpoint") {
        match Checkpoint::from_line(&line) {
            Ok(c) => {
                Checkpoint::from_line(&c.to_line()).unwrap();
            }
            Err(_) => assert_eq!(name, "truncated"),
        }
    }
}
