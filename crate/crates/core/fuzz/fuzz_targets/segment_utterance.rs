#![no_main]

use disputebench_core::annotate::{classify_segment, segment_utterance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    for s in segment_utterance(text) {
        assert!(!s.text.trim().is_empty());
        let _ = classify_segment(&s.text);
    }
});
