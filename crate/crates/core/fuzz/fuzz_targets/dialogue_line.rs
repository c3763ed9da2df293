#![no_main]

use disputebench_core::corpus::{dialogue_to_line, parse_dialogue_line, parse_unvalidated};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|line: &str| {
    let _ = parse_unvalidated(line);
    if let Ok(d) = parse_dialogue_line(line) {
        let again = parse_dialogue_line(&dialogue_to_line(&d)).expect("re-encoded record parses");
        assert_eq!(d, again);
    }
});
