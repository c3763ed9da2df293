#![no_main]

use disputebench_core::annotate::parse_label;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|reply: &str| {
    if let Some(s) = parse_label(reply) {
        assert_eq!(parse_label(s.name()), Some(s));
    }
});
