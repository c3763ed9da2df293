#![no_main]

use disputebench_core::negotiation::{parse_action, strip_action_lines, Action};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    // total: every string is a message, an action or a malformed-offer error
    if let Ok(Action::Submit(a)) = parse_action(text) {
        assert_eq!(parse_action(&a.to_submission_line()), Ok(Action::Submit(a)));
    }
    let _ = strip_action_lines(text);
});
