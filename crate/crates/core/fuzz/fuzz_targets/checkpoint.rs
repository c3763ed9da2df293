#![no_main]

use disputebench_core::gateway::Checkpoint;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|line: &str| {
    if let Ok(c) = Checkpoint::from_line(line) {
        let _ = Checkpoint::from_line(&c.to_line()).expect("re-encoded checkpoint parses");
    }
});
