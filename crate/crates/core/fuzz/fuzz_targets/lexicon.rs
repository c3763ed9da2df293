#![no_main]

use disputebench_core::persona::AdjectiveLexicon;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = AdjectiveLexicon::from_json_str(text);
});
