#![no_main]

use disputebench_core::persona::TraitDistribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(d) = TraitDistribution::from_json_str(text) {
        let again = TraitDistribution::from_json_str(&d.to_json_string()).expect("re-encoded distribution parses");
        assert_eq!(d, again);
    }
});
