#![no_main]

use cmonrw::dpo::{parse_rules, RewriteRule};
use cmonrw::random::default_signature;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let sig = default_signature();
    for def in parse_rules(src, &sig).unwrap_or_default() {
        RewriteRule::from_def(&def, &sig).expect("parsed rules are well typed");
    }
});
