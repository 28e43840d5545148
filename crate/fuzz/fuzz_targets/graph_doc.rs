#![no_main]

use cmonrw::doc::{graph_to_json, parse_graph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(src) {
        assert_eq!(parse_graph(&graph_to_json(&g)), Ok(g));
    }
});
