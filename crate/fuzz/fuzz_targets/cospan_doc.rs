//! Cospan documents, plus everything downstream of a successful parse.

#![no_main]

use cmonrw::decompose::{factorise_into_levels, readback_term};
use cmonrw::doc::{cospan_to_json, parse_cospan};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(c) = parse_cospan(src) else { return };
    assert_eq!(parse_cospan(&cospan_to_json(&c)).as_ref(), Ok(&c));
    if c.carrier.node_count <= 12 && c.is_right_monogamous() && c.is_acyclic() {
        let f = factorise_into_levels(&c).expect("right-monogamous acyclic input");
        assert!(f.recompose().iso_equal(&c));
        readback_term(&c).expect("right-monogamous acyclic input");
    }
});
