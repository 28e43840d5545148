//! ```bash
//! cargo fuzz run parse_term
//! ```

#![no_main]

use cmonrw::random::default_signature;
use cmonrw::sigterm::{parse_term, pretty_print};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let sig = default_signature();
    if let Ok(t) = parse_term(src, &sig) {
        assert_eq!(parse_term(&pretty_print(&t), &sig).as_ref(), Ok(&t));
    }
});
