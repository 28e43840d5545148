#![no_main]

use cmonrw::Signature;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(sig) = Signature::parse(src) {
            assert_eq!(Signature::parse(&sig.to_source()), Ok(sig));
        }
    }
});
