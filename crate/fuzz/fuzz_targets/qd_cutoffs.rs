#![no_main]

use libfuzzer_sys::fuzz_target;
use reclab_core::args::parse_qd_cutoffs;

fuzz_target!(|data: &str| {
    if let Ok(cutoffs) = parse_qd_cutoffs(data) {
        assert!(cutoffs.medium >= 0.0 && cutoffs.medium < cutoffs.high);
    }
});
