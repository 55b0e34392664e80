//! The dataset parser must never panic on arbitrary input, and anything it
//! accepts must survive an exact write/parse round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use reclab_core::csv::{parse_csv, to_csv_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = parse_csv(text) {
        assert!(m.n_users() >= 1 && m.n_articles() >= 1);
        let back = parse_csv(&to_csv_string(&m)).expect("serialized matrix parses");
        assert_eq!(back, m);
    }
});
