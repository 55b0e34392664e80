#![no_main]

use libfuzzer_sys::fuzz_target;
use reclab_core::args::parse_article_list;

fuzz_target!(|data: &str| {
    if let Ok(ids) = parse_article_list(data) {
        assert!(!ids.is_empty());
    }
});
