#![no_main]

use libfuzzer_sys::fuzz_target;
use reclab_core::args::parse_bin_edges;

fuzz_target!(|data: &str| {
    if let Ok(edges) = parse_bin_edges(data) {
        assert!(edges[0] >= 1 && edges[0] < edges[1] && edges[1] < edges[2]);
    }
});
