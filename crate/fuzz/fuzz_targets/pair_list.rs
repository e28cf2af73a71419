#![no_main]

use libfuzzer_sys::fuzz_target;
use ropelab::DimensionAllocation;
use ropelab_cli::pairs::parse_pair_list;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let alloc = DimensionAllocation::canonical_videorope(128).unwrap();
    if let Ok(pairs) = parse_pair_list(src, &alloc) {
        assert!(pairs.iter().all(|&n| n < 64));
    }
});
