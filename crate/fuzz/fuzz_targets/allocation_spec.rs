#![no_main]

use libfuzzer_sys::fuzz_target;
use ropelab::AllocationSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = AllocationSpec::parse(src) else {
        return;
    };
    for dim in [4, 8, 128] {
        if let Ok(alloc) = spec.resolve(dim) {
            for n in 0..dim / 2 {
                if let Some(ch) = alloc.owner(n) {
                    assert!(alloc.pairs(ch).contains(&n));
                }
            }
        }
    }
});
