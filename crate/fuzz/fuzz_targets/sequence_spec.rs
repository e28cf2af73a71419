#![no_main]

use libfuzzer_sys::fuzz_target;
use ropelab::layout::assign_positions;
use ropelab::{SequenceSpec, VariantConfig, VariantKind};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = SequenceSpec::from_json(src) else {
        return;
    };
    let round = SequenceSpec::from_json(&spec.to_json()).expect("serialized spec parses");
    assert_eq!(round.segments(), spec.segments());

    if spec.token_count() > 4096 {
        return;
    }
    for kind in VariantKind::ALL {
        if let Ok(table) = assign_positions(&spec, &VariantConfig::new(kind)) {
            assert_eq!(table.len() as u64, spec.token_count());
            assert!(table.entries().iter().all(|e| e.position.is_finite()));
        }
    }
});
