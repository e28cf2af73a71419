#![no_main]

use libfuzzer_sys::fuzz_target;
use ropelab_cli::config::{FileConfig, GlobalArgs, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = FileConfig::parse(src) else {
        return;
    };
    if file.dim.is_some_and(|d| d > 1 << 16) {
        return;
    }
    let _ = RunConfig::merge(&GlobalArgs::default(), file);
});
