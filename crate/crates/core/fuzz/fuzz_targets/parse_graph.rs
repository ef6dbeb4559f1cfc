#![no_main]

use hfcanon::io::{parse, Kind};
use hfcanon::Canonizer;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Small inputs are also canonized, which must not panic.
    if let Ok(inst) = parse(Kind::Graph, text) {
        if inst.names().len() <= 6 {
            let _ = inst.canonize(&Canonizer::new(), 1_000);
        }
    }
});
