#![no_main]

use hfcanon::Object;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Accepted bytes are canonical, so they must re-encode to themselves.
    if let Ok(obj) = Object::decode(data) {
        assert_eq!(obj.encode().unwrap(), data);
    }
});
