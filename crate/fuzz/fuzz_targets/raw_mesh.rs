#![no_main]

use lawson::io::{parse_raw, raw_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // Anything accepted must survive a write and re-read unchanged.
        if let Ok(mesh) = parse_raw(text) {
            let again = parse_raw(&raw_string(&mesh)).expect("written mesh parses");
            assert_eq!(again.triangles(), mesh.triangles());
        }
    }
});
