#![no_main]

use lawson::orbifold::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = text.parse::<Rational>() {
            assert_eq!(r.to_string().parse::<Rational>().ok(), Some(r.clone()));
        }
        let _ = serde_json::from_str::<Rational>(text);
    }
});
