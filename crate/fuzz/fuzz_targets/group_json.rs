#![no_main]

use lawson::Group;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(group) = Group::from_json(text) {
            let again = Group::from_json(&group.to_json()).expect("exported group decodes");
            assert_eq!(again.order(), group.order());
        }
    }
});
