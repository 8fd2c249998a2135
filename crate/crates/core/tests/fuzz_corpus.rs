//! Replays the checked-in fuzz seeds through the decoders they target.

use std::fs;
use std::path::PathBuf;

use lawson::io::{parse_raw, raw_string};
use lawson::orbifold::Rational;
use lawson::Group;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            (path, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn raw_mesh_seeds() {
    let mut accepted = 0;
    for (_, text) in seeds("raw_mesh") {
        if let Ok(mesh) = parse_raw(&text) {
            let again = parse_raw(&raw_string(&mesh)).unwrap();
            assert_eq!(again.triangles(), mesh.triangles());
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn group_json_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("group_json") {
        if let Ok(group) = Group::from_json(&text) {
            let again = Group::from_json(&group.to_json()).unwrap();
            assert_eq!(again.order(), group.order(), "{}", path.display());
            accepted += 1;
        }
    }
    assert_eq!(accepted, 1);
}

#[test]
fn rational_seeds() {
    for (path, text) in seeds("rational") {
        if let Ok(r) = text.parse::<Rational>() {
            assert_eq!(r.to_string().parse::<Rational>().unwrap(), r, "{}", path.display());
        }
        let _ = serde_json::from_str::<Rational>(&text);
    }
    assert!("1/0".parse::<Rational>().is_err());
}
