//! Re-runs the residue-root search that produced `fixtures/residue_roots.json`.

use serde_json::Value;
use ub_core::system::{builtin_family, Family};

#[test]
fn residue_roots_match_fixture() {
    let fixture: Value = serde_json::from_str(include_str!("../fixtures/residue_roots.json")).unwrap();
    let p = fixture["p"].as_u64().unwrap();
    let t_res = fixture["t_residue"].as_u64().unwrap();
    for f in Family::ALL {
        let name = f.to_string();
        let found = builtin_family(f).residue_roots(p, t_res);
        let want: Vec<Vec<u64>> = serde_json::from_value(fixture["roots"][&name].clone()).unwrap();
        assert_eq!(found, want, "{name}");

        let start: Vec<i64> = serde_json::from_value(fixture["start"][&name].clone()).unwrap();
        assert_eq!(start, f.start_residue(), "{name}");
        let reduced: Vec<u64> = start.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        assert!(found.contains(&reduced), "{name}");
    }
}
