//! The committed profile files are the built-in profiles.

use std::path::PathBuf;

use nmcond::condenser::{validate_profile, Mode, ParameterProfile};

#[test]
fn committed_profiles_match_the_builtins() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/profiles");
    for name in ["paper", "desk", "micro"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
        let stored: ParameterProfile = serde_json::from_str(&text).unwrap();
        let builtin = ParameterProfile::by_name(name).unwrap();
        assert_eq!(stored, builtin, "configs/profiles/{name}.json is stale");
        assert!(validate_profile(&stored).is_empty(), "{name} does not validate");
        assert_eq!(stored.mode == Mode::Paper, name == "paper");
    }
}
