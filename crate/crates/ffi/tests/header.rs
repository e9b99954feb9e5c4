//! The checked-in header must declare every exported function.

#[test]
fn header_declares_every_export() {
    let src = include_str!("../src/lib.rs");
    let header = include_str!("../include/isolab.h");
    let mut seen = 0;
    for line in src.lines() {
        let Some(rest) = line.split("extern \"C\" fn ").nth(1) else {
            continue;
        };
        let name = rest.split('(').next().unwrap().trim();
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from include/isolab.h"
        );
        seen += 1;
    }
    assert!(seen >= 18, "found only {seen} exports");
    for ty in ["IsolabStatus", "IsolabBump", "IsolabCaps", "IsolabPair"] {
        assert!(header.contains(ty), "{ty} missing");
    }
}
