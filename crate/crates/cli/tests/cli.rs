use std::process::Command;

fn ambisim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ambisim"))
}

#[test]
fn frame_encode_prints_hex_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambisim().args(["frame", "encode", "--id", "1", "--type", "2", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0xE256E20102");
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("metadata.json")).unwrap()).unwrap();
    for key in ["command", "version", "seed", "config", "parameters", "artifacts"] {
        assert!(meta.get(key).is_some(), "{key}");
    }
    assert_eq!(meta["artifacts"][0], "frame.hex");
}

#[test]
fn exit_codes() {
    assert_eq!(ambisim().arg("warp-drive").output().unwrap().status.code(), Some(1));
    assert_eq!(ambisim().arg("--help").output().unwrap().status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[device]\nwarp = 1\n").unwrap();
    let out = ambisim().arg("--config").arg(&cfg).args(["registers", "apply", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = ambisim().args(["demodulate", "--input", "/nonexistent.iq", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert_ne!(missing.status.code(), Some(0));
}
