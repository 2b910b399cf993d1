use std::process::Command;

fn conorm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_conorm")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn fold_reports_type() {
    let (code, out, err) = conorm(&["fold", "--preset", "E6ad", "--action", "pinned-involution"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("type F4"), "{out}");
}

#[test]
fn explicit_config_matches_preset() {
    let (code, out, err) = conorm(&["classes", "--config", &fixture("gl2_swap.json"), "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let (_, preset_out, _) =
        conorm(&["classes", "--preset", "GL2", "--action", "pinned-involution", "--q", "3", "--format", "json"]);
    assert_eq!(out, preset_out);
}

#[test]
fn config_command_normalizes() {
    let (code, once, _) = conorm(&["config", "--config", &fixture("gl2_swap.json")]);
    assert_eq!(code, 0);
    let dir = std::env::temp_dir().join(format!("conorm-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("again.json");
    std::fs::write(&p, &once).unwrap();
    let (_, twice, _) = conorm(&["config", "--config", p.to_str().unwrap()]);
    assert_eq!(once, twice);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_commands_exit_zero() {
    for which in ["product", "trivial"] {
        let (code, out, err) = conorm(&["verify", which, "--preset", "GL2", "--budget", "small"]);
        assert_eq!(code, 0, "{which}: {out}{err}");
    }
    let cases: [(&str, &str, &str); 6] = [
        ("normal-subgroup", "GL3^2", "swap-twist"),
        ("isogeny", "SL4xGL1", "pinned-involution"),
        ("pinning", "GL4", "outer-SO"),
        ("levi", "GL4", "swap-of-blocks"),
        ("root-inclusion", "E6ad", "C4-twist"),
        ("long-roots", "SL5", "pinned-involution"),
    ];
    for (which, g, a) in cases {
        let (code, out, err) = conorm(&["verify", which, "--preset", g, "--action", a, "--budget", "small"]);
        assert_eq!(code, 0, "{which}: {out}{err}");
        assert!(out.contains("PASS"), "{which}: {out}");
    }
}

#[test]
fn bad_input_exits_two() {
    let (code, _, err) = conorm(&["fold", "--config", "/nonexistent/job.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("nonexistent"));
    let (code, _, _) = conorm(&["verify", "everything"]);
    assert_eq!(code, 2);
}

#[test]
fn presets_listing() {
    let (code, out, _) = conorm(&["presets"]);
    assert_eq!(code, 0);
    assert!(out.contains("D4") && out.contains("triality"));
}
