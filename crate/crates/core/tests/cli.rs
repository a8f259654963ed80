use std::path::Path;
use std::process::Command;

const SIMULATE: &str = r#"
command = "simulate"

[params]
family = "rough"
h = 0.35
u0 = "atom 1 1; atom -1 -1"

[grid]
xi_cutoff = 4.0
xi_cells = 8
tau_cutoff = 8.0
tau_cells = 8
time_steps = 8

[mc]
seeds = 12

[experiment]
m = 2
"#;

fn run(config: &str, dir: &Path, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("cfg.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pamlab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("PAMLAB_SEED")
        .env_remove("PAMLAB_OUT")
        .env_remove("PAMLAB_CONFIG")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn body(path: &Path) -> String {
    let s = std::fs::read_to_string(path).unwrap();
    let (first, rest) = s.split_once('\n').unwrap();
    assert!(first.starts_with("# generated_at="));
    rest.to_string()
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let (ca, oa) = run(SIMULATE, a.path(), &["--seed", "3"]);
    assert_eq!(ca, 0, "{oa}");
    assert_eq!(run(SIMULATE, b.path(), &["--seed", "3", "--threads", "1"]).0, 0);
    assert_eq!(run(SIMULATE, c.path(), &["--seed", "4"]).0, 0);
    let csv = |d: &Path| body(&d.join("out").join("simulate.csv"));
    assert_eq!(csv(a.path()), csv(b.path()));
    assert_ne!(csv(a.path()), csv(c.path()));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("out").join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "simulate");
    assert_eq!(summary["base_seed"], 3);
    assert!(oa.contains("PASS"));
}

#[test]
fn constants_report() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("command = \"constants\"\n[params]\nfamily = \"rough\"\nh = 0.3\n", d.path(), &[]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS admissible"), "{out}");
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(run("command = \"constants\"\nbogus = 1\n", p, &[]).0, 2);
    assert_eq!(run("command = \"teleport\"\n", p, &[]).0, 2);
    assert_eq!(
        run("command = \"constants\"\n[params]\nfamily = \"regular\"\nd = 3\nalpha = 0.5\n", p, &[]).0,
        3
    );
    assert_eq!(run(&SIMULATE.replace("m = 2", "m = 4"), p, &[]).0, 4);
    let missing = Command::new(env!("CARGO_BIN_EXE_pamlab"))
        .args(["--config", "/nonexistent/pamlab.toml"])
        .env_remove("PAMLAB_CONFIG")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(6));
    let none = Command::new(env!("CARGO_BIN_EXE_pamlab")).env_remove("PAMLAB_CONFIG").output().unwrap();
    assert_eq!(none.status.code(), Some(2));
}

#[test]
fn env_overrides_seed() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("cfg.toml");
    std::fs::write(&cfg, SIMULATE).unwrap();
    let st = Command::new(env!("CARGO_BIN_EXE_pamlab"))
        .env("PAMLAB_CONFIG", &cfg)
        .env("PAMLAB_SEED", "9")
        .env("PAMLAB_OUT", d.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let s = std::fs::read_to_string(d.path().join("o").join("summary.json")).unwrap();
    assert!(s.contains("\"base_seed\": 9"));
}
