use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circumplex-eval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path) {
    let out = run(&["synth", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn inputs(dir: &Path) -> Vec<String> {
    ["responses", "respondents", "config"]
        .iter()
        .zip(["responses.csv", "respondents.csv", "config.toml"])
        .flat_map(|(flag, file)| [format!("--{flag}"), dir.join(file).display().to_string()])
        .collect()
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn ingest_check_reports_exclusions() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let mut args = vec!["ingest-check".to_string()];
    args.extend(inputs(tmp.path()));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("retained 63, excluded 3 (4.55%)\n"), "{stdout}");
}

#[test]
fn domain_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let svg = tmp.path().join("radar.svg");
    let mut args = vec!["radar".to_string(), "--select".into(), "calm=serene".into(), "--out".into()];
    args.push(svg.display().to_string());
    args.extend(inputs(tmp.path()));
    let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error: unknown candidate `serene`"), "{stderr}");
    assert!(!svg.exists());

    let missing = run(&["demographics", "--respondents", "/nonexistent.csv", "--config", "/nonexistent.toml"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn radar_writes_svg_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    for ext in ["svg", "csv"] {
        let path = tmp.path().join(format!("radar.{ext}"));
        let mut args = vec!["radar".to_string(), "--select".into(), "calm=tenang,annoying=membingitkan".into(), "--out".into()];
        args.push(path.display().to_string());
        args.extend(inputs(tmp.path()));
        let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let body = std::fs::read_to_string(&path).unwrap();
        match ext {
            "svg" => assert_eq!(body.matches("<polygon").count(), 2),
            _ => assert_eq!(body.lines().count(), 1 + 7 + 5),
        }
    }
}
