//! Exit-code and output contracts of the command-line surface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn codebom<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_codebom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn os(p: &Path) -> &std::ffi::OsStr {
    p.as_os_str()
}

#[test]
fn kb_diff_on_identical_trees_warns_and_exits_zero() {
    let before = fixtures().join("kb_src/debug_prefix");
    let output = codebom([
        os(Path::new("kb")),
        os(Path::new("diff")),
        os(Path::new("--package")),
        os(Path::new("debug")),
        os(Path::new("--before")),
        os(&before),
        os(Path::new("--after")),
        os(&before),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no construct changes"), "{stderr}");
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(json["added"].as_array().unwrap().len(), 0);
    assert_eq!(json["modified"].as_array().unwrap().len(), 0);
    assert_eq!(json["removed"].as_array().unwrap().len(), 0);
}

#[test]
fn kb_diff_reports_the_change_sets() {
    let output = codebom([
        os(Path::new("kb")),
        os(Path::new("diff")),
        os(Path::new("--package")),
        os(Path::new("debug")),
        os(Path::new("--before")),
        os(&fixtures().join("kb_src/debug_prefix")),
        os(Path::new("--after")),
        os(&fixtures().join("kb_src/debug_postfix")),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(json["added"].as_array().unwrap().len(), 1);
    assert_eq!(json["modified"].as_array().unwrap().len(), 2);
    assert_eq!(json["removed"].as_array().unwrap().len(), 0);
}

#[test]
fn kb_add_on_identical_trees_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let before = fixtures().join("kb_src/debug_prefix");
    let output = codebom([
        os(Path::new("kb")),
        os(Path::new("add")),
        os(Path::new("--vuln-id")),
        os(Path::new("CVE-0000-0000")),
        os(Path::new("--package")),
        os(Path::new("debug")),
        os(Path::new("--before")),
        os(&before),
        os(Path::new("--after")),
        os(&before),
        os(Path::new("--kb")),
        os(tmp.path()),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no code change detected"), "{stderr}");
    assert!(!tmp.path().join("CVE-0000-0000.json").exists());
}

#[test]
fn bom_writes_a_loadable_document() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bom.json");
    let output = codebom([
        os(Path::new("bom")),
        os(Path::new("--app")),
        os(&fixtures().join("project_a")),
        os(Path::new("--output")),
        os(&out),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["app_name"], "ProjectA");
    assert_eq!(json["stats"]["total"], json["stats"]["app_count"].as_u64().unwrap()
        + json["stats"]["dep_count"].as_u64().unwrap());
    assert_eq!(json["dep_entries"].as_array().unwrap().len(), 3);
}

#[test]
fn stats_renders_the_distribution_table() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bom_paths = Vec::new();
    for (idx, app) in ["project_a", "project_a_fixed", "project_a"].iter().enumerate() {
        let out = tmp.path().join(format!("bom_{idx}.json"));
        let output = codebom([
            os(Path::new("bom")),
            os(Path::new("--app")),
            os(&fixtures().join(app)),
            os(Path::new("--output")),
            os(&out),
        ]);
        assert_eq!(output.status.code(), Some(0));
        bom_paths.push(out);
    }
    let mut args: Vec<&std::ffi::OsStr> = vec![os(Path::new("stats"))];
    for p in &bom_paths {
        args.push(os(p));
    }
    let output = codebom(args);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    for header in ["median", "min", "max", "q1", "q3", "sd"] {
        assert!(stdout.contains(header), "missing {header} in:\n{stdout}");
    }
    assert!(stdout.contains("app + dep constructs"));
    assert!(stdout.contains("runtime deps"));
}

#[test]
fn scan_missing_kb_dir_exits_two() {
    let output = codebom([
        os(Path::new("scan")),
        os(Path::new("--app")),
        os(&fixtures().join("project_a")),
        os(Path::new("--kb")),
        os(Path::new("/definitely/not/a/dir")),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn scan_without_dev_dependencies_misses_the_test_scoped_finding() {
    let tmp = tempfile::tempdir().unwrap();
    let kb_dir = tmp.path().join("kb");
    let output = codebom([
        os(Path::new("kb")),
        os(Path::new("add")),
        os(Path::new("--vuln-id")),
        os(Path::new("CVE-2017-16137")),
        os(Path::new("--package")),
        os(Path::new("debug")),
        os(Path::new("--before")),
        os(&fixtures().join("kb_src/debug_prefix")),
        os(Path::new("--after")),
        os(&fixtures().join("kb_src/debug_postfix")),
        os(Path::new("--kb")),
        os(&kb_dir),
    ]);
    assert_eq!(output.status.code(), Some(0));

    let with_dev = codebom([
        os(Path::new("scan")),
        os(Path::new("--app")),
        os(&fixtures().join("project_a")),
        os(Path::new("--kb")),
        os(&kb_dir),
        os(Path::new("--format")),
        os(Path::new("json")),
    ]);
    assert_eq!(with_dev.status.code(), Some(1));

    let without_dev = codebom([
        os(Path::new("scan")),
        os(Path::new("--app")),
        os(&fixtures().join("project_a")),
        os(Path::new("--kb")),
        os(&kb_dir),
        os(Path::new("--no-dev")),
        os(Path::new("--format")),
        os(Path::new("json")),
    ]);
    assert_eq!(without_dev.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&without_dev.stdout).unwrap();
    assert_eq!(report["findings"].as_array().unwrap().len(), 0);
}

#[test]
fn scan_of_a_dependency_free_app_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let app = tmp.path().join("app");
    std::fs::create_dir_all(&app).unwrap();
    std::fs::write(
        app.join("package.json"),
        "{\n  \"name\": \"bare\",\n  \"version\": \"0.1.0\"\n}\n",
    )
    .unwrap();
    std::fs::write(app.join("index.js"), "function main() { return 0; }\n").unwrap();
    let kb_dir = tmp.path().join("kb");
    std::fs::create_dir_all(&kb_dir).unwrap();

    let output = codebom([
        os(Path::new("scan")),
        os(Path::new("--app")),
        os(&app),
        os(Path::new("--kb")),
        os(&kb_dir),
        os(Path::new("--format")),
        os(Path::new("json")),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["findings"].as_array().unwrap().len(), 0);
    assert_eq!(report["stats"]["dep_count"], 0);
}
