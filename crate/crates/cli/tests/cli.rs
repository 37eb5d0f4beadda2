use std::path::Path;
use std::process::{Command, Output};

fn sembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sembed")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_dataset(dir: &Path) {
    let out = sembed(&["gen-synthetic", "--points", "12", "--seed", "2", "--out", p(dir)]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn gen_synthetic_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    small_dataset(&a);
    small_dataset(&b);
    for f in ["manifest.tsv", "taxonomy.tsv", "descriptors/seg00007.txt"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn evaluate_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    small_dataset(&data);
    let report = tmp.path().join("report.txt");
    let out = sembed(&[
        "evaluate",
        "--manifest",
        p(&data.join("manifest.tsv")),
        "--taxonomy",
        p(&data.join("taxonomy.tsv")),
        "--mode",
        "as",
        "--method",
        "knn",
        "--k",
        "1",
        "--out",
        p(&report),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("accuracy="));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("method=knn\n"));
    assert!(text.contains("records=48\n"));
    assert!(text.contains("\nconfusion\t"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    small_dataset(&data);
    let cfg = tmp.path().join("run.conf");
    std::fs::write(
        &cfg,
        format!(
            "manifest={}\ntaxonomy={}\nmode=as\nmethod=linear\n",
            p(&data.join("manifest.tsv")),
            p(&data.join("taxonomy.tsv"))
        ),
    )
    .unwrap();
    let report = tmp.path().join("r.txt");
    let out = sembed(&["evaluate", "--config", p(&cfg), "--method", "knn", "--out", p(&report)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("method=knn\n"));
    assert!(text.contains("mode=as\n"));
}

#[test]
fn encode_build_classify_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    small_dataset(&data);
    let manifest = data.join("manifest.tsv");
    let taxonomy = data.join("taxonomy.tsv");
    let model = tmp.path().join("model.txt");
    let graph = tmp.path().join("graph.txt");
    let out = sembed(&["encode", "--manifest", p(&manifest), "--out", p(&model)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = sembed(&[
        "build-graph", "--manifest", p(&manifest), "--taxonomy", p(&taxonomy), "--mode", "as",
        "--model", p(&model), "--m", "20", "--out", p(&graph),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = sembed(&[
        "classify", "--graph", p(&graph), "--model", p(&model), "--manifest", p(&manifest),
        "--taxonomy", p(&taxonomy),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 48);
    assert!(lines.iter().all(|l| l.split('\t').count() == 5));
}

#[test]
fn classify_without_graph_names_the_flag() {
    let out = sembed(&["classify", "--model", "m.txt", "--manifest", "x.tsv"]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("--graph"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
}

#[test]
fn meaning_mode_needs_taxonomy() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    small_dataset(&data);
    let out = sembed(&["evaluate", "--manifest", p(&data.join("manifest.tsv")), "--mode", "ah"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--taxonomy"));
}

#[test]
fn bad_input_is_reported_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("m.tsv");
    std::fs::write(&manifest, "s1\tp1\tput\t-\ta.txt\ns2\tp1\tput\n").unwrap();
    let out = sembed(&["evaluate", "--manifest", p(&manifest)]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("m.tsv") && err.contains("line 2"), "{err}");
}

#[test]
fn unknown_subcommand_fails() {
    let out = sembed(&["frobnicate"]);
    assert!(!out.status.success());
}
