use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn faso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faso")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, args: &[&str]) {
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", p(dir)]);
    let o = faso(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

fn build(schedule: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut full = vec!["build", p(schedule), "--out", p(out)];
    full.extend_from_slice(extra);
    faso(&full)
}

fn epsilons(schedule: &Path) -> Vec<f64> {
    json(schedule)["levels"].as_array().unwrap().iter().map(|l| l["epsilon"].as_f64().unwrap()).collect()
}

#[test]
fn generate_circle_schedule() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["circle", "--levels", "1..3"]);
    let s = dir.path().join("schedule.json");
    assert_eq!(epsilons(&s), vec![3.0 * PI, PI / 2.0, PI / 16.0]);
    assert_eq!(json(&s)["mode"], "strict");
    for n in 1..=3 {
        assert!(dir.path().join(format!("level{n}.csv")).exists());
    }
}

#[test]
fn generate_cantor_schedule() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["cantor", "--levels", "1..5"]);
    let s = dir.path().join("schedule.json");
    let expected: Vec<f64> = (1..=5).map(|n| 1.0 / 2f64.powi(2 * (n - 1))).collect();
    assert_eq!(epsilons(&s), expected);
    assert_eq!(json(&s)["mode"], "strict");
    let csvs = fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv")).count();
    assert_eq!(csvs, 5);
}

#[test]
fn deep_cantor_falls_back_to_relaxed() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["cantor", "--levels", "1..8"]);
    let g = json(&dir.path().join("generate.json"));
    assert_eq!(g["mode"], "relaxed");
    assert!(g["mode_reason"].as_str().unwrap().contains("level 7"));
}

#[test]
fn two_squares_generation_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        generate(d.path(), &["two_squares", "--count", "200", "--seed", "7", "--levels", "1..4"]);
    }
    generate(c.path(), &["two_squares", "--count", "200", "--seed", "8", "--levels", "1..4"]);
    for f in ["level1.csv", "level4.csv", "schedule.json", "generate.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.path().join("level2.csv")).unwrap(), fs::read(c.path().join("level2.csv")).unwrap());
    assert_eq!(json(&a.path().join("schedule.json"))["mode"], "relaxed");
}

#[test]
fn build_circle_depth_three() {
    let dir = tempfile::tempdir().unwrap();
    generate(&dir.path().join("g"), &["circle", "--levels", "1..3"]);
    let out = dir.path().join("b");
    let o = build(&dir.path().join("g/schedule.json"), &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out.join("validation.json"));
    let sizes: Vec<u64> = v["levels"].as_array().unwrap().iter().map(|l| l["elements"].as_u64().unwrap()).collect();
    // level 3: per window start, one vertex, three edges, three triangles, one tetrahedron
    assert_eq!(sizes, vec![1, 15, 32 * (1 + 3 + 3 + 1)]);
    assert_eq!(v["schedule"]["passed"], true);
    assert_eq!(v["run"]["command"], "build");
    let dot = fs::read_to_string(out.join("level2.dot")).unwrap();
    assert!(dot.starts_with("// run: "));
    assert_eq!(dot.matches("[label=").count(), 15);
    assert!(json(&out.join("tower.json"))["tower"]["levels"].as_array().unwrap().len() == 3);
}

#[test]
fn build_rejects_constant_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.csv"), "0\n0.5\n1\n").unwrap();
    let config = r#"{"mode":"relaxed","levels":[
        {"points_file":"a.csv","context":{"kind":"euclidean","dimension":1},"epsilon":0.5},
        {"points_file":"a.csv","context":{"kind":"euclidean","dimension":1},"epsilon":0.5}]}"#;
    fs::write(dir.path().join("s.json"), config).unwrap();
    let o = build(&dir.path().join("s.json"), &dir.path().join("b"), &[]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&dir.path().join("b/validation.json"))["schedule"]["passed"], false);
}

#[test]
fn strict_failure_needs_relaxed_flag() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["two_squares", "--count", "30,150", "--seed", "7", "--levels", "1..2"]);
    let s = dir.path().join("schedule.json");
    let mut config = json(&s);
    config["mode"] = "strict".into();
    fs::write(&s, config.to_string()).unwrap();
    assert_eq!(code(&build(&s, &dir.path().join("b"), &[])), 2);
    let o = build(&s, &dir.path().join("b"), &["--relaxed"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("continuing in relaxed mode"));
}

#[test]
fn build_cantor_depth_two_bonding() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["cantor", "--levels", "1..2"]);
    let out = dir.path().join("b");
    assert_eq!(code(&build(&dir.path().join("schedule.json"), &out, &[])), 0);
    let t = json(&out.join("tower.json"));
    let level1 = &t["tower"]["levels"][0]["points"];
    let coord = |v: &Value| v.as_array().map(|a| a[0].as_f64().unwrap()).unwrap_or_else(|| v.as_f64().unwrap());
    let image: Vec<f64> = t["tower"]["bondings"][0]["vertex_images"][0].as_array().unwrap().iter().map(|i| coord(&level1[i.as_u64().unwrap() as usize])).collect();
    let expected = [0.0, 1.0 / 3.0, 2.0 / 3.0];
    assert_eq!(image.len(), 3);
    for (a, b) in image.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15, "{image:?}");
    }
}

#[test]
fn homology_two_squares_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["two_squares", "--count", "30,150", "--seed", "7", "--levels", "1..2"]);
    assert_eq!(code(&build(&dir.path().join("schedule.json"), &dir.path().join("b"), &[])), 0);
    let out = dir.path().join("h");
    let o = faso(&["homology", p(&dir.path().join("b/tower.json")), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("betti.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["degree,1,2", "H_0,1,1", "H_1,0,2", "H_2,0,0"]);
    let s = json(&out.join("summary.json"));
    assert_eq!(s["consistent"], true);
    assert!(s["homology"]["limit_ranks"].as_array().unwrap().iter().any(|l| l["degree"] == 1 && l["level"] == 2 && l["rank"] == 2));
}

#[test]
fn homology_cantor_reduced_row() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["cantor", "--levels", "1..8"]);
    assert_eq!(code(&build(&dir.path().join("schedule.json"), &dir.path().join("b"), &[])), 0);
    let out = dir.path().join("h");
    assert_eq!(code(&faso(&["homology", p(&dir.path().join("b/tower.json")), "--k-max", "1", "--out", p(&out)])), 0);
    let csv = fs::read_to_string(out.join("betti.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "H_0,1,1,2,4,8,32,64,128"), "{csv}");
    assert!(csv.lines().any(|l| l == "H_1,0,0,0,0,0,0,0,0"));
    let comps = fs::read_to_string(out.join("components.csv")).unwrap();
    let reduced: Vec<&str> = comps.lines().skip(2).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(reduced, vec!["0", "0", "1", "3", "7", "31", "63", "127"]);
}

#[test]
fn homology_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["circle", "--levels", "1..4"]);
    assert_eq!(code(&build(&dir.path().join("schedule.json"), &dir.path().join("b"), &[])), 0);
    let tower = dir.path().join("b/tower.json");
    for out in ["h1", "h2"] {
        assert_eq!(code(&faso(&["homology", p(&tower), "--out", p(&dir.path().join(out))])), 0);
    }
    for f in ["betti.csv", "components.csv", "summary.json"] {
        assert_eq!(fs::read(dir.path().join("h1").join(f)).unwrap(), fs::read(dir.path().join("h2").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn empty_dump_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    fs::write(&t, r#"{"mode":"strict","max_dim":3,"tolerance":1e-9,"levels":[],"bondings":[]}"#).unwrap();
    assert_eq!(code(&faso(&["homology", p(&t), "--out", p(&dir.path().join("h"))])), 1);
    assert_eq!(code(&faso(&["verify", p(&t), "--out", p(&dir.path().join("v"))])), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&faso(&["frobnicate"])), 1);
    assert_eq!(code(&faso(&["generate", "torus"])), 1);
    assert_eq!(code(&faso(&["homology", "x.json", "--field", "p:4"])), 1);
    assert_eq!(code(&faso(&["build"])), 1);
    assert_eq!(code(&faso(&["--help"])), 0);
}

#[test]
fn integer_homology_over_the_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["two_squares", "--count", "30", "--seed", "7", "--levels", "1..1"]);
    assert_eq!(code(&build(&dir.path().join("schedule.json"), &dir.path().join("b"), &[])), 0);
    let o = faso(&["homology", p(&dir.path().join("b/tower.json")), "--field", "z", "--out", p(&dir.path().join("h"))]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

fn circle_tower(dir: &Path, levels: &str) -> std::path::PathBuf {
    generate(&dir.join("g"), &["circle", "--levels", levels]);
    assert_eq!(code(&build(&dir.join("g/schedule.json"), &dir.join("b"), &[])), 0);
    dir.join("b/tower.json")
}

#[test]
fn verify_circle_with_self_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let tower = circle_tower(dir.path(), "1..4");
    let out = dir.path().join("v");
    let o = faso(&["verify", p(&tower), "--space", "circle", "--probes", "64", "--compare", p(&tower), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let v = json(&out.join("verify.json"));
    assert_eq!(v["passed"], true);
    assert_eq!(v["threads"].as_array().unwrap().len(), 64);
    let checks: Vec<&str> = v["summary"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert_eq!(checks, vec!["dump", "projection_diagrams", "threads", "separation", "fas_comparison", "two_tower_comparison"]);
}

#[test]
fn verify_reports_corrupted_bonding() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["cantor", "--levels", "1..3"]);
    assert_eq!(code(&build(&dir.path().join("schedule.json"), &dir.path().join("b"), &[])), 0);
    let tower = dir.path().join("b/tower.json");
    let ok = faso(&["verify", p(&tower), "--space", "cantor", "--out", p(&dir.path().join("v0"))]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let mut t = json(&tower);
    let image = t["tower"]["bondings"][0]["vertex_images"][0].as_array_mut().unwrap();
    assert_eq!(image.len(), 3);
    image.pop();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, t.to_string()).unwrap();
    let o = faso(&["verify", p(&bad), "--space", "cantor", "--out", p(&dir.path().join("v"))]);
    assert_eq!(code(&o), 2);
    let text = stdout(&o);
    assert!(text.contains("FAIL dump: bonding 2→1: vertex 0 stored {0,1} recomputed {0,1,2}"), "{text}");
}
