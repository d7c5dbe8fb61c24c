use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn binconf(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_binconf"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn binconf");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn gen(spec: &str) -> String {
    let o = binconf(&["gen", spec], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    stdout(&o)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid json")
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

#[test]
fn type_of_generated_desargues() {
    let o = binconf(&["type"], Some(&gen("GS:5,2")));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(10_3 10_3), binomial k=3 m=3\n");

    let o = binconf(&["type", "-", "--json"], Some(&gen("GS:5,2")));
    let v = json(&o);
    assert_eq!(keys(&v), ["binomial", "configuration", "lines", "partial_linear_space", "points"]);
    assert_eq!(v["binomial"]["k"], 3);
    assert_eq!(v["configuration"]["nu"], 10);
}

#[test]
fn k4_file_and_veblen_census() {
    let dir = TempDir::new().unwrap();
    let k4 = write(dir.path(), "k4.cfg", &gen("K:4"));
    let veblen = write(dir.path(), "veblen.cfg", &gen("veblen"));
    let o = binconf(&["type", "--json", &k4], None);
    let v = json(&o);
    assert_eq!((v["points"].as_u64(), v["lines"].as_u64()), (Some(4), Some(6)));

    let o = binconf(&["classify-gluings", &k4, &veblen], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("6 classes"));

    let v = json(&binconf(&["classify-gluings", "--json", &k4, &veblen], None));
    assert_eq!(keys(&v), ["class_count", "classes", "map_count"]);
    assert_eq!(v["class_count"], 6);
    assert_eq!(v["map_count"], 720);
    let class = &v["classes"][0];
    assert_eq!(keys(class), ["certificate", "representative", "size", "type"]);
    assert_eq!(class["representative"].as_array().unwrap().len(), 6);
}

#[test]
fn two_desargues_glue_to_a_non_configuration() {
    let dir = TempDir::new().unwrap();
    let text = gen("GS:5,2");
    let d = write(dir.path(), "d.cfg", &text);
    // lines of the first onto points of the second, in file order
    let lines: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("line "))
        .map(|l| l.split(':').next().unwrap())
        .collect();
    let points: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("points:"))
        .flat_map(str::split_whitespace)
        .collect();
    let map: String = lines.iter().zip(&points).map(|(l, p)| format!("{l} -> {p}\n")).collect();
    let map = write(dir.path(), "any.map", &map);
    let o = binconf(&["compose", &d, &d, "--map", &map], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = binconf(&["type"], Some(&stdout(&o)));
    assert_eq!(stdout(&o), "not a configuration\n");
}

#[test]
fn decompose_then_compose_is_isomorphic() {
    let dir = TempDir::new().unwrap();
    let v = write(dir.path(), "v.cfg", &gen("V:3,3"));
    let prefix = dir.path().join("part").to_str().unwrap().to_string();
    let o = binconf(
        &["decompose", &v, "--hyperplane", "a^3 a^2b a^2c ab^2 abc ac^2", "-o", &prefix],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("K1 (reduct): (4_3 6_2), binomial k=3 m=2"));
    let k1 = format!("{prefix}.k1.cfg");
    let k2 = format!("{prefix}.k2.cfg");
    let map = format!("{prefix}.map");
    let glued = binconf(&["compose", &k1, &k2, "--map", &map], None);
    assert_eq!(glued.status.code(), Some(0), "{}", stderr(&glued));
    let o = binconf(&["iso", "-", &v], Some(&stdout(&glued)));
    assert_eq!(o.status.code(), Some(0));

    let o = binconf(&["decompose", &v, "--hyperplane", "index:0", "--json"], None);
    let report = json(&o);
    assert_eq!(keys(&report), ["decomposed", "hyperplane", "infinity", "k1", "k2", "signature"]);
    assert_eq!(report["infinity"].as_array().unwrap().len(), 6);
}

#[test]
fn decompose_reports_negative_results() {
    let dir = TempDir::new().unwrap();
    let d = write(dir.path(), "d.cfg", &gen("GS:5,2"));
    // a line together with the point off its three neighbours
    let o = binconf(&["decompose", &d, "--hyperplane", "{1,2} {1,3} {2,3} {4,5}"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not a configuration"));
    let o = binconf(&["decompose", &d, "--hyperplane", "{1,2}"], None);
    assert_eq!(o.status.code(), Some(1));
    let o = binconf(&["decompose", &d, "--hyperplane", "{9,9}"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = binconf(&["decompose", &d, "--hyperplane", "index:99"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hyperplanes_of_desargues() {
    let d = gen("GS:5,2");
    let o = binconf(&["hyperplanes"], Some(&d));
    assert_eq!(stdout(&o).lines().next(), Some("15 hyperplanes"));
    let v = json(&binconf(&["hyperplanes", "--require-configuration", "--json"], Some(&d)));
    assert_eq!(keys(&v), ["count", "hyperplanes"]);
    assert_eq!(v["count"], 5);
    let h = &v["hyperplanes"][0];
    assert_eq!(keys(h), ["deep_lines", "index", "points", "restriction"]);
    assert_eq!(h["restriction"]["nu"], 6);

    let lonely = "config v1\npoints: a\nline x: a\n";
    assert_eq!(binconf(&["hyperplanes"], Some(lonely)).status.code(), Some(1));
}

#[test]
fn iso_exit_status_and_witness() {
    let dir = TempDir::new().unwrap();
    let k4 = write(dir.path(), "k4.cfg", &gen("K:4"));
    let veblen = write(dir.path(), "veblen.cfg", &gen("veblen"));
    assert_eq!(binconf(&["iso", &k4, &veblen], None).status.code(), Some(1));

    let dual = stdout(&binconf(&["dual", &k4], None));
    let o = binconf(&["iso", "--witness", "-", &veblen], Some(&dual));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("isomorphic"));
    assert_eq!(out.lines().filter(|l| l.contains(" -> ")).count(), 6 + 4);

    let v = json(&binconf(&["iso", "--witness", "--json", "-", &veblen], Some(&dual)));
    assert_eq!(keys(&v), ["isomorphic", "witness"]);
    assert_eq!(keys(&v["witness"]), ["lines", "points"]);
}

#[test]
fn dual_twice_reproduces_the_file() {
    for spec in ["GS:5,2", "V:3,3", "K:5", "fano"] {
        let text = gen(spec);
        let once = stdout(&binconf(&["dual"], Some(&text)));
        let twice = stdout(&binconf(&["dual"], Some(&once)));
        assert_eq!(twice, text, "{spec}");
    }
}

#[test]
fn verify_diagnoses_failures() {
    let o = binconf(&["verify"], Some(&gen("fano")));
    assert_eq!(o.status.code(), Some(0));
    let bad = "config v1\npoints: a b c\nline x: a b\nline y: a b c\n";
    let o = binconf(&["verify"], Some(bad));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("lines x and y share points a b"));
    let v = json(&binconf(&["verify", "--json"], Some(bad)));
    assert_eq!(keys(&v), ["configuration", "diagnostics", "partial_linear_space", "type"]);
    assert_eq!(v["type"], Value::Null);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let o = binconf(&["type"], Some("config v1\npoints: a b\nline x: a q\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column"), "{}", stderr(&o));
    assert_eq!(binconf(&["gen", "GS:2"], None).status.code(), Some(2));
    assert_eq!(binconf(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(binconf(&["triangle", "--depth", "3"], None).status.code(), Some(2));
}

#[test]
fn family_triangle_writes_a_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g");
    let o = binconf(
        &[
            "triangle",
            "--family",
            "grassmannian",
            "--depth",
            "4",
            "--verify",
            "-o",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("all cells verified\n"));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert_eq!(manifest.lines().count(), 16);
    assert!(manifest.contains("3 3 cell-3-3.cfg cell-3-3.map"));
    let o = binconf(&["type", out.join("cell-3-3.cfg").to_str().unwrap()], None);
    assert_eq!(stdout(&o), "(10_3 10_3), binomial k=3 m=3\n");

    let v =
        json(&binconf(&["triangle", "--family", "V*", "--depth", "3", "--verify", "--json"], None));
    assert_eq!(keys(&v), ["cells", "depth", "provenance", "verified"]);
    assert_eq!(keys(&v["cells"][0]), ["k", "m", "outcome", "passed", "type"]);
    assert_eq!(v["verified"], true);
    assert_eq!(v["provenance"], "dual-veronesian");
}

fn custom_boundary(dir: &Path) -> String {
    // row (2,k) = dual K_{k+1}, column (m,2) = K_{m+1}
    let mut manifest = String::new();
    for i in 2..=4 {
        write(dir, &format!("row{i}.cfg"), &gen(&format!("K*:{}", i + 1)));
        write(dir, &format!("col{i}.cfg"), &gen(&format!("K:{}", i + 1)));
        manifest.push_str(&format!("2 {i} row{i}.cfg -\n"));
        if i > 2 {
            manifest.push_str(&format!("{i} 2 col{i}.cfg -\n"));
        }
    }
    write(dir, "manifest.txt", &manifest)
}

#[test]
fn custom_triangle_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let manifest = custom_boundary(dir.path());
    let run = |seed: &str| {
        stdout(&binconf(&["triangle", "--custom", &manifest, "--seed", seed, "--verify"], None))
    };
    let a = run("11");
    assert_eq!(a, run("11"));
    assert!(a.starts_with("custom triangle, depth 4\n"));
    assert!(a.contains("(4,4) glued: (35_4 35_4), binomial k=4 m=4 ok"));

    // written maps replay to isomorphic cells
    let out = dir.path().join("out");
    let o = binconf(
        &["triangle", "--custom", &manifest, "--seed", "11", "-o", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let replay = dir.path().join("replay");
    let o = binconf(
        &[
            "triangle",
            "--custom",
            out.join("manifest.txt").to_str().unwrap(),
            "-o",
            replay.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for cell in ["3-3", "3-4", "4-3", "4-4"] {
        let name = format!("cell-{cell}.cfg");
        let o = binconf(
            &["iso", out.join(&name).to_str().unwrap(), replay.join(&name).to_str().unwrap()],
            None,
        );
        assert_eq!(o.status.code(), Some(0), "{cell}");
    }
}

#[test]
fn custom_triangle_rejects_bad_boundaries() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "k4.cfg", &gen("K:4"));
    let manifest = write(dir.path(), "m.txt", "2 2 k4.cfg -\n");
    let o = binconf(&["triangle", "--custom", &manifest], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("B(2,2)"), "{}", stderr(&o));
}
