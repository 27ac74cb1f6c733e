use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn dga(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dga"));
    cmd.args(args).env_remove("DGA_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("DGA_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn csv_dims(o: &Output) -> Vec<usize> {
    assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    stdout(o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

#[test]
fn odd_sphere_loop_table() {
    let o = dga(&["--source", "sphere(3)", "--prime", "5", "--max-degree", "12", "--format", "csv"], None);
    let expected: Vec<usize> = (0..=12).map(|d| usize::from(d % 2 == 0)).collect();
    assert_eq!(csv_dims(&o), expected);
}

#[test]
fn moore_loop_table_is_fibonacci() {
    let o = dga(&["--source", "moore(3,2)", "--prime", "3", "--max-degree", "10", "--format", "csv"], None);
    assert_eq!(csv_dims(&o), [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
}

#[test]
fn free_loop_table_of_exterior_algebra() {
    let o = dga(&["--source", "exterior(3)", "--target", "freeloop", "--max-degree", "8", "--format", "csv"], None);
    assert_eq!(csv_dims(&o), [1, 0, 1, 1, 1, 1, 1, 1, 1]);
}

#[test]
fn integral_and_cyclic_space_cohomology() {
    let z = dga(&["--source", "moore(3,2)", "--target", "space", "--ring", "z", "--max-degree", "3", "--format", "csv"], None);
    assert_eq!(stdout(&z), "degree,rank,torsion,group\n0,1,,Z\n1,0,,0\n2,0,,0\n3,0,3,Z/3\n");
    let c = dga(
        &["--source", "moore(3,2)", "--target", "space", "--ring", "zpe", "--prime", "3", "--exponent", "2", "--max-degree", "3", "--format", "csv"],
        None,
    );
    assert_eq!(stdout(&c), "degree,rank,torsion,group\n0,0,9,Z/9\n1,0,,0\n2,0,3,Z/3\n3,0,3,Z/3\n");
}

#[test]
fn output_is_deterministic() {
    for target in ["loop", "freeloop", "kraines", "check", "space"] {
        let args = ["--source", "moore(3,2)", "--prime", "3", "--max-degree", "5", "--target", target, "--format", "json"];
        let (a, b) = (dga(&args, None), dga(&args, None));
        assert_eq!(a.status.code(), Some(0), "{target}: {}", stderr(&a));
        assert_eq!(digest(&a.stdout), digest(&b.stdout), "{target}");
    }
}

#[test]
fn cache_hits_match_cold_runs() {
    let dir = tempfile::tempdir().unwrap();
    let product = "tensor(truncated_poly(2,2),exterior(3))";
    for (source, target, format) in [(product, "loop", "text"), (product, "freeloop", "json"), ("moore(3,2)", "kraines", "text"), (product, "space", "csv")] {
        let args = ["--source", source, "--prime", "3", "--max-degree", "6", "--target", target, "--format", format];
        let cold = dga(&args, None);
        let store = dga(&args, Some(dir.path()));
        let hit = dga(&args, Some(dir.path()));
        assert!(stderr(&store).contains("cache store"), "{target}: {}", stderr(&store));
        assert!(stderr(&hit).contains("cache hit"), "{target}: {}", stderr(&hit));
        assert_eq!(digest(&cold.stdout), digest(&store.stdout), "{target}");
        assert_eq!(digest(&cold.stdout), digest(&hit.stdout), "{target}");
        assert_eq!(cold.status.code(), hit.status.code());
    }
    let entries = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(entries, 4);
}

#[test]
fn cache_keys_separate_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let a = dga(&["--source", "moore(2,2)", "--max-degree", "6", "--format", "csv"], Some(dir.path()));
    let b = dga(&["--source", "moore(2,2)", "--max-degree", "7", "--format", "csv"], Some(dir.path()));
    assert!(stderr(&b).contains("cache store"));
    assert_ne!(stdout(&a), stdout(&b));
}

#[test]
fn dga_and_facet_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s2.json");
    std::fs::write(&json, dga_core::io::dga_to_json(&dga_core::presets::sphere(2).unwrap())).unwrap();
    let o = dga(&["--source", json.to_str().unwrap(), "--max-degree", "6", "--format", "csv"], None);
    assert_eq!(csv_dims(&o), [1, 1, 1, 1, 1, 1, 1]);

    let facets = dir.path().join("s2.txt");
    std::fs::write(&facets, "# boundary of a tetrahedron\n0 1 2\n0 1 3\n0 2 3\n1 2 3\n").unwrap();
    let o = dga(&["--source", facets.to_str().unwrap(), "--target", "space", "--max-degree", "3", "--format", "csv"], None);
    assert_eq!(csv_dims(&o), [1, 0, 1, 0]);
    let o = dga(&["--source", facets.to_str().unwrap(), "--target", "check", "--max-degree", "3"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("SKIP  bar"));
}

#[test]
fn exit_codes() {
    let input = dga(&["--source", "no_such_preset(2)"], None);
    assert_eq!(input.status.code(), Some(2));
    let prime = dga(&["--source", "sphere(2)", "--prime", "6"], None);
    assert_eq!(prime.status.code(), Some(2));
    let ring = dga(&["--source", "sphere(2)", "--ring", "z"], None);
    assert_eq!(ring.status.code(), Some(2));
    let window = dga(&["--source", "sphere(2)", "--max-degree", "9", "--truncation", "6"], None);
    assert_eq!(window.status.code(), Some(4), "{}", stderr(&window));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = r#"{"ring": "Z", "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 2},
        {"name": "y", "degree": 3}, {"name": "z", "degree": 4}],
        "differential": [["x", "y", "1"], ["y", "z", "1"]], "augmentation": [["1", "1"]]}"#;
    std::fs::write(&bad, text).unwrap();
    let o = dga(&["--source", bad.to_str().unwrap(), "--target", "check", "--max-degree", "4"], None);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL  algebra: d^2 = 0"));
}

#[test]
fn kraines_reports() {
    let o = dga(&["--source", "moore(5,2)", "--prime", "5", "--target", "kraines", "--max-degree", "4"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("verdict: PASS\n"));
    let s = dga(&["--source", "moore_space(3)", "--prime", "3", "--target", "kraines", "--max-degree", "3"], None);
    assert_eq!(s.status.code(), Some(0), "{}", stdout(&s));
    assert!(stdout(&s).contains("correction over"));
    let minus = dga(&["--source", "moore(3,2)", "--prime", "3", "--target", "kraines", "--max-degree", "4", "--variant", "minus"], None);
    assert!(stdout(&minus).contains("requested Minus, used Plus"), "{}", stdout(&minus));
}
