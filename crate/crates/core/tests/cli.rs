use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ratrecon(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratrecon"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn interpolate_round_trips_its_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in"), "(x^2 - 7/3*y)/(x*y + 11); y^5 - 1; 1;").unwrap();
    let o = ratrecon(&["interpolate", "in", "-o", "out", "--report", "rep.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read_to_string(dir.path().join("out")).unwrap();
    assert_eq!(first.lines().count(), 3);
    assert_eq!(first.lines().last(), Some("1;"));

    let o = ratrecon(&["interpolate", "out", "--vars", "x,y", "-o", "again"], dir.path());
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("again")).unwrap(), first);

    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    assert!(rep.get("total_probes").is_some());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad"), "x + * y;").unwrap();
    assert_eq!(ratrecon(&["interpolate", "bad"], dir.path()).status.code(), Some(2));
    assert_eq!(ratrecon(&["interpolate", "missing"], dir.path()).status.code(), Some(1));
    assert_eq!(ratrecon(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(ratrecon(&["--help"], dir.path()).status.code(), Some(0));
    fs::write(dir.path().join("f"), "x;").unwrap();
    let o = ratrecon(&["work", "f", "--connect", "127.0.0.1:1", "--attempts", "1", "--retry-ms", "1"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let o = ratrecon(&["insert", "f"], dir.path());
    assert_eq!(o.status.code(), Some(1), "insert without config/");
}

#[test]
fn bench_tsv_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let o = ratrecon(&["bench", "hybrid", "--only", "f1", "--no-timings", "--tsv"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "function\tprobes\nf1\t1046\n");
}

#[test]
fn gen_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let o = ratrecon(&["gen", "4", "--horner", "-o", "p"], dir.path());
    assert!(o.status.success());
    let src = fs::read_to_string(dir.path().join("p")).unwrap();
    let names = ["x", "y", "z"].map(String::from);
    assert_eq!(ratrecon::parser::parse(&src, &names).unwrap().len(), 1);
}

#[test]
fn serve_without_workers_computes_locally() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in"), "a/(b+2) - a^3;").unwrap();
    let o = ratrecon(&["serve", "in", "--listen", "127.0.0.1:0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let local = ratrecon(&["interpolate", "in"], dir.path());
    assert_eq!(stdout(&o), stdout(&local));
}

fn insert_job(root: &Path) {
    fs::create_dir_all(root.join("config")).unwrap();
    fs::create_dir_all(root.join("replacements")).unwrap();
    fs::write(root.join("config/vars"), "s\nt\nd\n").unwrap();
    fs::write(root.join("config/functions"), "F1\n").unwrap();
    fs::write(root.join("config/skip_functions"), "F1[0,0,0,1]\n").unwrap();
    fs::write(
        root.join("replacements/table"),
        "{F1[1,0,1,-2] -> F1[1,1,1,1]*2 + F1[0,0,0,1]*s,\n F1[1,1,0,0] -> F1[1,1,1,1]*(d-4)/(s+t)}\n",
    )
    .unwrap();
    fs::write(root.join("amp"), "F1[1,0,1,-2]*(s+t+d)/42 + F1[1,1,1,1]*(d-3) + F1[1,1,0,0]*(s+t)\n").unwrap();
}

#[test]
fn insert_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    insert_job(dir.path());
    let o = ratrecon(&["insert", "amp", "-p", "2", "-bs", "2", "-nfs"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = fs::read_to_string(dir.path().join("out_amp")).unwrap();
    assert_eq!(out, "F1[1,1,1,1]*(-7+43/21*d+1/21*t+1/21*s);\n");

    let o = ratrecon(&["insert", "amp", "-ni"], dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("coefficients/F1_1_1_1_1").exists());

    // no rules: the input is its own result
    fs::remove_file(dir.path().join("replacements/table")).unwrap();
    fs::write(dir.path().join("plain"), "F1[1,1,1,1]*(s^2-t^2)/(s-t)").unwrap();
    assert!(ratrecon(&["insert", "plain"], dir.path()).status.success());
    assert_eq!(fs::read_to_string(dir.path().join("out_plain")).unwrap(), "F1[1,1,1,1]*(t+s);\n");
}

#[test]
fn insert_rejects_unknown_family() {
    let dir = tempfile::tempdir().unwrap();
    insert_job(dir.path());
    fs::write(dir.path().join("amp"), "G7[1,1]*s").unwrap();
    let o = ratrecon(&["insert", "amp"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("G7"));
}
