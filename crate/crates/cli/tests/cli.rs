use std::fs;
use std::process::Command as Process;

use thinlab::certify::check_consistent;
use thinlab::layout::ConsistentSolution;
use thinlab::tree::{gen_random_tree, parse_edge_list};
use thinlab_cli::{run, GenSpec, EXIT_CAP, EXIT_MALFORMED, EXIT_OK, EXIT_VIOLATION};

fn thinlab(args: &[&str]) -> (i32, String, String) {
    run(std::iter::once("thinlab").chain(args.iter().copied()))
}

#[test]
fn compute_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path1000.txt");
    let (code, _, _) = thinlab(&["generate", "--gen", "path:1000", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(thinlab(&["compute", "--in", path.to_str().unwrap()]), (0, "1\n".into(), String::new()));
    assert_eq!(thinlab(&["compute", "--gen", "binary:8"]).1, "3\n");
    assert_eq!(thinlab(&["compute", "--gen", "smallest:5"]).1, "5\n");
    assert_eq!(thinlab(&["compute", "--gen", "mary:3:5", "--format", "csv"]).1, "n,thinness\n364,3\n");
    assert_eq!(thinlab(&["compute", "--gen", "star:3", "--format", "json"]).1, "{\"n\":4,\"thinness\":1}\n");
}

#[test]
fn compute_dumps_the_table() {
    let (code, out, _) = thinlab(&["compute", "--gen", "path:3", "--root", "1", "--dump-table"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1\nvertex,thin_list,crit_list\n0,1,nil\n1,1,nil\n2,1,nil\n");
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.txt");
    let sol = dir.path().join("s.txt");
    thinlab(&["generate", "--gen", "smallest:3", "--out", tree.to_str().unwrap()]);
    let (code, _, err) = thinlab(&["solve", "--in", tree.to_str().unwrap(), "--out", sol.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let parsed = ConsistentSolution::parse_any(&fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(parsed.class_count(), 3);
    let (code, out, _) = thinlab(&["verify", "--in", tree.to_str().unwrap(), "--sol", sol.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "ok classes=3\n"));
}

#[test]
fn solve_on_a_path_uses_one_class() {
    let (code, out, _) = thinlab(&["solve", "--gen", "path:6", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(ConsistentSolution::parse_any(&out).unwrap().class_count(), 1);
}

#[test]
fn solve_random_trees() {
    for seed in 0..100u64 {
        let spec = format!("random:200:{seed}");
        let (code, out, err) = thinlab(&["solve", "--gen", &spec]);
        assert_eq!(code, EXIT_OK, "{spec}: {err}");
        let t = gen_random_tree(200, seed).unwrap();
        let sol = ConsistentSolution::parse_any(&out).unwrap();
        assert_eq!(check_consistent(&t, &sol), Ok(()));
        assert_eq!(thinlab(&["compute", "--gen", &spec]).1, format!("{}\n", sol.class_count()));
    }
}

#[test]
fn verify_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "order: 1 2 0\nclasses: 1 1 1\n").unwrap();
    let (code, _, err) = thinlab(&["verify", "--gen", "path:3", "--sol", bad.to_str().unwrap()]);
    assert_eq!((code, err.as_str()), (EXIT_VIOLATION, "violation u=1 v=2 w=0\n"));

    fs::write(&bad, "order: 1 2\nclasses: 1 1\n").unwrap();
    assert_eq!(thinlab(&["verify", "--gen", "path:3", "--sol", bad.to_str().unwrap()]).0, EXIT_MALFORMED);
    fs::write(&bad, "nonsense").unwrap();
    assert_eq!(thinlab(&["verify", "--gen", "path:3", "--sol", bad.to_str().unwrap()]).0, EXIT_MALFORMED);
}

#[test]
fn oracle_output() {
    assert_eq!(
        thinlab(&["oracle", "--gen", "smallest:2"]),
        (0, "enumeration=2 characterization=2 agree\n".into(), String::new())
    );
    assert_eq!(thinlab(&["oracle", "--gen", "random:12:3"]).0, EXIT_CAP);
}

#[test]
fn malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("dup.txt");
    fs::write(&f, "3\n0 1\n0 1\n").unwrap();
    let (code, _, err) = thinlab(&["compute", "--in", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_MALFORMED);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(thinlab(&["compute", "--gen", "binary"]).0, EXIT_MALFORMED);
    assert_eq!(thinlab(&["compute", "--gen", "path:4", "--root", "4"]).0, EXIT_MALFORMED);
    assert_eq!(thinlab(&["compute"]).0, EXIT_MALFORMED);
    assert_eq!(thinlab(&["compute", "--in", "/nonexistent/tree.txt"]).0, EXIT_MALFORMED);
}

#[test]
fn generate_is_deterministic() {
    let a = thinlab(&["generate", "--gen", "random:50", "--seed", "9"]).1;
    assert_eq!(a, thinlab(&["generate", "--gen", "random:50:9"]).1);
    assert_eq!(parse_edge_list(&a).unwrap(), parse_edge_list(&gen_random_tree(50, 9).unwrap().to_edge_list()).unwrap());
    assert!(thinlab(&["generate", "--gen", "path:2", "--dot"]).1.contains("0 -- 1;"));
}

#[test]
fn bounds_and_bench() {
    let (code, out, _) = thinlab(&["bounds", "--gen", "smallest:3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("bound,value,measured,satisfied\nlog3,3,3,true\n"), "{out}");
    let (code, out, _) = thinlab(&["bench", "--sizes", "100,1000", "--trials", "2"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,seconds,thinness");
    assert!(lines[1].starts_with("100,") && lines[2].starts_with("1000,"));
}

#[test]
fn generator_specs() {
    assert_eq!(GenSpec::parse("mary:3:5").unwrap(), GenSpec::Mary(3, 5));
    assert_eq!(GenSpec::parse("random:1000:7").unwrap(), GenSpec::Random(1000, Some(7)));
    assert_eq!(GenSpec::parse("spider:2,2,1").unwrap(), GenSpec::Spider(vec![2, 2, 1]));
    assert!(GenSpec::parse("mary:3").is_err());
    assert!(GenSpec::parse("random:x").is_err());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_thinlab");
    let ok = Process::new(bin).args(["compute", "--gen", "binary:8"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "3\n");
    let capped = Process::new(bin).args(["oracle", "--gen", "path:8"]).env("THINLAB_CAPS", "enum=7").output().unwrap();
    assert_eq!(capped.status.code(), Some(EXIT_CAP));
    let bad_caps =
        Process::new(bin).args(["compute", "--gen", "path:8"]).env("THINLAB_CAPS", "enum=0").output().unwrap();
    assert_eq!(bad_caps.status.code(), Some(EXIT_MALFORMED));
}
