use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn wlcc(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wlcc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(data) = stdin {
            pipe.write_all(data).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_token(o: &Output) -> String {
    stdout(o).split_whitespace().next().unwrap_or_default().to_string()
}

fn gen(args: &[&str]) -> Vec<u8> {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let o = wlcc(&full, None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

fn write(dir: &Path, name: &str, data: &[u8]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, data).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn t16_is_not_separable() {
    let o = wlcc(&["separable"], Some(&gen(&["t16"])));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_token(&o), "NON-SEPARABLE");
    assert!(stdout(&o).contains("witness fiber"));
    assert!(stdout(&o).contains("trace irredundant 0"));
}

#[test]
fn cyclic_fourteen_is_not_separable() {
    let o = wlcc(&["separable", "-"], Some(&gen(&["cyclic", "14"])));
    assert_eq!(first_token(&o), "NON-SEPARABLE");
    let o = wlcc(&["separable"], Some(&gen(&["cyclic", "15"])));
    assert_eq!(first_token(&o), "SEPARABLE");
}

#[test]
fn small_graph_is_amenable() {
    // 12 vertices, three vertex colors of size 4, complete bipartite links
    let mut text = String::from("ccm 12\n");
    for u in 0..12 {
        let row: Vec<String> = (0..12)
            .map(|v| if u == v { (u / 4).to_string() } else if (u + v) % 2 == 0 { "3".into() } else { "4".into() })
            .collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    let o = wlcc(&["amenable"], Some(text.as_bytes()));
    assert_eq!(first_token(&o), "AMENABLE", "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shrikhande_companion_is_rook() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(wlcc(&["gen", "shrikhande-rook", "-o", d], None).status.success());
    let shr = dir.path().join("shrikhande.ccm");
    let rook = dir.path().join("rook.ccm");
    let comp = dir.path().join("companion.ccm");
    let o = wlcc(&["amenable", shr.to_str().unwrap(), "--companion", comp.to_str().unwrap()], None);
    assert_eq!(first_token(&o), "NON-AMENABLE");
    let o = wlcc(&["iso", comp.to_str().unwrap(), rook.to_str().unwrap()], None);
    assert_eq!(first_token(&o), "ISOMORPHIC");
    let o = wlcc(&["iso", shr.to_str().unwrap(), rook.to_str().unwrap(), "--ignore-vertex-colors"], None);
    assert_eq!(first_token(&o), "NON-ISOMORPHIC");
    let o = wlcc(&["equiv", shr.to_str().unwrap(), rook.to_str().unwrap()], None);
    assert_eq!(first_token(&o), "EQUIVALENT");
}

#[test]
fn inequivalent_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.ccm", b"ccm 3\n0 2 2\n2 0 2\n2 2 1\n");
    let b = write(dir.path(), "b.ccm", b"ccm 3\n0 2 2\n2 1 2\n2 2 1\n");
    assert_eq!(first_token(&wlcc(&["equiv", &a, &b], None)), "NOT-EQUIVALENT");
}

#[test]
fn close_reports_rounds_and_fibers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.ccm");
    let o = wlcc(&["close", "-o", out.to_str().unwrap()], Some(&gen(&["t16"])));
    assert_eq!(stdout(&o), "rounds 1\nfibers 4 4 4 4\n");
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("ccm 16"));
}

#[test]
fn classify_prints_taxonomy() {
    let o = wlcc(&["classify"], Some(&gen(&["fano"])));
    let text = stdout(&o);
    assert!(text.contains("0\t4\tF4"));
    assert!(text.contains("TwoK22"));
    assert!(text.ends_with("irredundant yes\n"));
}

#[test]
fn generator_families() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "k4.txt", b"graph 4\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n");
    assert_eq!(gen(&["cfi", &graph]), gen(&["t16"]));
    let pls = write(dir.path(), "fano.pls", b"pls 7 7\n0 2 3\n1 3 4\n2 4 5\n3 5 6\n0 4 6\n0 1 5\n1 2 6\n");
    assert_eq!(gen(&["pls", &pls]), gen(&["fano"]));
    assert_eq!(first_token(&wlcc(&["separable"], Some(&gen(&["mk"])))), "SEPARABLE");
    assert_eq!(first_token(&wlcc(&["separable"], Some(&gen(&["pappus"])))), "NON-SEPARABLE");
    let out = dir.path().join("p.ccm");
    assert!(wlcc(&["gen", "pappus", "-o", out.to_str().unwrap()], None).status.success());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("ccm 36"));
}

#[test]
fn outputs_are_deterministic() {
    let a = wlcc(&["separable"], Some(&gen(&["cyclic", "21"])));
    let b = wlcc(&["separable"], Some(&gen(&["cyclic", "21"])));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(wlcc(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(wlcc(&["gen", "cyclic", "x"], None).status.code(), Some(1));
    assert_eq!(wlcc(&["--help"], None).status.code(), Some(0));
    assert_eq!(wlcc(&["separable"], Some(b"ccm 2\n0 1\n")).status.code(), Some(2));
    assert_eq!(wlcc(&["gen", "cyclic", "5"], None).status.code(), Some(2));
    assert_eq!(wlcc(&["separable", "/nonexistent/x.ccm"], None).status.code(), Some(2));
    // valid colored graph that is not coherent
    let o = wlcc(&["separable"], Some(b"ccm 3\n0 1 2\n1 0 2\n2 2 0\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not coherent"));
    let big = format!("ccm 5\n{}", (0..5).map(|u| (0..5).map(|v| if u == v { "0 " } else { "1 " }).collect::<String>() + "\n").collect::<String>());
    assert_eq!(wlcc(&["amenable"], Some(big.as_bytes())).status.code(), Some(2));
}

#[test]
fn census_writes_all_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlcc(&["census16", "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "classes 218\ngraphs 436\n");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 437);
}

#[test]
fn selftest_passes_with_capped_pool() {
    let o = Command::new(env!("CARGO_BIN_EXE_wlcc")).arg("selftest").env("WLCC_THREADS", "2").output().unwrap();
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 10);
    let bad = Command::new(env!("CARGO_BIN_EXE_wlcc")).arg("selftest").env("WLCC_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
