use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wallcross")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn ntrop_counts() {
    let (code, out) = run(&["ntrop", "--w", "1,1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("N^trop(1,1) = 1\n"), "{out}");
    let (_, out) = run(&["ntrop", "--w", "1+1,1+2", "--seed", "2"]);
    assert!(out.starts_with("N^trop(1+1,1+2) = 8\n"), "{out}");
    let (_, out) = run(&["ntrop", "--w", "1,1", "--q"]);
    assert!(out.starts_with("N^trop_q(1,1) = 1\n"), "{out}");
    let (_, out) = run(&["ntrop", "--w", "1+1,1+2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 8);
    assert_eq!(v["schema"], 1);
}

#[test]
fn theorem_b_exit_codes() {
    let (code, out) = run(&["theorem-b", "--w", "1,1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("PASS\n"));
    let (code, _) = run(&["theorem-b", "--w", "2,2"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["theorem-b", "--w", "1,1", "--kappa", "0"]);
    assert_eq!(code, 2);
    let (code, out) = run(&["theorem-b", "--w", "1+1,1+2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tropical"], "2");
    assert_eq!(v["gps"], "2");
    assert_eq!(v["signed_pass"], true);
    assert_eq!(code, if v["literal_pass"] == true { 0 } else { 1 });
}

#[test]
fn refined_theorem_b() {
    let (code, out) = run(&["theorem-b", "--w", "1,1", "--q"]);
    assert_eq!(code, 0, "{out}");
    let (code, _) = run(&["theorem-b", "--w", "2,1", "--q"]);
    assert_eq!(code, 2);
}

#[test]
fn traces() {
    let (code, out) = run(&["trace", "--tree", "g>e"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("residue").count(), 1, "{out}");
    let (_, out) = run(&["trace", "--tree", "g"]);
    assert!(!out.contains("residue"));
    let (code, out) = run(&["trace", "--tree", "g>e>g>2e", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["types"].as_array().unwrap().len() >= 2);
    let (code, _) = run(&["trace", "--tree", "g>("]);
    assert_eq!(code, 2);
    let (code, _) = run(&["trace", "--tree", "g>e", "--labelling", "0,0"]);
    assert_eq!(code, 2);
}

#[test]
fn numeric_checks() {
    let (code, out) = run(&["numeric", "bessel", "--c", "1", "--R", "2:8"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("# rate_bessel_corrected,-6.28"), "{out}");
    for check in ["plemelj", "residue", "asymptotics"] {
        assert_eq!(run(&["numeric", check]).0, 0, "{check}");
    }
    assert_eq!(run(&["numeric", "arc", "--radius", "-8"]).0, 0);
    assert_eq!(run(&["numeric", "bessel", "--c", "x"]).0, 2);
}
