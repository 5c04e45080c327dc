use std::process::{Command, Output};

fn kignn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kignn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_and_parse() {
    let o = kignn(&["check", "--logic", "gml", "--graph", "star(2)", "<>{>=2}top"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "holds: true");
    let o = kignn(&["--json", "parse", "--logic", "ml", "[]p1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["logic"], "ml");
}

#[test]
fn compile_then_eval_and_falsify() {
    let dir = std::env::temp_dir().join(format!("kignn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let model = dir.join("m.kir");
    let m = model.to_str().unwrap();
    let o = kignn(&["compile", "--target", "gml_localsum_relu", "--formula", "<>{>=2}top", "-o", m]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = kignn(&["eval", "--model", m, "--graph", "star(2)"]);
    assert!(stdout(&o).starts_with("point 0: output 1 accept true"), "{}", stdout(&o));
    let o = kignn(&["invariance", "--model", m, "--max-nodes", "3", "--props", "1", "--keyings", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NO_VIOLATION_FOUND"));

    std::fs::write(&model, "(classifier policy=\">0/<=0\" mode=exact meta=\"leak\"\n(val))\n").unwrap();
    let o = kignn(&["--json", "invariance", "--model", m, "--max-nodes", "1", "--props", "0", "--keyings", "20"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["verdict"]["Counterexample"].is_object());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn coverings_and_exit_codes() {
    assert_eq!(kignn(&["cover", "cycle(6)", "cycle(3)"]).status.code(), Some(0));
    assert_eq!(kignn(&["cover", "cycle(3)", "cycle(6)"]).status.code(), Some(1));
    assert_eq!(kignn(&["bisim", "star(1)", "star(2)"]).status.code(), Some(0));
    assert_eq!(kignn(&["report", "nope"]).status.code(), Some(2));
    assert_eq!(kignn(&["compile", "--target", "nope", "--formula", "p1"]).status.code(), Some(2));
    assert_eq!(kignn(&["check", "--logic", "gml", "--graph", "edge", "p1 &"]).status.code(), Some(2));
}
