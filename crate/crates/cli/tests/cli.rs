use std::path::PathBuf;
use std::process::{Command, Output};

const WORKED: &str = "while (4*x1 + x2 > 0) {\n  x1 := -2*x1 + 4*x2;\n  x2 := 4*x1;\n}\n";
const P3: &str = "while (x1 + 2*x2 + x3 >= 0) { x1 := 2*x1; x2 := 3*x2; x3 := 5*x3; }\n";
const EMPTY: &str = "while (x1 > 0) { x1 := -x2; x2 := x1; }\n";
const HALF: &str = "while (x1 > 0) { x1 := x1; x2 := x2; }\n";

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("loopnt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn loopnt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopnt"))
        .args(args)
        .env_remove("LOOPNT_FACTOR_BOUND")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn analyze_worked_example_json() {
    let f = scratch("worked.loop", WORKED);
    let o = loopnt(&["--format", "json", "analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["kind"], "ray");
    assert_eq!(v["dir"], serde_json::json!(["1", "1/4+1/4*sqrt(17)"]));
    assert_eq!(v["case"], "Lemma10");
    assert_eq!(
        v["eigenvalues"],
        serde_json::json!(["-1+sqrt(17)", "-1-sqrt(17)"])
    );
    assert!(v["witnesses"].is_object());
}

#[test]
fn analyze_empty_and_half_plane() {
    let f = scratch("empty.loop", EMPTY);
    let v = json(&loopnt(&[
        "--format",
        "json",
        "analyze",
        f.to_str().unwrap(),
    ]));
    assert_eq!(v["kind"], "empty");
    assert_eq!(v["case"], "NoPositiveEigenvalue");
    assert!(v["eigenvalues"].is_null());

    let f = scratch("half.loop", HALF);
    let v = json(&loopnt(&[
        "--format",
        "json",
        "analyze",
        f.to_str().unwrap(),
    ]));
    assert_eq!(v["kind"], "sector");
    assert_eq!(v["right_closed"], false);
    assert_eq!(v["left_closed"], false);
}

#[test]
fn json_scalars_round_trip_through_the_grammar() {
    let f = scratch("worked-rt.loop", WORKED);
    let v = json(&loopnt(&[
        "--format",
        "json",
        "analyze",
        f.to_str().unwrap(),
    ]));
    for s in v["dir"]
        .as_array()
        .unwrap()
        .iter()
        .chain(v["eigenvalues"].as_array().unwrap())
    {
        let s = s.as_str().unwrap();
        let x = loopnt::exact::parse_quad(s).unwrap();
        assert_eq!(x.to_string(), s);
    }
}

#[test]
fn p3_file_is_unsupported_for_analysis() {
    let f = scratch("p3.loop", P3);
    let o = loopnt(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("loopnt p3"));
}

#[test]
fn exit_codes_for_bad_input() {
    let bad = scratch("bad.loop", "while (x1*x2 > 0) { x1 := x1; }");
    assert_eq!(
        loopnt(&["analyze", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        loopnt(&["analyze", "/no/such/file.loop"]).status.code(),
        Some(6)
    );
    let f = scratch("worked-x.loop", WORKED);
    let o = loopnt(&["member", f.to_str().unwrap(), "--point", "sqrt(2), sqrt(3)"]);
    assert_eq!(o.status.code(), Some(4));
    let o = loopnt(&[
        "member",
        f.to_str().unwrap(),
        "--point",
        "1, 1/4+1/4*sqrt(5)",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let o = loopnt(&["member", f.to_str().unwrap(), "--point", "1.5, 2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn member_queries() {
    let f = scratch("worked-m.loop", WORKED);
    let f = f.to_str().unwrap();
    let check = |point: &str| {
        let o = loopnt(&["--format", "json", "member", f, "--point", point]);
        assert_eq!(o.status.code(), Some(0));
        json(&o)["member"].as_bool().unwrap()
    };
    assert!(check("1, 1/4+1/4*sqrt(17)"));
    assert!(check("2, 1/2+1/2*sqrt(17)"));
    assert!(!check("0,0"));
    assert!(!check("1,1"));
    let text = stdout(&loopnt(&[
        "--color", "never", "member", f, "--point", "1,1",
    ]));
    assert!(text.starts_with("false\n"));
    assert!(text.contains("fails"));
}

#[test]
fn simulate_outcomes() {
    let f = scratch("worked-s.loop", WORKED);
    let f = f.to_str().unwrap();
    let o = loopnt(&[
        "--color",
        "never",
        "simulate",
        f,
        "--point",
        "1,1",
        "--max-steps",
        "10",
        "--trace",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("Terminated(5)"), "{text}");
    assert!(text.contains("trace length: 6"));
    let o = loopnt(&[
        "--format",
        "json",
        "simulate",
        f,
        "--point",
        "1, 1/4+1/4*sqrt(17)",
        "--max-steps",
        "64",
    ]);
    let v = json(&o);
    assert_eq!(v["outcome"], "survived");
    assert_eq!(v["steps"], 64);
    let p3 = scratch("p3-s.loop", P3);
    let o = loopnt(&[
        "--color",
        "never",
        "simulate",
        p3.to_str().unwrap(),
        "--point",
        "1,-1,1",
        "--max-steps",
        "50",
    ]);
    assert!(stdout(&o).starts_with("Survived(50)"));
    let o = loopnt(&["simulate", f, "--point", "1,1", "--max-steps", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn member_never_contradicts_simulation() {
    let f = scratch("worked-c.loop", WORKED);
    let f = f.to_str().unwrap();
    for point in [
        "1,1",
        "1, 1/4+1/4*sqrt(17)",
        "-1, -1/4-1/4*sqrt(17)",
        "3,2",
        "0,1",
        "1/2, 1/8+1/8*sqrt(17)",
    ] {
        let m = json(&loopnt(&[
            "--format", "json", "member", f, "--point", point,
        ]))["member"]
            .as_bool()
            .unwrap();
        let s = json(&loopnt(&[
            "--format", "json", "simulate", f, "--point", point,
        ]));
        assert!(!(m && s["outcome"] == "terminated"), "{point}");
    }
}

#[test]
fn fuzz_is_deterministic_and_validated() {
    let a = loopnt(&["fuzz", "--trials", "1", "--seed", "7"]);
    let b = loopnt(&["fuzz", "--trials", "1", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let o = loopnt(&["fuzz", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&loopnt(&[
        "--format", "json", "fuzz", "--trials", "25", "--seed", "3",
    ]));
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["points_checked"], 25 * 40);
}

#[test]
fn p3_subcommand() {
    let o = loopnt(&["--color", "never", "p3", "--check-boundary", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all positive"));
    let v = json(&loopnt(&["--format", "json", "p3", "--poly", "x1 - x2"]));
    assert_eq!(v["bound"], 1);
    assert_eq!(v["zeros_in_window"].as_array().unwrap().len(), 0);
    assert_eq!(loopnt(&["p3", "--poly", "0"]).status.code(), Some(1));
    assert_eq!(loopnt(&["p3", "--poly", "x1 +* x2"]).status.code(), Some(1));
    assert_eq!(
        loopnt(&["p3", "--tau-samples", "50"]).status.code(),
        Some(0)
    );
    assert_eq!(loopnt(&["p3"]).status.code(), Some(1));
}

#[test]
fn render_svg() {
    let dir = scratch("unused", "");
    let dir = dir.parent().unwrap();
    let f = scratch("worked-r.loop", WORKED);
    let out = dir.join("worked.svg");
    let o = loopnt(&[
        "render",
        f.to_str().unwrap(),
        "--svg",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("class=\"ray closed\"").count(), 1);
    assert_eq!(svg.matches("class=\"ray open\"").count(), 0);

    let f = scratch("half-r.loop", HALF);
    let out = dir.join("half.svg");
    loopnt(&[
        "render",
        f.to_str().unwrap(),
        "--svg",
        out.to_str().unwrap(),
    ]);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("class=\"ray open\"").count(), 2);
    assert!(svg.contains("stroke-dasharray"));
    assert!(svg.contains("class=\"region\""));

    let f = scratch("empty-r.loop", EMPTY);
    let out = dir.join("empty.svg");
    loopnt(&[
        "render",
        f.to_str().unwrap(),
        "--svg",
        out.to_str().unwrap(),
    ]);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.contains("NT = \u{2205}"));
    assert!(!svg.contains("class=\"ray"));

    let o = loopnt(&["render", f.to_str().unwrap(), "--svg", "/no/such/dir/x.svg"]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn factor_bound_override() {
    let f = scratch("worked-fb.loop", WORKED);
    let o = Command::new(env!("CARGO_BIN_EXE_loopnt"))
        .args(["analyze", f.to_str().unwrap()])
        .env("LOOPNT_FACTOR_BOUND", "nope")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_loopnt"))
        .args(["analyze", f.to_str().unwrap()])
        .env("LOOPNT_FACTOR_BOUND", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
