use std::process::{Command, Output};

fn gjms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gjms")).args(args).env_remove("GJMS_ORDER").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compute_json() {
    let o = gjms(&[
        "compute",
        "qe",
        "--d",
        "3",
        "--m",
        "2",
        "--lambda",
        "1",
        "--k",
        "2",
        "--route",
        "factorization",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["poly_sigma"], serde_json::json!(["105/4", "-11", "1"]));
    assert_eq!(v["background"]["kind"], "quasi_einstein");
}

#[test]
fn compute_text() {
    let o = gjms(&["compute", "gl", "--d", "3", "--m", "2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "sigma + 3/4\n");
}

#[test]
fn compute_all_routes_sorted() {
    let o = gjms(&["compute", "qe", "--d", "3", "--m", "2", "--lambda", "-1", "--kmax", "2", "--route", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let routes: Vec<&str> = text.lines().map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(
        routes[..5],
        ["k=1 factorization", "k=1 iterated", "k=1 obstruction", "k=1 recursion", "k=1 scattering"]
    );
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn restricted_k_is_usage_error() {
    let o = gjms(&["compute", "qe", "--d", "4", "--m", "2", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
    let o = gjms(&["compute", "qe", "--d", "4", "--m", "2", "--k", "4", "--allow-unrestricted", "--route", "iterated"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn malformed_input_is_usage_error() {
    assert_eq!(gjms(&["compute", "qe", "--d", "3", "--m", "2/0", "--k", "1"]).status.code(), Some(2));
    assert_eq!(gjms(&["compute", "xx", "--d", "3", "--m", "2", "--k", "1"]).status.code(), Some(2));
    assert_eq!(gjms(&["compute", "gl", "--d", "3", "--m", "2", "--lambda", "1", "--k", "1"]).status.code(), Some(2));
    assert_eq!(gjms(&["compute", "qe", "--d", "2", "--m", "0", "--k", "1"]).status.code(), Some(2));
    assert_eq!(gjms(&["table", "qe", "--d", "3,x", "--k", "1"]).status.code(), Some(2));
    assert_eq!(gjms(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn table_counts() {
    let o = gjms(&["table", "qe", "--d", "3,4,5", "--m", "1,2", "--lambda", "-1,1", "--k", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    // d = 3, m = 1 cannot take k = 3
    assert_eq!(text.lines().count(), 1 + 36 - 2);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true,true")));

    let o = gjms(&["table", "gl", "--d", "2,3", "--m", "1/2,2", "--k", "1,2"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 8);

    let o = gjms(&["table", "qe", "--k", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn table_long_and_json() {
    let o = gjms(&["table", "gl", "--d", "3", "--m", "2", "--k", "1,2", "--long"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 5);
    let o = gjms(&["table", "gl", "--d", "3", "--m", "2", "--k", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["all_agree"], true);
    assert_eq!(v[0]["routes"]["factorization"]["poly_sigma"], serde_json::json!(["-15/16", "-1/2", "1"]));
}

#[test]
fn spaceform() {
    let o = gjms(&["spaceform", "--d", "2", "--m", "2", "--mu", "1", "--kappa", "1", "--f0", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["is_quasi_einstein"], true);
    assert_eq!(v["p_coeff"], "1/6");
    let o = gjms(&["spaceform", "--d", "3", "--m", "2", "--kappa", "-1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["is_gover_leitner"], true);
    assert_eq!(v["is_quasi_einstein"], false);
    assert_eq!(gjms(&["spaceform", "--d", "2", "--m", "0", "--kappa", "1"]).status.code(), Some(2));
}

#[test]
fn extend_explorer() {
    let o = gjms(&["extend", "qe", "--d", "3", "--m", "2", "--lambda", "1", "--w", "-1/3", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = gjms(&["extend", "qe", "--d", "3", "--m", "2", "--lambda", "1", "--w", "-1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("l = 2"));
}

#[test]
fn order_env_override() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gjms"));
        c.args(["extend", "gl", "--d", "3", "--m", "2", "--w", "-1/3"]);
        match env {
            Some(v) => c.env("GJMS_ORDER", v),
            None => c.env_remove("GJMS_ORDER"),
        };
        c.output().unwrap()
    };
    assert_eq!(stdout(&run(None)).lines().count(), 9);
    assert_eq!(stdout(&run(Some("2"))).lines().count(), 3);
    assert_eq!(run(Some("lots")).status.code(), Some(2));
}

#[test]
fn verify_sl2_and_fault() {
    let o = gjms(&["verify", "sl2", "--kmax", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
    let o = gjms(&["verify", "sl2", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("lhs = 1, rhs = 0"));
}
