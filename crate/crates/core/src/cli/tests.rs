use super::*;

fn run_str(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("impvals").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn blame_example() {
    let (code, out, _) = run_str(&["blame", "--format", "formula", "--input", "x|y", "--rho", "exp", "--var", "x"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("5/8 = 0.625"), "{out}");
}

#[test]
fn default_target_is_first_variable() {
    let (_, out, _) = run_str(&["influence", "--input", "b & a | c"]);
    assert!(out.lines().nth(1).unwrap().starts_with('b'), "{out}");
}

#[test]
fn numeric_var_is_one_based() {
    let (_, a, _) = run_str(&["influence", "--input", "x | y & z", "--var", "2"]);
    let (_, b, _) = run_str(&["influence", "--input", "x | y & z", "--var", "y"]);
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(run_str(&["blame", "--input", "x|y", "--rho", "nope"]).0, EXIT_USAGE);
    assert_eq!(run_str(&["blame", "--input", "x|y", "--var", "q"]).0, EXIT_INPUT);
    assert_eq!(run_str(&["blame", "--input", "x|(y"]).0, EXIT_INPUT);
    assert_eq!(run_str(&["blame", "--cnf", "/nonexistent.cnf"]).0, EXIT_INPUT);
    let (code, _, err) = run_str(&["cgm", "--input", "a&b&c&d", "--cgm", "hkr", "--n-limit", "3"]);
    assert_eq!(code, EXIT_LIMIT, "{err}");
    let (code, _, _) = run_str(&[
        "blame", "--input", "x|y", "--engine", "pmc", "--counter", "/nonexistent/counter",
    ]);
    assert_eq!(code, EXIT_COUNTER);
    assert_eq!(run_str(&["--help"]).0, EXIT_OK);
}

#[test]
fn json_is_byte_stable() {
    let args = ["cgm", "--input", "x | (y ^ z)", "--all", "--json"];
    let (c1, a, _) = run_str(&args);
    let (c2, b, _) = run_str(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    let exact: Vec<&str> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["exact"].as_str().unwrap())
        .collect();
    assert_eq!(exact, ["3/4", "1/4", "1/4"]);
    assert!(v.get("wall_ms").is_none());
    let (_, t, _) = run_str(&["cgm", "--input", "x | (y ^ z)", "--json", "--timing"]);
    assert!(t.contains("wall_ms"));
}

#[test]
fn engines_agree() {
    for m in [&["blame"][..], &["blame", "--modified", "--rho", "frac"], &["influence"]] {
        let mut a: Vec<&str> = m.to_vec();
        a.extend(["--input", "(a ^ b) | c & !d", "--all", "--csv"]);
        let (_, bdd, _) = run_str(&a);
        a.extend(["--engine", "pmc"]);
        let (code, pmc, err) = run_str(&a);
        assert_eq!(code, 0, "{err}");
        assert_eq!(bdd, pmc);
    }
}

#[test]
fn jobs_do_not_change_results() {
    let base = ["blame", "--input", "a & (b | c) ^ d & e", "--all", "--csv"];
    let (_, one, _) = run_str(&base);
    let mut four = base.to_vec();
    four.extend(["--jobs", "4"]);
    assert_eq!(one, run_str(&four).1);
}

#[test]
fn rank_orders_ascending() {
    let (code, out, _) = run_str(&["rank", "--input", "x | (y ^ z)", "--measure", "cgm:dominating:banzhaf", "--csv"]);
    assert_eq!(code, 0);
    let vars: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(vars, ["y", "z", "x"]);
}

#[test]
fn dimacs_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("or.cnf");
    std::fs::write(&p, "p cnf 2 1\n1 2 0\n").unwrap();
    let (code, out, _) = run_str(&["blame", "--cnf", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("x1  5/8 = 0.625"), "{out}");
}

#[test]
fn encode_writes_projection() {
    let (code, out, _) = run_str(&["encode", "--input", "x | y", "-k", "1", "--modified"]);
    assert_eq!(code, 0);
    assert!(out.contains("c p show 1 2 0"), "{out}");
    let doc = parse_dimacs(&out).unwrap();
    assert_eq!(crate::pmc::count_projected_internal(&doc).unwrap(), 4u32.into());
}

#[test]
fn axioms_command() {
    let (code, out, _) = run_str(&["axioms", "--measure", "influence", "--n", "2"]);
    assert_eq!(code, 0);
    assert!(!out.contains("VIOLATED") && out.contains("modec"), "{out}");
    let (code, out, _) = run_str(&["axioms", "--measure", "influence", "--n", "3", "--seed", "5", "--budget", "20", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["all_hold"], true);
    let (code, _, _) = run_str(&["axioms", "--property", "no-such"]);
    assert_eq!(code, EXIT_USAGE);
}
