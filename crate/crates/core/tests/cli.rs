use pinchcert::cli::{run, EXIT_USAGE};

fn pinchcert(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("pinchcert").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_passes_and_reports_every_step() {
    let (code, out, err) = pinchcert(&["verify"]);
    assert_eq!(code, 0, "{}", err);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let steps = v["verify"].as_array().unwrap();
    assert_eq!(steps.len(), 11);
    assert!(steps.iter().all(|s| s["verdict"] == "verified"));
}

#[test]
fn single_step_runs_its_dependencies() {
    let (code, out, _) = pinchcert(&["--format", "csv", "verify", "--step", "S8"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("S8,"));
}

#[test]
fn bound_at_five_uses_the_first_bound() {
    let (code, out, _) = pinchcert(&["bound", "--n-min", "5", "--n-max", "6"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let five = &v["bound"][0];
    assert_eq!(five["branch"], "eq316");
    assert_eq!(five["eq316_strictly_above"], true);
    assert!(five["bound_final"]["mid"].as_str().unwrap().starts_with("8.41753"));
    assert_eq!(v["bound"][1]["branch"], "refined");
}

#[test]
fn split_outside_unit_interval_is_a_configuration_error() {
    let (code, out, err) = pinchcert(&["bootstrap", "--t-star", "1.5", "--n", "6"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(!err.is_empty());
    assert_eq!(pinchcert(&["bootstrap", "--t-star", "abc", "--n", "6"]).0, EXIT_USAGE);
    assert_eq!(pinchcert(&["bootstrap", "--t-star", "0.45", "--n", "4"]).0, EXIT_USAGE);
}

#[test]
fn bootstrap_trace_has_k_entries() {
    let (code, out, _) = pinchcert(&["bootstrap", "--t-star", "0.452115", "--n", "6", "--k", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bootstrap"]["entries"].as_array().map(Vec::len), Some(3));
}

#[test]
fn small_campaign_is_clean_and_reproducible() {
    let args = ["falsify", "--n-min", "5", "--n-max", "7", "--samples", "300", "--seed", "9"];
    let (code, first, _) = pinchcert(&args);
    assert_eq!(code, 0);
    assert_eq!(first, pinchcert(&args).1);
}

#[test]
fn output_file_receives_the_data() {
    let dir = std::env::temp_dir().join(format!("pinchcert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("constants.md");
    let (code, out, _) = pinchcert(&["--format", "md", "--out", path.to_str().unwrap(), "constants"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("slope_316"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn precision_is_validated() {
    assert_eq!(pinchcert(&["--precision", "16", "constants"]).0, EXIT_USAGE);
    assert_eq!(pinchcert(&["--precision", "64", "constants"]).0, 0);
    assert_eq!(pinchcert(&["--version"]).0, 0);
    assert_eq!(pinchcert(&["nonsense"]).0, EXIT_USAGE);
}
