use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn gridcoh<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_gridcoh"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value printed after `label: ` on its own line.
fn field(text: &str, label: &str) -> f64 {
    let prefix = format!("{label}: ");
    let line = text
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("no '{label}' in output:\n{text}"));
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

fn selected_indices(result: &Path) -> Vec<usize> {
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(result).unwrap()).unwrap();
    json["selected"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["index"].as_u64().unwrap() as usize)
        .collect()
}

#[test]
fn evaluate_prints_known_topology_terms() {
    let text = stdout(&gridcoh(["evaluate".as_ref(), fixture("path3.json").as_os_str()]));
    assert!(text.contains("topology term: 1.333333333"), "{text}");

    let text = stdout(&gridcoh(["evaluate".as_ref(), fixture("triangle.json").as_os_str()]));
    assert!(text.contains("topology term: 2.000000000"), "{text}");
}

#[test]
fn metric_flag_overrides_the_file() {
    let file = stdout(&gridcoh(["evaluate".as_ref(), fixture("triangle.json").as_os_str()]));
    let flag = stdout(&gridcoh([
        "evaluate".as_ref(),
        fixture("triangle.json").as_os_str(),
        "--metric".as_ref(),
        "losses".as_ref(),
    ]));
    assert_eq!(field(&file, "topology term"), field(&flag, "topology term"));
    let coherence = stdout(&gridcoh([
        "evaluate".as_ref(),
        fixture("triangle.json").as_os_str(),
        "--metric".as_ref(),
        "coherence".as_ref(),
    ]));
    assert_ne!(field(&file, "topology term"), field(&coherence, "topology term"));
}

#[test]
fn gramian_agrees_with_closed_form_on_the_command_line() {
    let text = stdout(&gridcoh(["evaluate".as_ref(), fixture("path3.json").as_os_str(), "--gramian".as_ref()]));
    let closed = field(&text, "h2 squared");
    let gramian = field(&text, "h2 squared (gramian)");
    assert!((closed - gramian).abs() <= 1e-8 * closed, "{text}");
}

#[test]
fn radial_design_matches_brute_force_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let bnb = dir.path().join("bnb.json");
    let brute = dir.path().join("brute.json");
    for (solver, out) in [("bnb", &bnb), ("brute", &brute)] {
        stdout(&gridcoh([
            "design".as_ref(),
            fixture("four_node.json").as_os_str(),
            "--mode".as_ref(),
            "radial".as_ref(),
            "--solver".as_ref(),
            solver.as_ref(),
            "--out".as_ref(),
            out.as_os_str(),
        ]));
    }
    let chosen = selected_indices(&bnb);
    assert_eq!(chosen.len(), 3);
    assert!(chosen.contains(&0), "the only line to bus 0 must be kept: {chosen:?}");
    assert_eq!(chosen, selected_indices(&brute));

    let text = stdout(&gridcoh([
        "evaluate".as_ref(),
        fixture("four_node.json").as_os_str(),
        "--result".as_ref(),
        bnb.as_os_str(),
    ]));
    let stored = field(&text, "stored objective");
    assert!((stored - field(&text, "topology term")).abs() <= 1e-9 * stored);
}

#[test]
fn loose_bounds_reach_the_same_optimum() {
    let run = |bounds: &str| {
        let text = stdout(&gridcoh([
            "design",
            fixture("augment5.json").to_str().unwrap(),
            "--mode",
            "augment",
            "--add-lines",
            "2",
            "--bounds",
            bounds,
        ]));
        field(&text, "objective (topology term)")
    };
    let auto = run("auto");
    let loose = run("loose");
    assert!((auto - loose).abs() <= 1e-9 * auto, "auto {auto}, loose {loose}");
}

#[test]
fn budget_and_add_lines_describe_the_same_problem() {
    let run = |flag: &str, value: &str| {
        let text = stdout(&gridcoh([
            "design",
            fixture("augment5.json").to_str().unwrap(),
            "--mode",
            "augment",
            flag,
            value,
        ]));
        field(&text, "objective (topology term)")
    };
    assert_eq!(run("--budget", "6"), run("--add-lines", "2"));
}

#[test]
fn exported_model_is_lp_text() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("model.lp");
    stdout(&gridcoh([
        "design".as_ref(),
        fixture("four_node.json").as_os_str(),
        "--mode".as_ref(),
        "radial".as_ref(),
        "--export-model".as_ref(),
        lp.as_os_str(),
    ]));
    let text = std::fs::read_to_string(&lp).unwrap();
    for section in ["Minimize", "Subject To", "Bounds", "Binaries", "End"] {
        assert!(text.contains(section), "missing {section}");
    }
}

#[test]
fn radial_budget_must_be_a_spanning_tree() {
    let out = gridcoh([
        "design",
        fixture("four_node.json").to_str().unwrap(),
        "--mode",
        "radial",
        "--budget",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let code = |name: &str| gridcoh(["evaluate".as_ref(), fixture(name).as_os_str()]).status.code();
    for name in [
        "malformed/missing_reference.json",
        "malformed/duplicate_line.json",
        "malformed/nonpositive_susceptance.json",
        "malformed/wrong_schema.json",
        "no_such_file.json",
    ] {
        assert_eq!(code(name), Some(1), "{name}");
    }
    assert_eq!(code("malformed/zero_inertia.json"), Some(3));
    assert_eq!(code("malformed/disconnected.json"), Some(2));
}

#[test]
fn tampered_result_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let result = dir.path().join("r.json");
    stdout(&gridcoh([
        "design".as_ref(),
        fixture("four_node.json").as_os_str(),
        "--mode".as_ref(),
        "radial".as_ref(),
        "--out".as_ref(),
        result.as_os_str(),
    ]));
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    json["objective"] = serde_json::json!(json["objective"].as_f64().unwrap() * 1.01);
    std::fs::write(&result, json.to_string()).unwrap();
    let out = gridcoh([
        "evaluate".as_ref(),
        fixture("four_node.json").as_os_str(),
        "--result".as_ref(),
        result.as_os_str(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_marks_the_cheapest_selection() {
    let text = stdout(&gridcoh(["compare", fixture("augment5.json").to_str().unwrap(), "--lines", "4", "--lines", "4,5"]));
    let marked: Vec<&str> = text.lines().filter(|l| l.ends_with(" *")).collect();
    assert_eq!(marked.len(), 1, "{text}");
    assert!(marked[0].starts_with("+4,5"), "{text}");
}

fn simulate(net: &str, dt: &str, out: Option<&Path>) -> String {
    let mut args: Vec<String> = ["simulate", net, "--impulse-bus", "0", "--horizon", "40", "--dt", dt]
        .map(String::from)
        .to_vec();
    if let Some(p) = out {
        args.push("--out".into());
        args.push(p.to_str().unwrap().into());
    }
    stdout(&gridcoh(args))
}

#[test]
fn simulation_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let net = fixture("path3.json");
    simulate(net.to_str().unwrap(), "0.01", Some(&a));
    simulate(net.to_str().unwrap(), "0.01", Some(&b));
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let header = String::from_utf8(first).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "t,theta_0,theta_1,theta_2,omega_0,omega_1,omega_2,fc,f");
}

#[test]
fn single_bus_energy_matches_the_analytic_value() {
    let text = simulate(fixture("single_bus.json").to_str().unwrap(), "0.001", None);
    let energy = field(&text, "output energy");
    // s / (2 M d) with s = 3, M = 2, d = 0.5
    assert!((energy - 1.5).abs() < 1e-3 * 1.5, "energy {energy}");
}

#[test]
fn halving_the_step_barely_moves_the_energy() {
    let net = fixture("path3.json");
    let coarse = field(&simulate(net.to_str().unwrap(), "0.01", None), "output energy");
    let fine = field(&simulate(net.to_str().unwrap(), "0.005", None), "output energy");
    assert!((coarse - fine).abs() < 1e-3 * fine, "coarse {coarse}, fine {fine}");
}
