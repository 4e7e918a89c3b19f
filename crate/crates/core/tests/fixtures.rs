use std::path::PathBuf;

use gridcoh::cases::{ieee39_north, ieee39_with_candidates};
use gridcoh::dynamics::{h2_squared_closed_form, MetricPreset};
use gridcoh::io::{MetricEntry, NetworkFile};
use gridcoh::netgraph::build_laplacian;
use gridcoh::{Error, PowerNetwork};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> (NetworkFile, PowerNetwork) {
    let file = NetworkFile::read(fixture(name)).unwrap();
    let net = file.network().unwrap();
    (file, net)
}

#[test]
fn benchmark_fixtures_match_built_in_cases() {
    assert_eq!(load("ieee39.json").1, ieee39_with_candidates());
    assert_eq!(load("ieee39_north.json").1, ieee39_north());
}

#[test]
fn tree_fixtures_are_spanning_trees_of_the_subnetwork() {
    let north = ieee39_north();
    for name in ["north_optimal_tree.json", "north_greedy_tree.json"] {
        let (_, tree) = load(name);
        assert_eq!(tree.n_buses(), north.n_buses());
        assert_eq!(tree.lines().len(), north.n_buses() - 1);
        assert!(tree.lines().iter().all(|l| north.lines().iter().any(|c| c.key() == l.key())));
        assert_eq!(tree.existing_indices().len(), tree.lines().len());
    }
}

#[test]
fn small_fixtures_evaluate_to_known_values() {
    let (file, net) = load("path3.json");
    assert_eq!(file.metric, Some(MetricEntry::Preset { preset: MetricPreset::Coherence }));
    let spec = file.metric_spec(&net).unwrap().unwrap();
    let l = build_laplacian(net.lines(), 3, net.reference());
    let h2 = h2_squared_closed_form(&spec, &l, &net.machine_params()).unwrap();
    assert!((h2.topology_term - 4.0 / 3.0).abs() < 1e-12);

    let (file, net) = load("triangle.json");
    let spec = file.metric_spec(&net).unwrap().unwrap();
    let l = build_laplacian(net.lines(), 3, net.reference());
    let h2 = h2_squared_closed_form(&spec, &l, &net.machine_params()).unwrap();
    assert!((h2.topology_term - 2.0).abs() < 1e-12);

    let (file, net) = load("single_bus.json");
    let spec = file.metric_spec(&net).unwrap().unwrap();
    let l = build_laplacian(net.lines(), 1, 0);
    let h2 = h2_squared_closed_form(&spec, &l, &net.machine_params()).unwrap();
    assert!((h2.total - 3.0 / (2.0 * 2.0 * 0.5)).abs() < 1e-12);
}

#[test]
fn malformed_fixtures_are_rejected() {
    let parse = |name: &str| NetworkFile::read(fixture(&format!("malformed/{name}"))).and_then(|f| f.network());
    assert!(matches!(parse("missing_reference.json"), Err(Error::InvalidNetwork(_))));
    assert!(matches!(parse("duplicate_line.json"), Err(Error::InvalidNetwork(_))));
    assert!(matches!(parse("nonpositive_susceptance.json"), Err(Error::InvalidNetwork(_))));
    assert!(matches!(parse("zero_inertia.json"), Err(Error::ZeroInertia(1))));
    assert!(matches!(parse("wrong_schema.json"), Err(Error::InvalidNetwork(_))));
    assert!(parse("disconnected.json").is_ok());
}
