use qtet_core::graph::{load_graph, Graph};
use qtet_core::pipeline::{analyze, analyze_source, Config};

fn cfg() -> Config {
    Config::default()
}

#[test]
fn hypercube_names_the_beta_obstruction() {
    let out = analyze::<f64>(&Graph::hypercube(4).unwrap(), &cfg());
    assert_eq!(out.exit_code(), 4);
    let msg = out.report.status.message.unwrap();
    assert!(msg.contains("β = 2") && msg.contains("q² = 1"), "{msg}");
    assert!(out.report.qpoly.is_some());
}

#[test]
fn pentagon_has_diameter_two() {
    let out = analyze::<f64>(&Graph::cycle(5).unwrap(), &cfg());
    assert_eq!(out.exit_code(), 2);
    assert_eq!(out.report.graph.unwrap().diameter, Some(2));
}

#[test]
fn hexagon_has_diameter_three() {
    let out = analyze::<f64>(&Graph::cycle(6).unwrap(), &cfg());
    assert_eq!(out.report.graph.unwrap().diameter, Some(3));
}

#[test]
fn path_is_not_distance_regular() {
    let out = analyze::<f64>(&Graph::path(6).unwrap(), &cfg());
    assert_eq!(out.exit_code(), 2);
    assert!(out.report.status.message.unwrap().contains("not distance-regular"));
}

#[test]
fn disconnected_graph_is_rejected() {
    let out = analyze_source::<f64>("0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n", &cfg());
    assert_eq!(out.exit_code(), 2);
    assert!(load_graph("0 1\n2 3\n").is_err());
}

#[test]
fn malformed_source_is_a_parse_error() {
    assert_eq!(analyze_source::<f64>("cycle:x", &cfg()).exit_code(), 1);
    assert_eq!(analyze_source::<f64>("0 1\n1\n", &cfg()).exit_code(), 1);
}

#[test]
fn out_of_range_ordering_is_rejected() {
    let c = Config { ordering: 5, ..cfg() };
    assert_eq!(analyze::<f64>(&Graph::cycle(9).unwrap(), &c).exit_code(), 1);
}
