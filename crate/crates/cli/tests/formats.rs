use graphtomo::formats::{self, DecisionFlags, FormatError};
use graphtomo_core::dynamics::analytic_correlations_on;
use graphtomo_core::{build_laplacian, estimate, gen_er, rng_from_seed, EstimatorKind, Graph, ObservationSet};

fn sample_graph() -> Graph {
    gen_er(30, 0.2, &mut rng_from_seed(12)).unwrap()
}

fn to_string(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn edge_list_round_trip() {
    let g = sample_graph();
    let text = to_string(|w| formats::write_edge_list(w, &g));
    assert!(text.starts_with("n=30\n"));
    assert_eq!(formats::read_edge_list(text.as_bytes()).unwrap(), g);
}

#[test]
fn edge_list_accepts_comments_and_either_orientation() {
    let text = "# a comment\nn=4\n\n2 1\n# another\n3 4\n";
    let g = formats::read_edge_list(text.as_bytes()).unwrap();
    assert_eq!(g, Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap());
}

#[test]
fn malformed_edge_lists_report_the_line() {
    for (text, line) in [("n=3\n1 4\n", 2), ("n=3\n1 2\n2 x\n", 3), ("n=3\n2 2\n", 2), ("m=3\n", 1), ("n=3\n1 2 3\n", 2)] {
        match formats::read_edge_list(text.as_bytes()) {
            Err(FormatError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn matrix_round_trip_is_exact() {
    let a = build_laplacian(&sample_graph(), 0.7, 0.9).unwrap();
    let text = to_string(|w| formats::write_matrix(w, &a));
    let back = formats::read_matrix(text.as_bytes()).unwrap();
    assert_eq!(back.to_dense(), a.to_dense());
    assert_eq!(back.rho(), a.rho());
}

#[test]
fn matrix_with_unequal_columns_is_rejected() {
    let text = "n=2 rho=0.5\n1 1 0.5\n2 2 0.4\n";
    assert!(matches!(formats::read_matrix(text.as_bytes()), Err(FormatError::Parse { .. })));
    let wrong_rho = "n=2 rho=0.6\n1 1 0.5\n2 2 0.5\n";
    assert!(formats::read_matrix(wrong_rho.as_bytes()).is_err());
}

#[test]
fn correlations_and_estimates_round_trip() {
    let a = build_laplacian(&sample_graph(), 0.6, 1.0).unwrap();
    let s = ObservationSet::new(vec![0, 4, 9, 17], 30).unwrap();
    let pair = analytic_correlations_on(&a, &s).unwrap();
    let text = to_string(|w| formats::write_correlations(w, &pair));
    assert_eq!(formats::read_correlations(text.as_bytes()).unwrap(), pair);

    for kind in EstimatorKind::ALL {
        let est = estimate(kind, &pair).unwrap();
        let text = to_string(|w| formats::write_estimate(w, &est));
        assert!(text.contains("nodes=1,5,10,18"));
        assert_eq!(formats::read_estimate(text.as_bytes()).unwrap(), est);
    }
}

#[test]
fn decision_round_trip_keeps_flags() {
    let g = Graph::from_edges(3, &[(0, 2)]).unwrap();
    let flags = DecisionFlags { nodes: ObservationSet::new(vec![4, 7, 9], 10).unwrap(), threshold: 0.125, degenerate: true };
    let text = to_string(|w| formats::write_decision(w, &g, &flags));
    // Still a plain edge list.
    assert_eq!(formats::read_edge_list(text.as_bytes()).unwrap(), g);
    assert_eq!(formats::read_decision(text.as_bytes()).unwrap(), (g, flags));
}

#[test]
fn node_lists_accept_ranges() {
    let s = formats::parse_node_list("1-3, 7,5", 10).unwrap();
    assert_eq!(s.indices(), &[0, 1, 2, 4, 6]);
    assert!(formats::parse_node_list("0", 10).is_err());
    assert!(formats::parse_node_list("3-1", 10).is_err());
    assert!(formats::parse_node_list("11", 10).is_err());
}

#[test]
fn trajectory_csv_is_long_format() {
    let s = ObservationSet::new(vec![2, 5], 6).unwrap();
    let mut buf = Vec::new();
    let mut w = formats::TrajectoryWriter::new(&mut buf, &s).unwrap();
    w.record(11, &[0.5, -1.25]).unwrap();
    w.finish().unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "time,agent,value\n11,3,0.5\n11,6,-1.25\n");
}
