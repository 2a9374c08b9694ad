use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use tempfile::TempDir;
use toporeg::io::{
    feature_names, fmt_f64, parse_edge_list, read_diagrams, read_edge_list, read_labels, read_matrix, read_points, read_pseudotime, read_trace,
    write_diagrams, write_edge_list, write_labels, write_matrix, write_points, write_pseudotime, PseudotimeRow,
};
use toporeg::Error;
use toporeg_core::{Graph, PersistenceDiagram, PersistencePair, TraceRow};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, any::<f64>().prop_filter("finite", |x| x.is_finite()), Just(0.0), Just(-0.0), Just(f64::MIN_POSITIVE), Just(5e-324)]
}

fn ids(n: usize) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::btree_set("[a-zA-Z0-9_.-]{1,8}", n).prop_map(|s| s.into_iter().collect::<Vec<_>>())
}

fn bits(xs: &[f64]) -> Vec<u64> {
    xs.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn float_text_round_trips_exactly() {
    for x in [0.1, 1.0 / 3.0, 1e300, -2.5e-310, f64::MAX, f64::INFINITY, f64::NEG_INFINITY] {
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
    assert_eq!(fmt_f64(f64::INFINITY), "inf");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn points_round_trip(pts in proptest::collection::vec((finite(), finite()), 1..30).prop_flat_map(|p| {
        let n = p.len();
        (Just(p), ids(n))
    })) {
        let (pts, ids) = pts;
        let points: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("p.csv");
        write_points(&path, &ids, &points).unwrap();
        let back = read_points(&path).unwrap();
        prop_assert_eq!(&back.ids, &ids);
        prop_assert_eq!(bits(&back.points.concat()), bits(&points.concat()));
    }

    #[test]
    fn matrix_round_trip(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(finite(), 36)) {
        let data = DMatrix::from_fn(rows, cols, |r, c| seed[r * 6 + c]);
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("m.csv");
        write_matrix(&path, &feature_names(cols), &data).unwrap();
        let back = read_matrix(&path).unwrap();
        prop_assert_eq!(back.features, feature_names(cols));
        prop_assert_eq!(bits(back.data.as_slice()), bits(data.as_slice()));
    }

    #[test]
    fn diagrams_round_trip(raw in proptest::collection::vec((0usize..2, 0.0..10.0f64, 0.0..10.0f64, 0usize..100, proptest::option::of(0usize..100)), 0..20)) {
        let mut diagrams = vec![
            PersistenceDiagram { dimension: 0, pairs: Vec::new() },
            PersistenceDiagram { dimension: 1, pairs: Vec::new() },
        ];
        for (dimension, birth, extra, birth_simplex, death_simplex) in raw {
            let death = if death_simplex.is_some() { birth + extra } else { f64::INFINITY };
            diagrams[dimension].pairs.push(PersistencePair { dimension, birth, death, birth_simplex, death_simplex });
        }
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("d.csv");
        write_diagrams(&path, &diagrams).unwrap();
        let mut back = read_diagrams(&path).unwrap();
        while back.len() < 2 {
            back.push(PersistenceDiagram { dimension: back.len(), pairs: Vec::new() });
        }
        prop_assert_eq!(back, diagrams);
    }

    #[test]
    fn trace_round_trip(raw in proptest::collection::vec((finite(), finite(), 0.0..100.0f64), 0..20)) {
        let rows: Vec<TraceRow> = raw
            .iter()
            .enumerate()
            .map(|(epoch, &(e, t, s))| TraceRow { epoch, emb_loss: e, topo_loss: t, total_loss: e + t, seconds: s })
            .collect();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("t.csv");
        toporeg::io::write_trace(&path, &rows).unwrap();
        prop_assert_eq!(read_trace(&path).unwrap(), rows);
    }

    #[test]
    fn labels_and_pseudotime_round_trip(labels in proptest::collection::vec(0usize..5, 1..20).prop_flat_map(|l| {
        let n = l.len();
        (Just(l), ids(n), proptest::collection::vec(0.0..std::f64::consts::TAU, n))
    })) {
        let (labels, ids, times) = labels;
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("l.csv");
        write_labels(&path, &ids, &labels).unwrap();
        let back = read_labels(&path).unwrap();
        prop_assert_eq!(back, ids.iter().cloned().zip(labels.iter().copied()).collect::<Vec<_>>());

        let rows: Vec<PseudotimeRow> = ids
            .iter()
            .zip(&times)
            .enumerate()
            .map(|(k, (id, &t))| PseudotimeRow { id: id.clone(), pseudotime: t, segment: k, arc_position: t / 7.0 })
            .collect();
        let path = dir.path().join("pt.csv");
        write_pseudotime(&path, &rows).unwrap();
        prop_assert_eq!(read_pseudotime(&path).unwrap(), rows);
    }

    #[test]
    fn edge_lists_round_trip(raw in proptest::collection::btree_set((0usize..12, 0usize..12), 1..30)) {
        let edges: Vec<(usize, usize)> = raw.into_iter().filter(|(u, v)| u != v).collect();
        prop_assume!(!edges.is_empty());
        let graph = Graph::new(12, edges).unwrap();
        let names: Vec<String> = (0..12).map(|k| format!("node{k}")).collect();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("e.txt");
        write_edge_list(&path, &names, &graph).unwrap();
        let back = read_edge_list(&path).unwrap();
        let named = |g: &Graph, names: &[String]| -> BTreeSet<(String, String)> {
            g.edges()
                .iter()
                .map(|e| {
                    let (a, b) = (names[e[0]].clone(), names[e[1]].clone());
                    if a < b { (a, b) } else { (b, a) }
                })
                .collect()
        };
        prop_assert_eq!(named(&back.graph, &back.names), named(&graph, &names));
    }
}

#[test]
fn edge_list_skips_comments_and_blank_lines() {
    let g = parse_edge_list("inline".as_ref(), "# header\n\na b\n  b c  \n# tail\n").unwrap();
    assert_eq!(g.names, ["a", "b", "c"]);
    assert_eq!(g.graph.num_edges(), 2);
}

#[test]
fn malformed_inputs_report_the_line() {
    match parse_edge_list("x.txt".as_ref(), "a b\na b c\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "id,x,y\n0,1,2\n1,oops,3\n").unwrap();
    match read_points(&path) {
        Err(Error::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("oops"));
        }
        other => panic!("unexpected {other:?}"),
    }
    std::fs::write(&path, "a,b,c\n0,1,2\n").unwrap();
    assert!(matches!(read_points(&path), Err(Error::Parse { line: 1, .. })));
}
