mod support;

use proptest::prelude::*;
use support::{mst_edge_lengths, naive_alpha_complex, naive_persistence, random_cloud, NaivePair};
use toporeg_core::geometry::Point;
use toporeg_core::{alpha_filtration, betti, compute_persistence, PointCloud};

fn library_pairs(points: &[Point]) -> Vec<NaivePair> {
    let cloud = PointCloud::new(points.to_vec()).unwrap();
    let filtration = alpha_filtration(&cloud).unwrap();
    let pers = compute_persistence(&filtration, 1);
    let verts = |s: usize| filtration.simplices()[s].vertices().to_vec();
    pers.diagrams
        .iter()
        .flat_map(|d| d.pairs.iter())
        .map(|p| NaivePair {
            dimension: p.dimension,
            birth: p.birth,
            death: p.death,
            birth_vertices: verts(p.birth_simplex),
            death_vertices: p.death_simplex.map(verts),
        })
        .collect()
}

fn sorted(mut pairs: Vec<NaivePair>) -> Vec<NaivePair> {
    pairs.sort_by(|a, b| a.dimension.cmp(&b.dimension).then(a.birth_vertices.cmp(&b.birth_vertices)));
    pairs
}

fn assert_same_pairs(ours: Vec<NaivePair>, oracle: Vec<NaivePair>) {
    let (ours, oracle) = (sorted(ours), sorted(oracle));
    assert_eq!(ours.len(), oracle.len(), "{ours:?}\n{oracle:?}");
    for (a, b) in ours.iter().zip(&oracle) {
        assert_eq!(a.dimension, b.dimension);
        assert_eq!(a.birth_vertices, b.birth_vertices);
        assert_eq!(a.death_vertices, b.death_vertices);
        assert!((a.birth - b.birth).abs() <= 1e-9);
        if b.death.is_finite() {
            assert!((a.death - b.death).abs() <= 1e-9);
        } else {
            assert!(a.death.is_infinite());
        }
    }
}

#[test]
fn diagrams_match_dense_reduction_of_brute_force_complex() {
    for seed in 0..200u64 {
        let n = 4 + (seed % 6) as usize;
        let points = random_cloud(seed, n);
        let oracle = naive_persistence(&naive_alpha_complex(&points));
        let oracle: Vec<NaivePair> = oracle.into_iter().filter(|p| p.dimension <= 1).collect();
        assert_same_pairs(library_pairs(&points), oracle);
    }
}

#[test]
fn finite_zero_dimensional_deaths_are_half_mst_edges_squared() {
    for seed in 1000..1100u64 {
        let points = random_cloud(seed, 20);
        let cloud = PointCloud::new(points.clone()).unwrap();
        let pers = compute_persistence(&alpha_filtration(&cloud).unwrap(), 0);
        let mut deaths: Vec<f64> = pers.diagram(0).finite().map(|p| p.death).collect();
        let mut expected: Vec<f64> = mst_edge_lengths(&points).iter().map(|l| (l / 2.0).powi(2)).collect();
        deaths.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        assert_eq!(deaths.len(), expected.len());
        for (d, e) in deaths.iter().zip(&expected) {
            assert!((d - e).abs() <= 1e-9, "seed {seed}: {d} vs {e}");
        }
    }
}

#[test]
fn square_with_center_point_has_no_loop() {
    let points = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
    let pers = compute_persistence(&alpha_filtration(&PointCloud::new(points).unwrap()).unwrap(), 1);
    assert!(pers.diagram(1).is_empty());
    assert_eq!(pers.diagram(0).finite().count(), 4);
}

#[test]
fn hexagon_loop_is_born_at_half_side_squared() {
    let points: Vec<Point> = (0..6)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / 3.0;
            [a.cos(), a.sin()]
        })
        .collect();
    let pers = compute_persistence(&alpha_filtration(&PointCloud::new(points).unwrap()).unwrap(), 1);
    let h1 = pers.diagram(1);
    assert_eq!(h1.len(), 1);
    assert!((h1.pairs[0].birth - 0.25).abs() < 1e-12);
    // Equilateral triangles on alternate vertices have circumradius 1.
    assert!((h1.pairs[0].death - 1.0).abs() < 1e-12);
}

fn cloud_strategy() -> impl Strategy<Value = Vec<Point>> {
    (3usize..30, any::<u64>()).prop_map(|(n, seed)| random_cloud(seed, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_essential_component_and_n_minus_one_merges(points in cloud_strategy()) {
        let cloud = PointCloud::new(points.clone()).unwrap();
        let pers = compute_persistence(&alpha_filtration(&cloud).unwrap(), 1);
        let h0 = pers.diagram(0);
        prop_assert_eq!(h0.pairs.iter().filter(|p| p.is_essential()).count(), 1);
        prop_assert_eq!(h0.finite().count(), points.len() - 1);
        prop_assert!(pers.diagram(1).pairs.iter().all(|p| !p.is_essential()));
    }

    #[test]
    fn pairs_are_ordered_and_born_before_death(points in cloud_strategy()) {
        let cloud = PointCloud::new(points).unwrap();
        let pers = compute_persistence(&alpha_filtration(&cloud).unwrap(), 1);
        for d in &pers.diagrams {
            for w in d.pairs.windows(2) {
                prop_assert!(w[0].persistence() >= w[1].persistence());
            }
            prop_assert!(d.pairs.iter().all(|p| p.birth < p.death));
        }
    }

    #[test]
    fn betti_zero_counts_components(points in cloud_strategy(), t in 0.0f64..0.5) {
        let cloud = PointCloud::new(points.clone()).unwrap();
        let pers = compute_persistence(&alpha_filtration(&cloud).unwrap(), 0);
        // Components of the graph joining points closer than 2 sqrt(t).
        let r2 = 4.0 * t;
        let n = points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x { let r = find(p, p[x]); p[x] = r; }
            p[x]
        }
        for i in 0..n {
            for j in i + 1..n {
                let d2 = (points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2);
                if d2 <= r2 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let components = (0..n).filter(|&i| find(&mut parent, i) == i).count();
        prop_assert_eq!(betti(pers.diagram(0), t), components);
    }

    #[test]
    fn diagrams_are_invariant_under_rigid_motion(points in cloud_strategy(), angle in 0.0f64..std::f64::consts::TAU, dx in -5.0f64..5.0) {
        let (s, c) = angle.sin_cos();
        let moved: Vec<Point> = points.iter().map(|p| [c * p[0] - s * p[1] + dx, s * p[0] + c * p[1] - dx]).collect();
        let a = compute_persistence(&alpha_filtration(&PointCloud::new(points).unwrap()).unwrap(), 1);
        let b = compute_persistence(&alpha_filtration(&PointCloud::new(moved).unwrap()).unwrap(), 1);
        for dim in 0..2 {
            let (da, db) = (a.diagram(dim), b.diagram(dim));
            prop_assert_eq!(da.len(), db.len());
            for (x, y) in da.pairs.iter().zip(&db.pairs) {
                prop_assert!((x.persistence() - y.persistence()).abs() <= 1e-9 * (1.0 + x.persistence().abs()) || x.is_essential());
            }
        }
    }
}
