use graphspace::ensembles::{barycenter, sample, scale_sbm, ErSpec, ModelSpec, SbmSpec, WaxmanSpec};
use graphspace::geometry::{edev_exact, edev_mc, sbm_barycenter_distance};
use graphspace::graph::{
    edit_distance, normalized_edit_distance, read_graph, write_graph, DegreeSequence, Multigraph, Partition,
};
use graphspace::inference::{fit_cfmd, fit_sbm, TestReport};
use graphspace::RngStream;
use proptest::prelude::*;

fn multigraph(n: usize, max_w: u64) -> impl Strategy<Value = Multigraph> {
    prop::collection::vec(0..=max_w, n * n).prop_map(move |w| Multigraph::from_weights(n, w).unwrap())
}

fn graph_triple() -> impl Strategy<Value = (Multigraph, Multigraph, Multigraph)> {
    (1usize..6).prop_flat_map(|n| (multigraph(n, 5), multigraph(n, 5), multigraph(n, 5)))
}

/// SBM with up to 3 blocks over up to 8 nodes, every block non-empty.
fn sbm_spec() -> impl Strategy<Value = SbmSpec> {
    (1usize..=3, 0usize..=5)
        .prop_flat_map(|(p, extra)| {
            (
                Just(p),
                prop::collection::vec(0..p, extra),
                prop::collection::vec(0u64..8, p * p),
            )
        })
        .prop_map(|(p, tail, counts)| {
            let block_of: Vec<usize> = (0..p).chain(tail).collect();
            let matrix = counts.chunks(p).map(|r| r.to_vec()).collect();
            SbmSpec::new(Partition::new(block_of).unwrap(), matrix).unwrap()
        })
}

fn degree_sequence() -> impl Strategy<Value = DegreeSequence> {
    (1usize..7)
        .prop_flat_map(|n| prop::collection::vec(0u64..5, n))
        .prop_flat_map(|k_out| {
            let n = k_out.len();
            let m: u64 = k_out.iter().sum();
            // spread the same total over the in-degrees
            (Just(k_out), prop::collection::vec(0..n, m as usize))
        })
        .prop_map(|(k_out, targets)| {
            let mut k_in = vec![0u64; k_out.len()];
            for t in targets {
                k_in[t] += 1;
            }
            DegreeSequence::new(k_out, k_in).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edit_distance_is_a_metric((a, b, c) in graph_triple()) {
        let ab = edit_distance(&a, &b).unwrap();
        prop_assert_eq!(edit_distance(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab, edit_distance(&b, &a).unwrap());
        prop_assert!(ab <= edit_distance(&a, &c).unwrap() + edit_distance(&c, &b).unwrap());
        prop_assert_eq!(ab == 0.0, a == b);
    }

    #[test]
    fn ned_within_an_ensemble_is_at_most_one(n in 1usize..6, m in 1u64..40, s in any::<u64>()) {
        let spec: ModelSpec = ErSpec::new(n, m).unwrap().into();
        let g = sample(&spec, RngStream::new(s, 0)).unwrap();
        let h = sample(&spec, RngStream::new(s, 1)).unwrap();
        let d = normalized_edit_distance(&g, &h, m as f64).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn er_samples_have_exact_size(n in 1usize..8, m in 0u64..60, s in any::<u64>()) {
        let g = sample(&ErSpec::new(n, m).unwrap().into(), RngStream::from_seed(s)).unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert_eq!(g.m(), m);
    }

    #[test]
    fn cfmd_samples_keep_degrees(d in degree_sequence(), s in any::<u64>()) {
        let g = sample(&d.clone().into(), RngStream::from_seed(s)).unwrap();
        prop_assert_eq!(g.degrees(), d.clone());
        prop_assert_eq!(fit_cfmd(&g).ok(), if d.m() > 0 { Some(d) } else { None });
    }

    #[test]
    fn sbm_samples_refit_to_their_spec(spec in sbm_spec(), s in any::<u64>()) {
        let g = sample(&spec.clone().into(), RngStream::from_seed(s)).unwrap();
        prop_assert_eq!(g.m(), spec.m());
        prop_assert_eq!(fit_sbm(&g, spec.partition()).unwrap(), spec);
    }

    #[test]
    fn waxman_samples_are_symmetric_and_simple(n in 1usize..12, alpha in 0.05f64..1.0, beta in 0.1f64..5.0, s in any::<u64>()) {
        let g = sample(&WaxmanSpec::new(n, alpha, beta, None).unwrap().into(), RngStream::from_seed(s)).unwrap();
        for i in 0..n {
            prop_assert_eq!(g.get(i, i), 0);
            for j in 0..n {
                prop_assert!(g.get(i, j) <= 1);
                prop_assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }

    #[test]
    fn barycenters_conserve_margins(d in degree_sequence(), spec in sbm_spec()) {
        if d.m() > 0 {
            let b = barycenter(&d.clone().into()).unwrap();
            let n = d.n();
            for i in 0..n {
                let row: f64 = (0..n).map(|j| b.get(i, j)).sum();
                let col: f64 = (0..n).map(|j| b.get(j, i)).sum();
                prop_assert!((row - d.k_out()[i] as f64).abs() < 1e-9);
                prop_assert!((col - d.k_in()[i] as f64).abs() < 1e-9);
            }
        }
        let b = barycenter(&spec.clone().into()).unwrap();
        prop_assert!((b.m() - spec.m() as f64).abs() < 1e-9);
    }

    #[test]
    fn exact_edev_lies_in_unit_interval(spec in sbm_spec(), s in any::<u64>()) {
        prop_assume!(spec.m() > 0);
        let model: ModelSpec = spec.into();
        let g = sample(&model, RngStream::from_seed(s)).unwrap();
        let e = edev_exact(&g, &model).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e), "{e}");
    }

    #[test]
    fn mc_estimate_is_deterministic(spec in sbm_spec(), s in any::<u64>()) {
        prop_assume!(spec.m() > 0);
        let model: ModelSpec = spec.into();
        let g = sample(&model, RngStream::new(s, 99)).unwrap();
        let a = edev_mc(&g, &model, 20, RngStream::from_seed(s)).unwrap();
        let b = edev_mc(&g, &model, 20, RngStream::from_seed(s)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn p_value_ignores_sample_order(mut x in prop::collection::vec(0.0f64..1.0, 1..30), y in 0.0f64..1.0, seed in any::<u64>()) {
        let a = TestReport::from_values(x.clone(), y, 0.05).unwrap();
        let mut rng = RngStream::from_seed(seed).rng();
        use rand::seq::SliceRandom;
        x.shuffle(&mut rng);
        let b = TestReport::from_values(x, y, 0.05).unwrap();
        prop_assert_eq!(a.p_value, b.p_value);
        prop_assert!(a.p_value >= 1.0 / (a.x.len() as f64 + 1.0));
        prop_assert!(a.p_value <= 1.0);
        prop_assert_eq!(a.reject, a.p_value <= 0.05);
    }

    #[test]
    fn barycenter_distance_is_scale_invariant(a in sbm_spec(), k in 1u64..50) {
        // second model: same partition, all edges moved into block (0, 0)
        let p = a.partition().num_blocks();
        let mut matrix = vec![vec![0u64; p]; p];
        matrix[0][0] = a.m();
        let b = SbmSpec::new(a.partition().clone(), matrix).unwrap();
        prop_assume!(a.m() > 0);
        let d = sbm_barycenter_distance(&a, &b).unwrap();
        let dk = sbm_barycenter_distance(&scale_sbm(&a, k).unwrap(), &scale_sbm(&b, k).unwrap()).unwrap();
        prop_assert_eq!(d, dk);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d), "{d}");
    }

    #[test]
    fn graph_files_round_trip(g in (1usize..6).prop_flat_map(|n| multigraph(n, 4))) {
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        prop_assert_eq!(read_graph(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn canonical_partition_is_idempotent(block_of in prop::collection::vec(0usize..4, 1..12)) {
        // relabel to a contiguous range first
        let mut seen = Vec::new();
        let dense: Vec<usize> = block_of.iter().map(|b| {
            if let Some(i) = seen.iter().position(|s| s == b) { i } else { seen.push(*b); seen.len() - 1 }
        }).collect();
        let p = Partition::new(dense).unwrap();
        let c = p.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert_eq!(c.block_sizes().iter().sum::<usize>(), p.n());
    }
}
