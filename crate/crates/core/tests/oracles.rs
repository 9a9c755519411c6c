//! Brute-force and enumeration oracles, independent of the closed forms
//! they check.

use graphspace::ensembles::{barycenter, entropy, sample, ErSpec, ModelSpec, SbmSpec, WaxmanSpec};
use graphspace::geometry::{edev_exact, edev_mc};
use graphspace::graph::{DegreeSequence, Multigraph, Partition};
use graphspace::inference::{greedy_min_entropy_partition, partition_entropy, permutation_test};
use graphspace::RngStream;

/// Every equally likely placement sequence of an edge-placement ensemble:
/// edge `e` lands uniformly on one of `slots[e]`.
fn enumerate_placements(n: usize, slots: &[Vec<usize>], visit: &mut impl FnMut(&Multigraph)) {
    fn go(n: usize, slots: &[Vec<usize>], w: &mut Vec<u64>, visit: &mut impl FnMut(&Multigraph)) {
        match slots.split_first() {
            None => visit(&Multigraph::from_weights(n, w.clone()).unwrap()),
            Some((cells, rest)) => {
                for &c in cells {
                    w[c] += 1;
                    go(n, rest, w, visit);
                    w[c] -= 1;
                }
            }
        }
    }
    go(n, slots, &mut vec![0; n * n], visit);
}

fn placement_slots(spec: &ModelSpec) -> (usize, Vec<Vec<usize>>) {
    match spec {
        ModelSpec::Er(s) => {
            let n = s.n();
            (n, vec![(0..n * n).collect(); s.m() as usize])
        }
        ModelSpec::Sbm(s) => {
            let n = s.n();
            let part = s.partition();
            let mut slots = Vec::new();
            for (r, row) in s.block_matrix().iter().enumerate() {
                for (t, &count) in row.iter().enumerate() {
                    let cells: Vec<usize> = (0..n * n)
                        .filter(|c| part.block_of(c / n) == r && part.block_of(c % n) == t)
                        .collect();
                    slots.extend(std::iter::repeat_n(cells, count as usize));
                }
            }
            (n, slots)
        }
        _ => unreachable!(),
    }
}

fn brute_edev(g: &Multigraph, spec: &ModelSpec) -> f64 {
    let (n, slots) = placement_slots(spec);
    let m = spec.total_edges().unwrap() as f64;
    let (mut total, mut count) = (0.0, 0.0);
    enumerate_placements(n, &slots, &mut |h| {
        let ed: u64 = g.weights().iter().zip(h.weights()).map(|(&a, &b)| a.abs_diff(b)).sum();
        total += ed as f64 / (2.0 * m);
        count += 1.0;
    });
    total / count
}

fn two_by_two_sbm() -> SbmSpec {
    SbmSpec::new(Partition::new(vec![0, 1, 1]).unwrap(), vec![vec![1, 2], vec![0, 2]]).unwrap()
}

#[test]
fn exact_edev_matches_enumeration() {
    let cases: Vec<(Multigraph, ModelSpec)> = vec![
        (
            Multigraph::from_rows(vec![vec![0, 1], vec![0, 0]]).unwrap(),
            ErSpec::new(2, 1).unwrap().into(),
        ),
        (
            Multigraph::from_rows(vec![vec![3, 0], vec![0, 0]]).unwrap(),
            ErSpec::new(2, 3).unwrap().into(),
        ),
        (
            Multigraph::from_rows(vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 0, 1]]).unwrap(),
            ErSpec::new(3, 5).unwrap().into(),
        ),
        (
            Multigraph::from_rows(vec![vec![1, 0, 2], vec![0, 1, 0], vec![0, 0, 1]]).unwrap(),
            two_by_two_sbm().into(),
        ),
        (
            Multigraph::from_rows(vec![vec![5, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]).unwrap(),
            two_by_two_sbm().into(),
        ),
    ];
    for (g, spec) in cases {
        let want = brute_edev(&g, &spec);
        let got = edev_exact(&g, &spec).unwrap();
        assert!((got - want).abs() < 1e-12, "{spec:?}: {got} vs {want}");
    }
}

#[test]
fn er_one_edge_example() {
    let g = Multigraph::from_rows(vec![vec![0, 1], vec![0, 0]]).unwrap();
    let spec: ModelSpec = ErSpec::new(2, 1).unwrap().into();
    // 4 equally likely outcomes: distance 0 once, 1 three times
    assert_eq!(brute_edev(&g, &spec), 0.75);
    assert!((edev_exact(&g, &spec).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn cfmd_barycenter_matches_all_stub_matchings() {
    let d = DegreeSequence::new(vec![2, 1, 0, 1], vec![1, 1, 2, 0]).unwrap();
    let n = d.n();
    let outs: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, d.k_out()[i] as usize)).collect();
    let ins: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, d.k_in()[i] as usize)).collect();
    let mut mean = vec![0.0; n * n];
    let mut count = 0.0;
    // Heap's algorithm over in-stub orderings
    fn permute(k: usize, a: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            visit(a);
            return;
        }
        for i in 0..k {
            permute(k - 1, a, visit);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    let mut perm = ins.clone();
    let len = perm.len();
    permute(len, &mut perm, &mut |p| {
        for (u, v) in outs.iter().zip(p) {
            mean[u * n + v] += 1.0;
        }
        count += 1.0;
    });
    let b = barycenter(&d.into()).unwrap();
    for (i, w) in mean.iter().enumerate() {
        assert!((w / count - b.weights()[i]).abs() < 1e-12, "cell {i}");
    }
}

#[test]
fn sample_means_converge_to_barycenters() {
    let specs: Vec<ModelSpec> = vec![
        ErSpec::new(3, 6).unwrap().into(),
        DegreeSequence::new(vec![3, 1, 2], vec![2, 2, 2]).unwrap().into(),
        two_by_two_sbm().into(),
        WaxmanSpec::new(4, 0.3, 0.9, Some(vec![[0.0, 0.0], [0.1, 0.2], [0.9, 0.8], [0.5, 0.5]]))
            .unwrap()
            .into(),
    ];
    let draws = 2000;
    for (s, spec) in specs.iter().enumerate() {
        let n = spec.n();
        let b = barycenter(spec).unwrap();
        let mut sum = vec![0.0; n * n];
        let mut sq = vec![0.0; n * n];
        for t in 0..draws {
            let g = sample(spec, RngStream::new(s as u64, t)).unwrap();
            for (c, &w) in g.weights().iter().enumerate() {
                sum[c] += w as f64;
                sq[c] += (w * w) as f64;
            }
        }
        for c in 0..n * n {
            let mean = sum[c] / draws as f64;
            let var = (sq[c] / draws as f64 - mean * mean).max(0.0);
            let se = (var / draws as f64).sqrt();
            let gap = (mean - b.weights()[c]).abs();
            assert!(gap <= 4.0 * se + 1e-12, "{} cell {c}: mean {mean} vs {}", spec.name(), b.weights()[c]);
        }
    }
}

/// Counts all weight vectors on `cells` cells summing to `m`.
fn count_compositions(cells: usize, m: u64) -> u64 {
    if cells == 1 {
        return 1;
    }
    (0..=m).map(|first| count_compositions(cells - 1, m - first)).sum()
}

#[test]
fn entropies_match_direct_counts() {
    let er = entropy(&ErSpec::new(2, 3).unwrap().into()).unwrap();
    assert!((er.nats - (count_compositions(4, 3) as f64).ln()).abs() < 1e-12);
    assert!(!er.approximate);

    // blocks {0}, {1, 2}: block pairs have 1, 2, 2 and 4 cells
    let sbm = entropy(&two_by_two_sbm().into()).unwrap();
    let count = count_compositions(1, 1) * count_compositions(2, 2) * count_compositions(4, 2);
    assert!((sbm.nats - (count as f64).ln()).abs() < 1e-12);
}

#[test]
fn greedy_separates_two_cliques() {
    let mut g = Multigraph::empty(8).unwrap();
    for base in [0, 4] {
        for i in base..base + 4 {
            for j in base..base + 4 {
                if i != j {
                    g.add_edges(i, j, 1);
                }
            }
        }
    }
    // every 2-partition with both blocks non-empty
    let mut best = f64::INFINITY;
    let mut argmin = Vec::new();
    for mask in 1u32..(1 << 8) - 1 {
        let block_of: Vec<usize> = (0..8).map(|i| ((mask >> i) & 1) as usize).collect();
        let p = Partition::new(block_of.clone()).unwrap();
        let h = partition_entropy(&g, &p).unwrap();
        if h < best - 1e-9 {
            best = h;
            argmin = vec![p.canonical()];
        } else if (h - best).abs() <= 1e-9 {
            argmin.push(p.canonical());
        }
    }
    let components = Partition::new(vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
    assert!(argmin.iter().all(|p| *p == components), "minimum not unique to the components");

    let found = greedy_min_entropy_partition(&g, 2, 8, RngStream::from_seed(3)).unwrap();
    assert_eq!(found, components);
    assert!((partition_entropy(&g, &found).unwrap() - best).abs() < 1e-9);
}

#[test]
fn null_case_rejects_rarely() {
    let spec: ModelSpec = SbmSpec::new(Partition::equal_blocks(2, 25).unwrap(), vec![vec![500, 0], vec![0, 500]])
        .unwrap()
        .into();
    let root = RngStream::from_seed(11);
    let trials = 100;
    let rejected = (0..trials)
        .filter(|&t| {
            let g = sample(&spec, root.child(2 * t)).unwrap();
            permutation_test(&g, &spec, 100, 0.01, 0, root.child(2 * t + 1)).unwrap().reject
        })
        .count();
    assert!(rejected as f64 <= 0.05 * trials as f64, "{rejected}/{trials} rejected");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let spec: ModelSpec = DegreeSequence::symmetric(vec![3, 1, 4, 1, 5]).unwrap().into();
    let g = sample(&spec, RngStream::from_seed(1)).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                edev_mc(&g, &spec, 200, RngStream::from_seed(2)).unwrap(),
                permutation_test(&g, &spec, 20, 0.05, 30, RngStream::from_seed(3)).unwrap(),
            )
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn monte_carlo_tracks_exact_on_small_models() {
    let spec: ModelSpec = two_by_two_sbm().into();
    let g = Multigraph::from_rows(vec![vec![1, 0, 2], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let exact = brute_edev(&g, &spec);
    let mc = edev_mc(&g, &spec, 4000, RngStream::from_seed(5)).unwrap();
    assert!((mc.mean - exact).abs() <= 4.0 * mc.std_error, "{} vs {exact}", mc.mean);
}
