//! Randomized invariants across the crate.

mod common;

use common::{mask_connected, mask_edges};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use shotgun::admissibility::{reduced_bfs, xi_lambda_stats};
use shotgun::graph::{bridges, bridging_trees_and_blocks, complexity, component, generate_er, Explorer, Graph};
use shotgun::pgw::{sample, GwParams};
use shotgun::reconstruct::{build_profile, reconstruct, verify_reconstruction};
use shotgun::rng;
use shotgun::rooted::{canon_rooted_graph_with, sim_r, spine_event, CanonConfig, RootedTree};
use std::collections::BTreeSet;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let m = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), m).prop_map(move |bits| {
            let mask = bits.iter().enumerate().fold(0u64, |a, (i, &b)| a | (u64::from(b) << i));
            Graph::from_edges(n, mask_edges(n, mask)).unwrap()
        })
    })
}

/// Sparse graph from a seed, for sizes where bit masks are too dense.
fn sparse(n: usize, lambda: f64, seed: u64) -> Graph {
    generate_er(n, lambda, seed).unwrap().graph
}

fn components_of(g: &Graph) -> usize {
    g.components().len()
}

fn brute_bridges(g: &Graph) -> BTreeSet<(usize, usize)> {
    let base = components_of(g);
    g.edges()
        .filter(|&(a, b)| {
            let h = Graph::from_edges(g.n(), g.edges().filter(|&e| e != (a, b))).unwrap();
            components_of(&h) > base
        })
        .collect()
}

fn poisson_tree(lambda: f64, depth: usize, seed: u64, index: u64) -> RootedTree {
    let params = GwParams::poisson(lambda).with_max_depth(depth).with_max_size(4000);
    sample(&params, &mut rng::stream(seed, index)).tree
}

#[test]
fn bridges_exhaustive_up_to_seven_vertices() {
    for n in 1..=7 {
        let m = n * (n - 1) / 2;
        for mask in 0u64..1 << m {
            let g = Graph::from_edges(n, mask_edges(n, mask)).unwrap();
            let fast: BTreeSet<_> = bridges(&g).iter().collect();
            assert_eq!(fast, brute_bridges(&g), "n={n} mask={mask:#x}");
        }
    }
}

#[test]
fn connected_masks_have_one_component() {
    for mask in 0u64..1 << 10 {
        let g = Graph::from_edges(5, mask_edges(5, mask)).unwrap();
        assert_eq!(mask_connected(5, mask), components_of(&g) == 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bridges_match_brute_force(g in arb_graph(10)) {
        let fast: BTreeSet<_> = bridges(&g).iter().collect();
        prop_assert_eq!(fast, brute_bridges(&g));
    }

    #[test]
    fn decomposition_shape(seed in any::<u64>(), n in 5usize..60, lambda in 0.5f64..3.0) {
        let g = sparse(n, lambda, seed);
        let d = bridging_trees_and_blocks(&g);
        let mut seen = BTreeSet::new();
        for t in &d.bridging_trees {
            prop_assert_eq!(complexity(&t.to_rooted()).unwrap(), 0);
            for &x in &t.vertices {
                prop_assert!(seen.insert(x), "bridging trees share {}", x);
            }
        }
        for b in &d.blocks {
            prop_assert!(complexity(&b.to_rooted()).unwrap() >= 1);
        }
        let edges: usize = d.bridging_trees.iter().chain(&d.blocks).map(|p| p.edges.len()).sum();
        prop_assert_eq!(edges, g.edge_count());
    }

    #[test]
    fn neighborhoods_grow_then_stabilize(seed in any::<u64>(), n in 2usize..80, lambda in 0.3f64..2.5) {
        let g = sparse(n, lambda, seed);
        let mut ex = Explorer::new(n);
        let v = (seed % n as u64) as usize;
        let mut prev: Option<BTreeSet<usize>> = None;
        let mut stable = false;
        for r in 0..=n {
            let cur: BTreeSet<usize> = ex.neighborhood(&g, v, r).1.into_iter().collect();
            if let Some(p) = &prev {
                prop_assert!(p.is_subset(&cur));
                if stable {
                    prop_assert_eq!(p, &cur);
                }
                stable |= *p == cur;
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn er_is_bit_reproducible(seed in any::<u64>(), n in 1usize..300, lambda in 0.1f64..4.0) {
        let a = generate_er(n, lambda, seed).unwrap().graph;
        let b = generate_er(n, lambda, seed).unwrap().graph;
        prop_assert_eq!(a.edge_set(), b.edge_set());
    }

    #[test]
    fn canon_ignores_labels(seed in any::<u64>(), n in 1usize..14, lambda in 0.5f64..4.0) {
        let g = sparse(n, lambda, seed);
        let h = component(&g, 0);
        let mut perm: Vec<usize> = (0..h.len()).collect();
        perm[1..].shuffle(&mut rng::stream(seed, 1));
        let cfg = CanonConfig::unbounded();
        prop_assert_eq!(canon_rooted_graph_with(&h, &cfg).unwrap(), canon_rooted_graph_with(&h.relabel(&perm), &cfg).unwrap());
    }

    #[test]
    fn sim_r_is_an_equivalence(seed in any::<u64>(), r in 0usize..5) {
        // The relation lives on trees of height at least r.
        let t: Vec<RootedTree> = (0..3).map(|i| poisson_tree(0.8, 6, seed, i)).filter(|t| t.height() >= r).collect();
        prop_assume!(t.len() == 3);
        prop_assert!(sim_r(&t[0], &t[0], r));
        prop_assert_eq!(sim_r(&t[0], &t[1], r), sim_r(&t[1], &t[0], r));
        if sim_r(&t[0], &t[1], r) && sim_r(&t[1], &t[2], r) {
            prop_assert!(sim_r(&t[0], &t[2], r));
        }
    }

    #[test]
    fn sim_is_monotone_in_depth(seed in any::<u64>(), r in 0usize..6) {
        let a = poisson_tree(1.0, 10, seed, 0);
        let b = poisson_tree(1.0, 10, seed, 1);
        if sim_r(&a, &b, r + 1) {
            prop_assert!(sim_r(&a, &b, r));
        }
    }

    #[test]
    fn spine_event_implies_sim(seed in any::<u64>(), r in 1usize..5, l in 1usize..4) {
        let a = poisson_tree(1.0, 12, seed, 0);
        let b = poisson_tree(1.0, 12, seed, 1);
        if spine_event(&a, &b, r, l) {
            prop_assert!(sim_r(&a, &b, r));
            prop_assert!(a.height().max(b.height()) <= r + l);
        }
    }

    #[test]
    fn gw_sampling_is_deterministic(seed in any::<u64>(), index in any::<u64>(), lambda in 0.2f64..2.0) {
        prop_assert_eq!(poisson_tree(lambda, 20, seed, index), poisson_tree(lambda, 20, seed, index));
    }

    #[test]
    fn reduced_bfs_partitions(seed in any::<u64>(), n in 2usize..120, lambda in 0.5f64..3.0, r in 1usize..7) {
        let g = sparse(n, lambda, seed);
        let u = (seed % n as u64) as usize;
        let v = (u + 1 + (seed >> 32) as usize % (n - 1)) % n;
        let tr = reduced_bfs(&g, u, v, r).unwrap();
        let au: BTreeSet<_> = tr.active_le(true).into_iter().collect();
        let av: BTreeSet<_> = tr.active_le(false).into_iter().collect();
        let rm: BTreeSet<_> = tr.removed_le().into_iter().collect();
        prop_assert_eq!(au.len() + av.len() + rm.len(), tr.active_le(true).len() + tr.active_le(false).len() + tr.removed_le().len());
        prop_assert!(au.is_disjoint(&av) && au.is_disjoint(&rm) && av.is_disjoint(&rm));
        let stats = xi_lambda_stats(&g, &tr, r);
        prop_assert!(rm.len() <= stats.xi2);
        let swapped = reduced_bfs(&g, v, u, r).unwrap();
        prop_assert_eq!(&swapped.active_u, &tr.active_v);
        prop_assert_eq!(&swapped.removed, &tr.removed);
    }

    #[test]
    fn reconstruction_is_deterministic_and_audit_blind(seed in any::<u64>(), n in 20usize..150, lambda in 0.5f64..1.5) {
        let g = sparse(n, lambda, seed);
        let cfg = Default::default();
        let p = build_profile(&g, 6, 0.5).unwrap();
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng::stream(seed, 3));
        let shuffled = p.clone().with_audit_ids(ids).unwrap();
        match reconstruct(&p, &cfg) {
            Ok(a) => {
                let b = reconstruct(&p, &cfg).unwrap();
                prop_assert_eq!(&a, &b);
                prop_assert_eq!(&a.graph_prime, &reconstruct(&shuffled, &cfg).unwrap().graph_prime);
                if verify_reconstruction(&g, &a, &cfg).unwrap() {
                    prop_assert_eq!(a.graph_prime.n(), n);
                }
            }
            Err(e) => prop_assert_eq!(Err(e), reconstruct(&shuffled, &cfg).map(|_| ())),
        }
    }
}
