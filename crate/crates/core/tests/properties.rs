mod common;

use itertools::Itertools;
use proptest::prelude::*;

use rainbow_core::arith::ratio;
use rainbow_core::hypergraph::{onek_to_system, system_to_onek, GraphSystem, KGraph, OneKGraph, Point};
use rainbow_core::instances::{check_x_trap, random_system, xy_obstruction};
use rainbow_core::io::{parse_instance, Instance};
use rainbow_core::solver::{
    check_absorbing_path, find_rainbow_hamilton, gadget_absorption_instance, verify_hamilton, AbsorbStatus,
    AbsorptionQuery, Pruning, SearchConfig, SearchStatus,
};

use common::*;

fn kgraph(n: usize, k: usize) -> impl Strategy<Value = KGraph> {
    let all: Vec<Vec<Point>> = (0..n).combinations(k).collect();
    proptest::collection::vec(any::<bool>(), all.len())
        .prop_map(move |mask| KGraph::new(n, k, all.iter().zip(&mask).filter(|(_, &b)| b).map(|(e, _)| e.clone())).unwrap())
}

fn onek(colors: usize, n: usize, k: usize) -> impl Strategy<Value = OneKGraph> {
    proptest::collection::vec(kgraph(n, k), colors).prop_map(move |gs| {
        let edges = gs.iter().enumerate().flat_map(|(c, g)| g.edges().iter().map(move |e| (c, e.clone())));
        OneKGraph::new(colors, n, k, edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_matches_naive_count(g in kgraph(7, 3), s in proptest::sample::subsequence((0..7).collect::<Vec<_>>(), 1..=2)) {
        let naive = g.edges().iter().filter(|e| s.iter().all(|v| e.contains(v))).count() as u64;
        prop_assert_eq!(g.degree(&s).unwrap().degree, naive);
        prop_assert_eq!(g.link(&s).unwrap().edge_count() as u64, naive);
    }

    #[test]
    fn shadows_compose(h in onek(3, 6, 3)) {
        for j in 1..3 {
            for j2 in 1..=j {
                prop_assert_eq!(h.shadow(j).unwrap().shadow(j2).unwrap(), h.shadow(j2).unwrap());
            }
        }
    }

    #[test]
    fn onek_round_trip(h in onek(6, 6, 3)) {
        let sys = onek_to_system(&h).unwrap();
        prop_assert_eq!(system_to_onek(&sys), h);
    }

    #[test]
    fn instance_json_round_trips(seed in 0u64..1000, n in 4usize..8) {
        let sys = random_system(n, 3, &ratio(2, 5), seed).unwrap();
        let inst = Instance::from_system(&sys, None);
        let back = parse_instance(&inst.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), inst.to_json());
        prop_assert_eq!(back.to_system().unwrap(), sys);
    }

    #[test]
    fn random_systems_meet_target(seed in 0u64..1000, n in 4usize..9, level in 0u32..=9) {
        let target = ratio(level as u128, 9);
        let sys = random_system(n, 3, &target, seed).unwrap();
        for g in sys.graphs() {
            if level > 0 {
                prop_assert!(g.min_degree(1).unwrap().relative >= target);
            }
        }
        prop_assert_eq!(random_system(n, 3, &target, seed).unwrap(), sys);
    }

    #[test]
    fn xy_predicate_and_trap(n in 4usize..=12, x in 1usize..4) {
        prop_assume!(3 * x < n);
        let sys = xy_obstruction(n, x).unwrap();
        let xs: Vec<Point> = (0..x).collect();
        for g in sys.graphs() {
            prop_assert!(g.edges().iter().all(|e| e.iter().filter(|v| xs.contains(v)).count() != 2));
        }
        prop_assert!(check_x_trap(&sys, &xs).unwrap().holds);
    }
}

fn small_systems() -> Vec<GraphSystem> {
    (0..30u64)
        .map(|seed| random_system(5 + (seed % 3) as usize, 3, &ratio(1 + seed as u128 % 4, 10), seed + 500).unwrap())
        .collect()
}

#[test]
fn solver_is_sound_and_pruning_keeps_verdicts() {
    for sys in small_systems() {
        let base = find_rainbow_hamilton(&sys, &SearchConfig::default()).unwrap();
        if let Some(c) = &base.cycle {
            assert!(verify_hamilton(&sys, c) && replay_hamilton(&sys, c));
        }
        for pruning in [Pruning::None, Pruning::Hall] {
            for hall_every in [1, 3] {
                let cfg = SearchConfig { pruning, hall_every, ..SearchConfig::default() };
                let other = find_rainbow_hamilton(&sys, &cfg).unwrap();
                assert_eq!(other.status, base.status);
            }
        }
    }
}

#[test]
fn parallel_search_is_deterministic() {
    for sys in small_systems().into_iter().take(10) {
        let one = find_rainbow_hamilton(&sys, &SearchConfig::default()).unwrap();
        let many = find_rainbow_hamilton(&sys, &SearchConfig { jobs: 4, ..SearchConfig::default() }).unwrap();
        assert_eq!(one.status, many.status);
        assert_eq!(one.cycle, many.cycle);
    }
}

#[test]
fn limits_give_exhausted_not_absent() {
    let sys = random_system(7, 3, &ratio(1, 10), 3).unwrap();
    let out = find_rainbow_hamilton(&sys, &SearchConfig { node_limit: Some(2), ..SearchConfig::default() }).unwrap();
    assert_ne!(out.status, SearchStatus::Absent);
}

#[test]
fn absorbed_paths_replay_with_the_right_size() {
    for k in 2..=3 {
        let inst = gadget_absorption_instance(k).unwrap();
        let q = AbsorptionQuery { path: inst.path.clone(), points: inst.t.clone(), colors: inst.o.clone() };
        let out = check_absorbing_path(&inst.graph, &q, 5_000_000).unwrap();
        assert_eq!(out.status, AbsorbStatus::Found);
        let w = out.path.unwrap();
        assert!(replay_walk(&inst.graph, &w));
        assert_eq!(w.points.len(), inst.path.points.len() + k);
        assert_eq!(&w.points[..k - 1], &inst.path.points[..k - 1]);
        assert_eq!(w.points[w.points.len() - (k - 1)..], inst.path.points[inst.path.points.len() - (k - 1)..]);
        let mut used = w.colors.clone();
        used.sort_unstable();
        let mut want: Vec<usize> = inst.path.colors.iter().chain(&inst.o).copied().collect();
        want.sort_unstable();
        assert_eq!(used, want);
    }
}
