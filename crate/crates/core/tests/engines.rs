use pcpm_core::analytics::TrafficReport;
use pcpm_core::baselines::{bvgas_pagerank, pdpr_pagerank, BvgasEngine};
use pcpm_core::bins::GatherKind;
use pcpm_core::pcpm::RankEngine;
use pcpm_core::{pcpm_pagerank, CsrGraph, EdgeList, PcpmEngine};
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = (CsrGraph, usize)> {
    (1usize..300).prop_flat_map(|n| {
        (proptest::collection::vec((0..n as u32, 0..n as u32), 0..6 * n), 1..=n)
            .prop_map(move |(edges, q)| (CsrGraph::from_edge_list(&EdgeList::new(n, edges).unwrap()).unwrap(), q))
    })
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engines_agree((g, q) in graph_strategy()) {
        let a: Vec<f64> = pdpr_pagerank(&g.transpose(), &g.out_degrees(), 10, 0.85).unwrap();
        let b: Vec<f64> = bvgas_pagerank(&g, q, 10, 0.85).unwrap();
        let c: Vec<f64> = pcpm_pagerank(&g, q, 10, 0.85).unwrap();
        for v in 0..g.n() {
            prop_assert!((a[v] - b[v]).abs() <= 1e-12);
            prop_assert!((a[v] - c[v]).abs() <= 1e-12);
        }
    }

    #[test]
    fn gather_loops_give_identical_ranks((g, q) in graph_strategy()) {
        let mut x = PcpmEngine::<f64>::new(&g, q, 0.85).unwrap().with_gather(GatherKind::Branching);
        let mut y = PcpmEngine::<f64>::new(&g, q, 0.85).unwrap().with_gather(GatherKind::BranchAvoiding);
        x.run(5, &mut TrafficReport::new()).unwrap();
        y.run(5, &mut TrafficReport::new()).unwrap();
        prop_assert_eq!(bits(&x.ranks()), bits(&y.ranks()));
    }

    #[test]
    fn bvgas_independent_of_worker_split((g, q) in graph_strategy(), workers in 1usize..9) {
        let mut x = BvgasEngine::<f64>::with_workers(&g, q, 0.85, 1).unwrap();
        let mut y = BvgasEngine::<f64>::with_workers(&g, q, 0.85, workers).unwrap();
        x.run(5, &mut TrafficReport::new()).unwrap();
        y.run(5, &mut TrafficReport::new()).unwrap();
        prop_assert_eq!(bits(&x.ranks()), bits(&y.ranks()));
    }

    #[test]
    fn scatter_counts((g, q) in graph_strategy()) {
        let mut e = PcpmEngine::<f32>::new(&g, q, 0.85).unwrap();
        let k = e.layout().k() as u64;
        let s = e.scatter();
        let (gather, _) = e.gather_apply().unwrap();
        prop_assert_eq!(s.updates, e.e_prime() as u64);
        prop_assert!(s.bin_switches <= k * k);
        prop_assert_eq!(gather.ids, g.m() as u64);
        prop_assert_eq!(gather.updates, e.e_prime() as u64);
        prop_assert_eq!(gather.bytes_written, g.n() as u64 * 4);
    }
}
