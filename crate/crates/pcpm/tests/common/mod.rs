#![allow(dead_code)]

use pcpm_core::rmat::{generate_rmat, RmatProbs};
use pcpm_core::{CsrGraph, EdgeList};

pub fn graph(n: usize, edges: &[(u32, u32)]) -> CsrGraph {
    CsrGraph::from_edge_list(&EdgeList::new(n, edges.to_vec()).unwrap()).unwrap()
}

pub fn toy() -> CsrGraph {
    graph(
        6,
        &[(0, 2), (0, 3), (0, 4), (1, 0), (1, 5), (2, 1), (3, 4), (3, 5), (5, 0)],
    )
}

pub fn chain3() -> CsrGraph {
    graph(3, &[(0, 1), (1, 2)])
}

pub fn two_cycle() -> CsrGraph {
    graph(2, &[(0, 1), (1, 0)])
}

/// Hub 0 linked both ways with five leaves.
pub fn star() -> CsrGraph {
    let edges: Vec<_> = (1..6u32).flat_map(|v| [(0, v), (v, 0)]).collect();
    graph(6, &edges)
}

pub fn rmat(scale: u32) -> CsrGraph {
    CsrGraph::from_edge_list(&generate_rmat(scale, 16, 1, RmatProbs::GRAPH500).unwrap()).unwrap()
}

pub const TOY_EDGE_LIST: &str = "# toy\n0 2\n0 3\n0 4\n1 0\n1 5\n2 1\n3 4\n3 5\n5 0\n";
