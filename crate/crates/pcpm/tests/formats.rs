mod common;

use std::fs;

use pcpm::binfmt::{encode_csr, read_binary_csr, write_binary_csr};
use pcpm::edgelist::{read_edge_list, write_edge_list};
use pcpm::runner::{cmd_convert, load_graph};
use pcpm_core::CsrGraph;
use proptest::prelude::*;

#[test]
fn toy_edge_list_parses_to_fixture() {
    let el = read_edge_list(common::TOY_EDGE_LIST.as_bytes()).unwrap();
    assert_eq!((el.n, el.edges.len()), (6, 9));
    let g = CsrGraph::from_edge_list(&el).unwrap();
    assert_eq!(g, common::toy());
    assert_eq!(g.offsets(), &[0, 3, 5, 6, 8, 8, 9]);
}

#[test]
fn convert_toy_matches_direct_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("toy.txt");
    let bin = dir.path().join("toy.pcsr");
    fs::write(&text, common::TOY_EDGE_LIST).unwrap();
    cmd_convert(&text, &bin).unwrap();
    assert_eq!(fs::read(&bin).unwrap(), encode_csr(&common::toy()));
    assert_eq!(load_graph(&bin).unwrap(), load_graph(&text).unwrap());
}

#[test]
fn edge_list_round_trip_keeps_isolated_vertices() {
    let g = common::graph(10, &[(0, 1), (3, 2)]);
    let mut buf = Vec::new();
    write_edge_list(&g, &mut buf).unwrap();
    let back = CsrGraph::from_edge_list(&read_edge_list(buf.as_slice()).unwrap()).unwrap();
    assert_eq!(back, g);
}

#[test]
fn matrix_market_loads_as_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mtx");
    fs::write(
        &path,
        "%%MatrixMarket matrix coordinate pattern general\n3 3 3\n1 2\n2 3\n3 1\n",
    )
    .unwrap();
    let g = load_graph(&path).unwrap();
    assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 0)]);
}

#[test]
fn missing_file_is_an_error() {
    assert!(load_graph(std::path::Path::new("/nonexistent/graph.pcsr")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binary_round_trip_is_bit_exact(
        n in 1usize..200,
        raw in proptest::collection::vec((0u32..200, 0u32..200, -1e3f32..1e3), 0..400),
        weighted in any::<bool>(),
    ) {
        let edges: Vec<_> = raw.iter().map(|&(s, d, _)| (s % n as u32, d % n as u32)).collect();
        let el = if weighted {
            pcpm_core::EdgeList::with_weights(n, edges, raw.iter().map(|r| r.2).collect()).unwrap()
        } else {
            pcpm_core::EdgeList::new(n, edges).unwrap()
        };
        let g = CsrGraph::from_edge_list(&el).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pcsr");
        write_binary_csr(&g, &path).unwrap();
        let back = read_binary_csr(&path).unwrap();
        prop_assert_eq!(encode_csr(&back), fs::read(&path).unwrap());
        prop_assert_eq!(back, g);
    }
}
