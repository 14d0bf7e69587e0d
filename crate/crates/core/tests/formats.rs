use proptest::prelude::*;

use qcr_core::enumerate::brute_force;
use qcr_core::generate::{random_graph, random_qubo};
use qcr_core::io::{parse, parse_maxcut, parse_triplet, write_triplet, Format};
use qcr_core::{evaluate_qubo, Assignment};

fn edge_list(nodes: usize, edges: &[(usize, usize, f64)]) -> String {
    let mut text = format!("{nodes} {}\n", edges.len());
    for &(i, j, w) in edges {
        text.push_str(&format!("{} {} {w}\n", i + 1, j + 1));
    }
    text
}

fn cut_value(edges: &[(usize, usize, f64)], side: u32) -> f64 {
    edges.iter().filter(|&&(i, j, _)| (side >> i & 1) != (side >> j & 1)).map(|e| e.2).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn triplet_round_trip(n in 1usize..=25, density in 0.0..=1.0f64, integer in any::<bool>(), seed in any::<u64>()) {
        let p = random_qubo(n, density, integer, seed);
        let text = write_triplet(&p).unwrap();
        prop_assert_eq!(parse_triplet(&text).unwrap(), p);
    }

    #[test]
    fn maxcut_objective_is_the_cut(nodes in 2usize..=10, density in 0.0..=1.0f64, seed in any::<u64>(), side in any::<u32>()) {
        let edges = random_graph(nodes, density, 20, seed);
        let p = parse_maxcut(&edge_list(nodes, &edges)).unwrap();
        let side = side & ((1 << nodes) - 1);
        let x = Assignment::new((0..nodes).map(|i| (side >> i & 1) as u8).collect()).unwrap();
        prop_assert_eq!(evaluate_qubo(&p, &x).unwrap(), cut_value(&edges, side));
    }

    #[test]
    fn maxcut_optimum_matches(nodes in 2usize..=10, density in 0.0..=1.0f64, seed in any::<u64>()) {
        let edges = random_graph(nodes, density, 20, seed);
        let best_cut = (0u32..1 << nodes).map(|s| cut_value(&edges, s)).fold(0.0, f64::max);
        let p = parse(&edge_list(nodes, &edges), Format::MaxCut).unwrap();
        prop_assert_eq!(brute_force(&p).unwrap().0, best_cut);
    }

    #[test]
    fn parsers_never_panic(text in "[0-9 #\\-\\.\\nxe]{0,80}") {
        let _ = parse_triplet(&text);
        let _ = parse_maxcut(&text);
    }

    #[test]
    fn out_of_range_index_is_reported_on_its_line(n in 1usize..=9, blank in 0usize..4) {
        let text = format!("{n} 1\n{}1 {} 1\n", "\n".repeat(blank), n + 1);
        let err = parse_triplet(&text).unwrap_err();
        prop_assert!(matches!(err, qcr_core::Error::Parse { line, .. } if line == blank + 2), "{:?}", err);
    }
}
