use proptest::prelude::*;
use sublin::io::{read_graph, write_graph};
use sublin_core::generate::{generate, GraphKind};
use sublin_core::Seed;

proptest! {
    #[test]
    fn write_then_read_is_identity(n in 1usize..60, p in 0.0f64..1.0, s in any::<u64>()) {
        let g = generate(&GraphKind::ErdosRenyi { n, p }, Seed::new(s)).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let back = read_graph(buf.as_slice()).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        prop_assert_eq!(String::from_utf8(buf).unwrap().lines().count(), g.m() + 1);
    }
}
