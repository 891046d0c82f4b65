use std::io::Write;

use ising_wrc::generators::{self, random_instance, InstanceShape};
use ising_wrc::{Error, RngStream, WeightedGraph};
use proptest::prelude::*;

#[test]
fn parses_comments_and_blank_lines() {
    let text = "# triangle\n3 3\n\nv 0 0.5\nv 1 1\nv 2 0.25\n# edges\ne 0 1 2\ne 1 2 1.5\ne 0 2 3\n";
    let g = WeightedGraph::parse(text).unwrap();
    assert_eq!((g.n(), g.m()), (3, 3));
    assert_eq!(g.lambda(), &[0.5, 1.0, 0.25]);
    assert_eq!(g.beta(), &[2.0, 1.5, 3.0]);
    assert_eq!(g.degree(1), 2);
}

#[test]
fn errors_carry_line_numbers() {
    let cases = [
        ("2 1\nv 0 0.5\nv 1 0.5\ne 0 0 2\n", 4),
        ("2 1\nv 0 0.5\nv 1 1.5\ne 0 1 2\n", 3),
        ("2 1\nv 0 0.5\nv 1 0.5\ne 0 1 1\n", 4),
        ("2 1\nv 0 0.5\ne 0 1 2\n", 3),
        ("2 1\nv 0 0.5\nv 1 0.5\nx 0 1 2\n", 4),
        ("2\n", 1),
    ];
    for (text, line) in cases {
        match WeightedGraph::parse(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    assert!(matches!(WeightedGraph::parse("2 2\nv 0 0.5\nv 1 0.5\ne 0 1 2\n"), Err(Error::Parse { .. })));
    assert!(matches!(WeightedGraph::parse("2 2\nv 0 0.5\nv 1 0.5\ne 0 1 2\ne 1 0 2\n"), Err(Error::Parse { line: 5, .. })));
}

#[test]
fn reads_from_disk() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    let g = generators::grid(3, 2, 1.25, 0.3).unwrap();
    f.write_all(g.to_text().as_bytes()).unwrap();
    assert_eq!(WeightedGraph::from_path(f.path()).unwrap(), g);
    assert!(matches!(WeightedGraph::from_path("/nonexistent/graph.txt"), Err(Error::Io(_))));
}

#[test]
fn generator_shapes() {
    assert_eq!(generators::path(5, 2.0, 1.0).unwrap().m(), 4);
    assert_eq!(generators::cycle(5, 2.0, 1.0).unwrap().m(), 5);
    assert_eq!(generators::complete(5, 2.0, 1.0).unwrap().m(), 10);
    let grid = generators::grid(10, 10, 2.0, 1.0).unwrap();
    assert_eq!((grid.n(), grid.m()), (100, 180));
    let mut rng = RngStream::new(1);
    let er = generators::erdos_renyi(30, 0.2, 2.0, 0.5, &mut rng).unwrap();
    let again = generators::erdos_renyi(30, 0.2, 2.0, 0.5, &mut RngStream::new(1)).unwrap();
    assert_eq!(er, again);
}

proptest! {
    #[test]
    fn text_roundtrip(seed in any::<u64>()) {
        let g = random_instance(&InstanceShape { max_vertices: 8, max_edges: 20, ..InstanceShape::default() }, &mut RngStream::new(seed));
        prop_assert_eq!(WeightedGraph::parse(&g.to_text()).unwrap(), g);
    }
}
