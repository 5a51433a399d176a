//! Find the cheapest element to drop when a new edge closes a cycle.

use dynsub::{find_min_circuit_swap, make_matroid, set_of, ElementId, MatroidKind};

fn main() -> dynsub::Result<()> {
    // path 0-1-2-3 on edges 1, 2, 3; edge 4 joins 0 and 3
    let m = make_matroid(&MatroidKind::Graphic {
        edges: vec![
            (0, 1, ElementId(1)),
            (1, 2, ElementId(2)),
            (2, 3, ElementId(3)),
            (0, 3, ElementId(4)),
            (3, 4, ElementId(5)),
        ],
        vertices: None,
    })?;
    let forest = set_of(&[1, 2, 3, 5]);
    let weight = |e: ElementId| match e.0 {
        1 => 4.0,
        2 => 1.5,
        3 => 2.5,
        _ => 0.5,
    };
    let before = m.queries();
    let swap = find_min_circuit_swap(&m, &forest, ElementId(4), weight)?;
    println!(
        "adding 4 to {forest} swaps out {swap:?} using {} independence queries",
        m.queries() - before
    );
    // edge 5 hangs off the cycle, so it is never a candidate
    assert_eq!(swap, Some(ElementId(2)));
    Ok(())
}
