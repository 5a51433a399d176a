//! Build a coverage function and a few matroids, and watch the query counters.

use dynsub::{make_matroid, set_of, ElementId, MatroidKind, ProblemSpec};

fn main() -> dynsub::Result<()> {
    let problem = ProblemSpec::from_json(
        r#"{"type":"coverage","universe":5,"covers":{"1":[0,1],"2":[1,2],"3":[2,3,4]},"weights":[1,1,2,1,1]}"#,
    )?;
    let f = problem.function.build_function()?;
    for s in [
        set_of(&[]),
        set_of(&[1]),
        set_of(&[1, 2]),
        set_of(&[1, 2, 3]),
    ] {
        println!("f({s}) = {}", f.evaluate(&s)?);
    }
    println!(
        "gain of 3 over {{1}}: {}",
        f.marginal_gain(&set_of(&[1]), ElementId(3), None)?
    );
    println!("value queries so far: {}", f.queries());

    let handle = f.handle();
    handle.singleton(ElementId(2))?;
    println!(
        "a handle shares the function but counts alone: {} vs {}",
        handle.queries(),
        f.queries()
    );

    let kinds = [
        MatroidKind::Uniform(2),
        MatroidKind::Partition {
            blocks: vec![vec![ElementId(1), ElementId(2)], vec![ElementId(3)]],
            capacities: vec![1, 1],
        },
        // a triangle: any two edges form a forest
        MatroidKind::Graphic {
            edges: vec![
                (0, 1, ElementId(1)),
                (1, 2, ElementId(2)),
                (2, 0, ElementId(3)),
            ],
            vertices: None,
        },
    ];
    for kind in &kinds {
        let m = make_matroid(kind)?;
        println!(
            "rank {}: {{1,2}} independent {}, {{1,2,3}} independent {}",
            m.rank(),
            m.is_independent(&set_of(&[1, 2])),
            m.is_independent(&set_of(&[1, 2, 3]))
        );
    }
    Ok(())
}
