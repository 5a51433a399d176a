//! Run a scripted stream through the harness and print the JSONL report.

use dynsub::harness::{self, BaselineKind, RunConfig};
use dynsub::{Constraint, ProblemSpec, SolverConfig};

const STREAM: &str = "\
+ 1
+ 2
+ 3
+ 4
- 2
+ 5
- 1
+ 6
";

fn main() -> dynsub::Result<()> {
    let problem = ProblemSpec::from_json(
        r#"{"function":{"type":"coverage","universe":6,"covers":{"1":[0,1],"2":[1,2,3],"3":[3],"4":[4],"5":[0,5],"6":[2,4]}},
            "matroid":{"type":"uniform","k":2}}"#,
    )?;
    let events = harness::parse_stream_str(STREAM)?;
    let mut cfg = RunConfig::new(SolverConfig::new(Constraint::Matroid, None, 0.5, 1));
    cfg.check_invariants = true;
    cfg.baseline = Some(BaselineKind::Exact);
    let report = harness::run(&cfg, &problem, &events)?;
    print!("{}", report.to_jsonl());
    println!("clean: {}", report.summary.clean());
    Ok(())
}
