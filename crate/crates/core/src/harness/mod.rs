//! Streams, generated workloads and the run loop behind the `dynsub` binary.

mod generate;
mod run;
mod stream;

pub use generate::{
    generate_problem, random_coverage, random_graphic, random_partition, CoverageParams,
};
pub use run::{run, run_with, BaselineKind, RunConfig, RunReport, RunSummary, StepRecord};
pub use stream::{
    format_stream, generate_stream, parse_stream, parse_stream_str, validate_stream, Distribution,
    StreamEvent,
};
