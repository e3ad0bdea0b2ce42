//! Library surface of the `pspectral` binary: pipeline orchestration and
//! the report schema, exposed so integration tests can drive the pipeline
//! and round-trip reports.

pub mod pipeline;
pub mod report;
