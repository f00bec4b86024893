//! Instance generators, the end-to-end runner and benchmark reports.

pub mod generate;
pub mod pipeline;

pub use generate::{generate, generate_file, Family, GeneratorConfig};
pub use pipeline::{bench, run_pipeline, BenchReport, PipelineOptions, RunRecord};
