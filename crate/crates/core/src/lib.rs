//! Benchmark of textual graph reasoning tasks for language models: seeded
//! graph generation, exact oracles, prompt rendering, model clients and
//! scoring.

pub mod client;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod prompt;
pub mod seed;
pub mod task;

pub use dataset::{assemble_dataset, Dataset, TaskInstance};
pub use graph::{Graph, Node};
pub use oracle::Answer;
pub use prompt::{Strategy, Style};
pub use task::{Bucket, Query, Task};
