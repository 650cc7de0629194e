//! Experiment harness: graph I/O, noise injection, seeded Monte-Carlo
//! runners, and deterministic CSV output.

pub mod config;
pub mod csv;
pub mod experiment;
pub mod io;
pub mod noise;

pub use config::{Centering, ExperimentConfig, ExperimentKind, RateRule};
pub use experiment::{
    core_junk_spec, homogeneous_spec, run_experiment, summarize, summary_path,
    two_block_swap_spec, write_rows_csv, write_summary_csv, ExperimentRow, SummaryRow,
};
pub use io::{load_graph, parse_edge_list, write_dense_csv, write_edge_list};
pub use noise::inject_block_noise;
