//! Benchmark ingestion and result/figure emission.

pub mod fixed;
pub mod lattice;
pub mod report;
pub mod svg;
pub mod yal;

pub use fixed::{apply_fixed, FixedConfig, FixedEntry};
pub use lattice::gen_lattice;
pub use report::{read_results, write_results, Method, RunRecord};
pub use svg::render_svg;
pub use yal::parse_yal;
