//! Preset attractors, experiment configuration, convergence studies and
//! report encodings.

pub mod config;
pub mod presets;
pub mod report;
pub mod study;

pub use config::{ExperimentConfig, IfsSpec, KernelSpec, MapSpec, ReportFormat, SmoothFunction};
pub use presets::{preset, PresetInfo, PRESETS};
pub use report::{emit, read_csv, write_csv, write_plot_data, ErrorMetric, CSV_HEADER};
pub use study::{
    builtin_studies, default_reference_level, eoc, evaluate, least_squares_slope, run_convergence, ConvergenceReport,
    ReportMeta, ReportRow, STUDIES,
};
