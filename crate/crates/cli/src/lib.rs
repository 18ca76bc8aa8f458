//! Command-line harness around `mixbound`: experiment configuration, KL and
//! entropy experiment runners, CSV tables and SVG plots.

pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod report;
pub mod selftest;

pub use config::{parse_config, parse_mixture, BoundName, ExperimentConfig, NamedMixture, NamedPair};
pub use error::{CliError, Result};
pub use experiment::{
    check_invariants, pair_bounds, run_entropy_experiment, run_kl_experiment, Direction, ResultRow,
};
pub use plot::{emit_plot, emit_plots, render_svg};
pub use report::{emit_csv, format_sig, read_csv};
