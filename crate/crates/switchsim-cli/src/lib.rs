//! Command-line front end for the switched-dissipation simulator:
//! configuration schema, experiment assembly, ensemble execution, and
//! bundled example configurations.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod fixtures;
pub mod scenario;

pub use config::{canonical_toml, load_config, parse_config, ConfigFile};
pub use ensemble::{
    render_csv, render_meta, run_ensemble, write_summary, EnsembleSummary, LawSeries,
};
pub use error::{CliError, Result};
pub use fixtures::emit_fixtures;
pub use scenario::{build_experiment, Experiment};
