//! Configuration, profile files, the staged pipeline and plot data.

pub mod config;
pub mod pipeline;
pub mod plot;
pub mod record;

pub use config::{normalize, parse_config, RunConfig};
pub use pipeline::{run_pipeline, run_pipeline_with_state, PipelineOutcome, Stage};
pub use plot::emit_plot_data;
pub use record::{load_profile, save_profile, LoadWarning, LoadedProfile, ProfileMetadata, ProfileRecord};
