//! Claim verification, adversarial inputs, the weak-type functional and
//! experiment configuration.

pub mod claims;
pub mod config;
pub mod experiment;
pub mod fields;
pub mod inputs;
pub mod report;
pub mod weak;

pub use claims::{registered_ids, registry, verify_claim, ClaimInfo};
pub use config::{ClaimParams, ExperimentConfig, GridConfig};
pub use experiment::{run_config, run_experiment, ExperimentSummary};
pub use fields::AField;
pub use inputs::{generate_input, GeneratedInput, InputFamily};
pub use report::{ClaimReport, GroupReport, Policy, Row};
pub use weak::{lambda_grid, weak_type_profile, weak_type_ratio, WeakTypeProfile};
