//! Monte Carlo experiments over generated scenarios, the stability audit and
//! the oracle comparison, plus their CSV and manifest output.

mod audit;
mod config;
mod output;
mod stats;
mod sweep;
mod trial;

pub use audit::{
    micro_instance, micro_instance_from_seed, oracle_compare, stability_audit, write_records, AuditConfig, AuditRecord,
    OracleConfig, OracleRecord,
};
pub use config::{Scheme, Sweep, SweepConfig, SweepPoint};
pub use output::{create_output, load_config, Manifest, MANIFEST_FILE, TOOL, VERSION};
pub use stats::{pearson, Estimate};
pub use sweep::{run_sweep, sweep_budget_price, sweep_k, sweep_n1, PointResult, SchemeSummary, SweepResult};
pub use trial::{run_generated_trial, run_schemes, run_trial, trial_rng, SchemeMetrics, TrialConfig, TrialResult};
