//! Experiment orchestration: rosters, sweeps, adversary probes, and CSV/JSON output.

mod adversary;
mod records;
mod roster;
mod stats;
mod sweep;

pub use adversary::{cmd_adversary, default_probe, AdversaryReport, AdversaryRow};
pub use records::{
    aggregate, cdf_rows, read_records, sort_records, write_aggregates, write_cdf, write_records,
    AggregateRow, CdfRow, ExperimentRecord, InstanceFile,
};
pub use roster::{parse_roster, AlgorithmSpec};
pub use stats::{cdf_points, mean, percentile};
pub use sweep::{cmd_gen, cmd_run, cmd_sweep, evaluate_instance, Cell, InstanceMeta, SweepConfig, PRESETS};
