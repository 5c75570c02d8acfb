//! Configuration layer, single simulations, parameter sweeps, CSV output.
//!
//! Everything here is deterministic: identical configurations produce
//! byte-identical physics columns, independent of worker count. Wall-clock
//! times are reported for convenience and are the one non-reproducible
//! column.

mod config;
mod csvout;
mod run;
mod sweep;

pub use config::{DesignInputs, GridSpec, RunConfig, SweepGrids, REFERENCE_CONFIG};
pub use csvout::write_csv;
pub use run::{run_single, validate_effective, EffectiveValidation};
pub use sweep::{sweep_decoherence, sweep_detuning, SweepFailure, SweepOutcome};

/// One completed simulation point.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    /// Swept parameter names and values, in column order.
    pub swept: Vec<(String, f64)>,
    pub fidelity: f64,
    /// Final population outside the logical subspace.
    pub leakage: f64,
    /// Largest trace deviation along the trajectory.
    pub trace_error: f64,
    /// Wall-clock time of the point, milliseconds.
    pub wall_ms: f64,
}

impl SweepRecord {
    /// CSV header for records with these swept names.
    pub fn header(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.swept.iter().map(|(name, _)| name.clone()).collect();
        cols.extend(
            ["fidelity", "leakage", "trace_error", "wall_ms"]
                .iter()
                .map(|s| s.to_string()),
        );
        cols
    }

    /// CSV row values matching [`SweepRecord::header`].
    pub fn row(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.swept.iter().map(|(_, v)| *v).collect();
        vals.extend([self.fidelity, self.leakage, self.trace_error, self.wall_ms]);
        vals
    }
}
