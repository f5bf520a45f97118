pub mod check;
pub mod diagnose;
pub mod profile;
pub mod run;
pub mod sweep;

pub use check::{certify, cmd_check_params, CheckReport};
pub use diagnose::{cmd_diagnose, diagnose, DiagnoseReport};
pub use profile::cmd_profile;
pub use run::{cmd_run, execute, write_outputs, Execution};
pub use sweep::{cmd_sweep, sweep, CellSummary, SweepOutcome, WORKERS_ENV};
