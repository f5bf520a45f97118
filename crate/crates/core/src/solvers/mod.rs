//! TRIGA, NAG and NADTR iterations with a shared run driver.

mod driver;
mod reference;
mod state;
mod steps;
mod trace;

pub use driver::{run, Method, RunError, RunOptions};
pub use reference::{reference_optimum, ReferenceValue};
pub use state::{SolverState, StoppingCriteria, Stride};
pub use steps::{nadtr_coefficients, nadtr_step, nag_step, triga_step, NadtrSettings};
pub use trace::{fmt_f64, read_iterates_csv, read_trace_csv, Status, Trace, TraceRecord, CSV_HEADER};
