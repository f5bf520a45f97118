//! Tikhonov schedules, parameter admissibility and the parameter selector.

mod certify;
mod parameters;
mod table;
mod tikhonov;

pub use certify::{
    check_k0_at, critical_c_bound, critical_margins, find_k0, Certificate, K0Report, EXHAUSTIVE_PREFIX, GRID_RATIO,
    STANDING,
};
pub use parameters::{check_k1, default_delta, default_q, min_q, step_bound, Condition, K1Report, SolverParameters};
pub use table::{select_parameters, select_parameters_in_row, Selection, TableRow};
pub use tikhonov::TikhonovSchedule;
