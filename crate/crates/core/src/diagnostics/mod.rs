//! Viscosity curve, Lyapunov energy, the one-step energy audit and
//! descent-inequality property checks.

mod audit;
mod descent;
mod energy;
mod lemmas;
mod viscosity;

pub use audit::{audit_theorem1, AuditEntry, AuditReport};
pub use descent::{check_descent_lemmas, DescentViolation, DESCENT_EPSILONS};
pub use energy::{coefficients, energy_at, energy_terms, Coefficients, EnergyBreakdown};
pub use lemmas::{check_viscosity_curve, check_viscosity_lemmas, Violation};
pub use viscosity::{
    regularized_value, viscosity_point, viscosity_point_by_descent, ViscosityCurve, ViscosityPoint, INNER_BUDGET,
    LOGISTIC_MIN_EPSILON,
};
