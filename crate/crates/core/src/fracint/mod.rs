//! Riemann–Liouville fractional integrals of FIFs.

mod derived;
mod gamma;
mod report;
mod rl;

pub use derived::{derive_fractional_ifs, verify_fractional_identity, FracIntSystem, IdentityCheck};
pub use gamma::{gamma_eval, FracOrder};
pub use report::{fractional_dimension_report, FracDimReport, Statement, StatementKind};
pub use rl::{rl_integral, rl_integral_at};
