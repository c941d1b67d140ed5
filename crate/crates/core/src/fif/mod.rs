//! Construction, validation and evaluation of vector-valued fractal
//! interpolation systems.

mod data;
mod forcing;
mod graph;
mod render;
mod system;

pub use data::InterpolationData;
pub use forcing::{ForcingFunction, SampledGrid};
pub use graph::{ConvergenceWarning, GraphSample};
pub use render::{
    data_interpolant, evaluate_at_address, evaluate_fif, evaluation_grid, knot_error, rb_apply,
    self_referential_residual, Address,
};
pub use system::{
    affine_forcing, contraction_ratios, corrected_sampled_forcing, derive_base_maps,
    validate_system, weierstrass_forcings, BaseMap, ContractionRatio, Endpoint, FifBranch,
    FifSystem, ValidationReport, Violation, WeierstrassShape, DEFAULT_TAU_END,
};

pub(crate) use forcing::locate;
pub(crate) use graph::dist;
