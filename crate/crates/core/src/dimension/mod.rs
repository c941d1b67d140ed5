//! Fractal-dimension estimators, Moran bounds and function-space
//! membership predicates.

mod boxcount;
mod moran;
mod oscillation;
mod predicates;

pub use boxcount::{
    box_count_mesh, box_count_polyline, check_scales, dyadic_scales, projection_monotonicity, Bounds,
    DimensionReport, Method, PointCloud, MIN_MESH_POINTS, MIN_PROJECTION_POINTS, PROJECTION_SLACK, MAX_TRAVERSAL_DIM, ProjectionReport,
};
pub use moran::{moran_solve, MoranRoot, DEFAULT_MORAN_TOL};
pub use oscillation::{
    box_count_oscillation, holder_constant, holder_estimate, oscillation_sum, total_variation,
    v_alpha_seminorm, HolderEstimate, OscillationSum, VAlphaSeminorm,
};
pub use predicates::{
    space_predicates, space_predicates_with_graph, upper_box_cap, DyadicCheck, Inequality,
    OscillationHypotheses, SpacePredicateReport, VAlphaCondition, Witnesses,
};
