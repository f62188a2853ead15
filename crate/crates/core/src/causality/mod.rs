//! Numerical causal-structure checks: maximal speeds, extremal curves,
//! cone containment, slab-wise global hyperbolicity bounds, causal
//! diamonds, ultrastaticity and identity-chart isometry windows.

mod curve;
mod diamond;
pub mod ode;
mod speed;
mod verify;

pub use curve::{integrate_causal_curve, random_direction, CausalCurve, CurveSample, DirectionPolicy, TimeDirection};
pub use diamond::{
    causal_diamond_extent, Comparison, ComparisonUsed, DiamondError, DiamondReport, DiamondSlice, Event,
};
pub use speed::{fastest_direction, max_coordinate_speed, null_velocity};
pub use verify::{
    check_isometry_at, check_isometry_window, check_ultrastatic, check_ultrastatic_at, find_ultrastatic_violation,
    isometry_deviation, verify_cone_containment, verify_convex_bound, verify_global_hyperbolicity,
    ConeContainmentOptions, ConeContainmentReport, ConeWitness, ConvexBoundReport, GhCertificate, SlabBound,
    UltrastaticViolation, WINDOW_TIME_SAMPLES,
};
