//! Hyperbolic plane geometry, Fuchsian group orbits and closed geodesics.

mod classes;
mod dynamics;
mod group;
mod isometry;
mod orbit;
mod word;

pub use classes::{conj_classes, geodesic_growth, geodesic_sum, primitive_count, ConjClass, GeodesicGrowthReport};
pub use dynamics::{jacobian_ratio, pressure_bounds, pressure_const, srb_z, unstable_jacobian, PressureReport};
pub use group::{Domain, DomainSpec, GroupKind, GroupPresentation, GroupSpec};
pub use isometry::{distance_to_axis, hyp_distance, Isometry};
pub use orbit::{
    default_window, growth_fit, orbit_enumerate, prune_margin, s_growth, s_growth_from_orbit, s_sum, s_sum_to,
    GrowthFit, Orbit, OrbitEntry, SGrowthReport, DEFAULT_ORBIT_CAP,
};
pub use num_complex::Complex64;
pub use word::{cyclic_shifts_distinct, Word};
