//! Logarithmic capacity of planar compacta, capacity-density index sets,
//! and the two-sided check on the slit disk `D(0, 3) - E`.

mod compact;
mod density;
mod equilibrium;
mod example5;

pub use compact::{Component, PlanarCompact};
pub use density::{
    annulus_complement_slice, carleson_totik_set, gamma_density_set, harmonic, ComplementSlicer, DensityIndexReport,
    DensityParams, DensityRow, DiskSetSlicer, DENSITY_NODES,
};
pub use equilibrium::{
    energy_with_weights, interval_capacity, log_capacity, log_capacity_intervals, project_simplex,
    EquilibriumSolution, ENERGY_TOL, KAPPA, MAX_ITERATIONS,
};
pub use example5::{
    standard_slice, standard_slice_capacity, verify_example5, BoundRow, CtOutcome, Example5Config, Example5Report,
    SampleKind, SampleOutcome,
};
