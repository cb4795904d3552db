//! Luxemburg norms for `Phi(t) = t^p (log+ t)^q`, truncated Bergman kernels
//! of the disk and annuli, sublevel and dyadic checks for kernel
//! integrability, and quadrature of `1/z` on the Hartogs domain.

mod averaging;
mod collar;
mod kernel;
mod orlicz;
mod samples;
mod scan;

pub use averaging::{circle_points, contour_coefficient, rotational_average, AverageReport};
pub use collar::{
    fiber_integral, fit_slope, free_angle, hartogs_volume, laurent_filter, lemma41_integrals, FiberWeight, Growth,
    LaurentFilterReport, LaurentFilterRow, Lemma41Report, Lemma41Row, ReciprocalOnHartogs,
};
pub use kernel::{
    closed_coefficient, default_pole_sets, disk_kernel_closed, kernel_eval, numeric_coefficient, reproducing_check,
    span_density_test, AutoOrder, KernelApprox, KernelDomain, KernelValue, ReproducingReport, ReproducingRow,
    SpanReport, SpanRow, DEFAULT_ANNULUS_ORDER, DEFAULT_DISK_ORDER,
};
pub use orlicz::{
    inclusion_chain, luxemburg_norm, orlicz_props_check, young_t0, CutoffSeries, InclusionReport, InclusionRow,
    Modular, OrliczParams, OrliczPropsReport,
};
pub use samples::{
    annulus_samples, disk_samples, hartogs_samples, FunctionSpec, HartogsSampling, Laurent, LaurentTerm, Sample,
    SampleGrid, SampledFunction,
};
pub use scan::{
    annulus_exhaustion, default_scan_levels, disk_obstacle_rho, dyadic_orlicz_certifier, sublevel_integral_scan,
    DyadicReport, DyadicVerdict, ScanReport, ScanRow,
};
