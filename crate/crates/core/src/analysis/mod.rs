//! Experiments on top of the spectral pipelines: pole sweeps, the boundary
//! limit, nodal order at the pole, vanishing rates and smoothness scans.

mod boundary;
mod nodal;
mod rate;
mod smooth;
mod sweep;

pub use boundary::{boundary_convergence, inward_normal, BoundaryReport};
pub use nodal::{
    locate_order_pole, nodal_from_samples, nodal_order, nodal_order_in, ray_geometry, NodalOptions, NodalReport,
};
pub use rate::{fit_power_law, rate_fit, rate_fit_with, RateFit, RATE_TOLERANCE};
pub use smooth::{smoothness_scan, SmoothnessReport};
pub use sweep::{sweep, sweep_row, SweepRow, SweepTable};
