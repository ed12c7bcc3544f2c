//! Wedge-product solutions: coefficients and regularity, exact phases with
//! logarithmic constants, boundary lines and the four-phase examples.

mod geometry;
mod logval;
mod tau;

pub use geometry::{
    boundary_line, cmp_time, coincidence_time, cross_ratio_log, intersect, otype_geometry, parallel_events,
    parallel_momenta, parallel_sweep, parallel_tau, visible_boundaries, BoundaryLine, OTypeGeometry, ParallelEvents,
};
pub use logval::{ln_bounds, LogValue, MAX_BITS};
pub use tau::{
    build_tau, compare_phases, dual_tau, p_limit, FactorEntry, GeneralPhase, GeneralTau, TauTerm, WedgeSpec,
};
