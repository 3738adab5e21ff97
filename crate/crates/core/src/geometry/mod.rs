//! Cross-section geometry: sampled area tables, slab approximations,
//! closed-form trapezoids, least-squares volume fits and error metrics.

pub mod cross_section;
pub mod fit;
pub mod metrics;
pub mod slabs;
pub mod trapezoid;

pub use cross_section::{
    AreaCurve, AreaSample, CrossSectionSet, CrossSectionTable, Side, TableKey,
};
pub use fit::{
    fit_linear, fit_quadratic, fit_side, sample_side, select_volume_model, FitKind, FitMode,
    FittedVolumeModel, FIT_SAMPLES,
};
pub use metrics::{mape, rmse, ErrorMetrics};
pub use slabs::{build_slabs, SideSlabs, Slab, SlabApproximation};
pub use trapezoid::{trapezoid_volume, SideSlopes, TrapezoidGeometry};
