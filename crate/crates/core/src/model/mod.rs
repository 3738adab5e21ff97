//! Assembly of the mixed-integer (UVA) and convex (CUVA) optimization models
//! from a road network and its cross-section data.

pub mod build;
pub mod catalog;
pub mod flow;
pub mod instance;
pub mod objective;
pub mod profile;
pub mod residual;
pub mod volume;

pub use build::{build_cuva, build_uva};
pub use catalog::{CommonVars, Owner};
pub use instance::{
    Family, InstanceBuilder, LinearConstraint, ModelInstance, ModelKind, QuadraticConstraint,
    Relation, SlabChain, VarInfo, VariableCatalog,
};
pub use residual::{material_balance, validate_solution, MaterialBalance, ResidualReport};
pub use volume::{FitEntry, FitSet, SlabSet, VolumeCaps};
