//! Exact moments and cumulants of hypergeometric observables of the Circular
//! Unitary Ensemble, monotone Hurwitz numbers with torus target, and
//! quasimodularity certificates for their genus generating functions.

pub mod algebra;
pub mod content;
pub mod hurwitz;
pub mod hypergeom;
pub mod numeric;
pub mod partitions;
pub mod quasimodular;
pub mod symgroup;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
