//! Software product line toolkit: feature models, configuration analysis,
//! product derivation and source metrics.

pub mod fm;
pub mod dsl;
pub mod derive;
pub mod graph;
pub mod metrics;
#[cfg(feature = "testing")]
pub mod testing;
