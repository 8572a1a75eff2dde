//! Extensive game structures, the Coalescing and Simultanizing transformations,
//! minimal reductions, reduced normal forms and behavioral equivalence.

pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod io;
mod iso;
pub mod model;
pub mod natord;
pub mod normal_form;
pub mod partition;
pub mod reduction;
pub mod strategy;
pub mod transform;

pub use error::{GameError, StructureError};
pub use model::{GameBuilder, GameStructure, InfosetId, NodeId, TermSet};
pub use normal_form::ReducedNormalForm;
