//! Text formats: EGS for games, ZNF for reduced normal forms, DOT for drawings.

mod dot;
mod egs;
mod znf;

pub use dot::export_dot;
pub use egs::{parse_egs, parse_egs_unchecked, serialize_egs, EgsError};
pub use znf::{parse_znf, serialize_znf, ZnfError};
