//! Exact checks for contractions of Wahl and QEq configurations on
//! rational surfaces.

pub mod arith;
pub mod chains;
pub mod cli;
pub mod config;
pub mod contraction;
pub mod document;
pub mod fundgroup;
pub mod obstruction;
pub mod tables;

pub use arith::{IntMatrix, Rational};
pub use chains::{Chain, QeqStar, QeqType, WahlParams};
pub use config::{BlowUpSpec, Curve, CurveConfig};
pub use contraction::{AmpleVerdict, ContractionSet};
pub use document::{parse_config, Problem};
