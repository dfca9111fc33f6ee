//! Solvers for stiffness systems of stiffly-connected planar trusses,
//! preconditioned by fretsaw extensions, with dense oracles that check the
//! supporting bounds on small instances.

pub mod bench;
pub mod embedding;
pub mod factor;
pub mod error;
pub mod fretsaw;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod analysis;
pub mod stiffness;
pub mod truss;
pub mod verify;
pub mod pcg;
pub mod pipeline;

pub use error::{Error, Result};
pub use truss::{Element, Truss};
