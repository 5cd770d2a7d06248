//! Enumeration and classification of square-tiled surfaces by the
//! topological type of their horizontal and vertical multicurves.

pub mod asymptotics;
pub mod census;
pub mod cli;
pub mod curve_type;
mod dsu;
pub mod dt;
pub mod error;
pub mod foliation;
pub mod tiling;

pub use error::{Error, Result};
pub use tiling::{GluingTable, MarkedTiling, RawTable};
