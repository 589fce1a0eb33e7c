//! Library side of the `polygeom` command-line tool: JSON formats, campaign
//! runner, replay, and SVG output.

pub mod campaign;
pub mod error;
pub mod json;
pub mod replay;
pub mod svg;
