//! IO companion for the exact tiling machinery: JSON/CSV file formats and
//! scripted experiment scenarios. The algorithms themselves live in
//! `tilekit-core`; this crate only moves their inputs and outputs across
//! process boundaries.

pub mod formats;
pub mod scenarios;
