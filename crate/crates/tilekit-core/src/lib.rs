//! Exact machinery for fractional clique tilings of balanced k-partite graphs.
//!
//! Everything in this crate computes over exact rationals or integers; no
//! floating point enters any decision. Floats appear only as reported values
//! (probability bounds). The crate is `no_std` + `alloc` so the algorithms can
//! be embedded anywhere; IO and file formats live in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitset;
pub mod cliques;
pub mod fractional;
pub mod graph;
pub mod lp;
pub mod params;
pub mod pipeline;
pub mod rational;
pub mod regularity;
pub mod tiling;

pub use graph::{DegreeProfile, KPartiteGraph, VertexRef};
pub use rational::Rational;
