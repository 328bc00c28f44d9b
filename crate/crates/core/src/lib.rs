//! Entropy rounding of LP solutions, with bin packing applications.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binpack;
pub mod config;
pub mod covering;
pub mod discrepancy;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod oracles;
pub mod rounding;
pub mod sdp;
