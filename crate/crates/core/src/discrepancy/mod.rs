//! Entropy primitives and the exhaustive half-coloring search.

pub mod coloring;
pub mod entropy;

pub use coloring::{
    bucket_threshold, exact_joint_entropy, exact_joint_entropy_capped, farthest_pair,
    find_half_coloring, find_half_coloring_with, is_valid_half_coloring, round_half_down,
    rounded_signature, within_bound, FarthestPair, HalfColoringMode, HalfColoringOptions,
    PartialColoring, SignatureVector,
};
pub use entropy::{entropy_from_counts, g_bound, g_inverse, shannon_entropy};
