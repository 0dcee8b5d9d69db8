//! Exact intersection numbers for twisted (co)homology of hyperplane arrangements in
//! general position and with a single degenerate point, together with the contiguity
//! matrices of the associated hypergeometric integrals and a numerical series check.

pub mod field;
pub mod linalg;
pub mod arrangement;
pub mod cohomology;
pub mod fm;
pub mod homology;
pub mod contiguity;
pub mod series;
