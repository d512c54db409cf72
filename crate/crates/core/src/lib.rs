//! Clairaut geodesics, Willmore energies and curvature audits on surfaces
//! of revolution.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audits;
pub mod csf;
pub mod figures;
pub mod geodesic;
pub mod graph;
pub mod numerics;
pub mod report;
pub mod spheroid;
pub mod surfaces;
pub mod tiling;
