//! Invariant manifolds, homoclinic points, action/area relations and
//! linearized transport of Gaussian densities.

pub mod cycle;
pub mod gaussian;
pub mod homoclinic;
pub mod manifold;

pub use cycle::{curvature_correction, sieber_richter_scan, CurvatureCorrection, SrPair};
pub use homoclinic::{
    area_between_manifolds, find_homoclinic_points, mmp_action_difference, HomoclinicPoint,
    MmpResult,
};
pub use manifold::{grow_manifold, try_grow, Branch, ManifoldOptions, ManifoldSegment};
pub use gaussian::{
    evolve_gaussian, evolve_linear, heteroclinic_overlap, GaussianState, OverlapOptions, OverlapResult, OverlapTerm,
};
