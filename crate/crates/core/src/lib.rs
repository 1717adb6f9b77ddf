//! Hamiltonian chaos toolkit.
//!
//! Symplectic maps and billiards, stability matrices, periodic-orbit
//! censuses, symbolic dynamics, invariant manifolds and homoclinic tangles,
//! perturbation response and complexified trajectories.

pub mod complexdyn;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod orbits;
pub mod perturb;
pub mod scenario;
pub mod stability;
pub mod svg;
pub mod symbolic;
pub mod tangle;

pub use dynamics::{MapSystem, PhasePoint, TrajectorySegment};
pub use error::{ChaosError, Result};
pub use stability::{StabilityClass, StabilityMatrix, StabilityTag};
