//! Barycentre quadrature on attractors of iterated function systems.
//!
//! The crate covers smooth single and double integrals with respect to
//! Hausdorff measure, the singular kernels `log|x-y|` and `|x-y|^{-t}`
//! through their self-similarity identities, and the Helmholtz fundamental
//! solution by singularity subtraction, plus a small convergence-study
//! harness.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod ifs;
pub mod kernel_helmholtz;
pub mod kernel_phi_t;
pub mod partition;
pub mod quadrature;

pub use error::{Error, ErrorKind, Result};
pub use geometry::{ConvexHull, HullApprox, SeparationReport};
pub use kernel_helmholtz::HelmholtzKernel;
pub use kernel_phi_t::{PhiTKernel, SingularOptions};
pub use harness::{ConvergenceReport, ExperimentConfig, KernelSpec};
pub use ifs::{Attractor, DiamProvenance, Point, Similarity, SubComponent, VecIndex};
pub use partition::{Partition, QuadratureRule};
pub use quadrature::{Integrand1, Integrand2, Regularity};
pub use num_complex::Complex64;
