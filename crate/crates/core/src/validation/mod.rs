//! Independent numerical checks of the analytical solution.

mod convolution;
mod fd;
mod semigroup;

pub use convolution::{convolution_audit, default_probes, ConvolutionGrid, ConvolutionReport};
pub use fd::{fd_solve, FdConfig, FdResult, MAX_CELLS, MAX_STEPS};
pub use semigroup::{convolve_gaussians_1d, semigroup_audit, SemigroupReport};
