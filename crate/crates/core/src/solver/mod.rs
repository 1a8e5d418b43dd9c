//! The analytical temperature field: kernels, single terms and the
//! superposition over a whole path.

mod evaluate;
mod kernels;
pub(crate) mod terms;

pub use evaluate::{evaluate, EvalRequest, Evaluator, OrderPolicy, TimePlan};
pub use kernels::{contribution_integrand, flux_integrand, green, green_1d, UNDERFLOW_ARG};
pub use terms::{contribution_term, flux_term, single_line};
