//! Analytical heat conduction in a half-space heated by a moving Gaussian
//! beam whose power, spot size and speed are piecewise constant in time.
//!
//! The temperature at a point is the bulk initial temperature plus one
//! time integral per completed segment plus one for the active segment.
//! Each integral is evaluated with Gauss–Legendre quadrature whose order
//! comes from a precomputed table keyed on scaled time and speed.
//!
//! ```
//! use pbfheat::{load_path, Evaluator, MaterialParams, OrderPolicy};
//!
//! let material = MaterialParams::from_diffusivity(4430.0, 20.0, 8.4495e-6)?;
//! let path = load_path("pbfpath 1\nmelt 0 0 10 0 100 0.1 1000\n", 1000.0)?;
//! let eval = Evaluator::new(path, material, OrderPolicy::Fixed(200));
//! let u = eval.evaluate([5e-3, 0.0, 0.0], 5e-3)?;
//! assert!(u > 2000.0);
//! # Ok::<(), pbfheat::Error>(())
//! ```

// negated comparisons reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod frame;
pub mod heatmap;
pub mod material;
pub mod path;
pub mod quadrature;
pub mod scenarios;
pub mod solver;
pub mod validation;

pub use error::{Error, Result};
pub use field::{FieldGrid, FieldResult, Provenance};
pub use frame::{contribution_frame, flux_frame, DimensionlessFrame, FrameKind};
pub use material::{parse_material, MaterialFile, MaterialParams};
pub use path::{load_path, BeamPath, Segment, SegmentKind};
pub use quadrature::{gauss_legendre, integrate, LutConfig, LutFamily, Quadrature, QuadratureLut};
pub use solver::{evaluate, EvalRequest, Evaluator, OrderPolicy};
