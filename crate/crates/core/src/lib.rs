//! Explicit symplectic integration of non-separable Hamiltonian systems on
//! a doubled phase space, kept on the diagonal by a symmetric projection.
//!
//! ```
//! use semiexplicit::composition::CompositionScheme;
//! use semiexplicit::extended::StrangStep;
//! use semiexplicit::models::{quartic_exact_model, quartic_standard_ic};
//! use semiexplicit::projection::{semiexplicit_step, SolverConfig};
//!
//! let model = quartic_exact_model();
//! let step = semiexplicit::composition::compose(StrangStep::new(&model), CompositionScheme::identity());
//! let out = semiexplicit_step(&step, 1e-2, &quartic_standard_ic(), &SolverConfig::default()).unwrap();
//! assert!(out.stats.converged);
//! ```

pub mod composition;
pub mod error;
pub mod extended;
pub mod harness;
pub mod irk;
pub mod models;
pub mod projection;

pub use error::{Error, Result};
