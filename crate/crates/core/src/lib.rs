//! Linear response of a condensate coupled to a driven optical cavity.
//!
//! The atomic field is reduced to a single Bogoliubov mode that behaves as
//! a mechanical oscillator. The crate solves the mean-field steady state,
//! checks its dynamical stability, and evaluates the retarded Green's
//! functions that set the Stokes and anti-Stokes response to a weak probe.

// Fixed 4×4 kernels read best with explicit indices; negated comparisons
// are deliberate so that NaN fails the check.
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::explicit_counter_loop
)]

pub mod diagnostics;
pub mod error;
pub mod model;
pub mod numerics;
pub mod parallel;
pub mod response;
pub mod scenario;
pub mod steady;

pub use error::{Error, Result, TuneCandidateSummary};
pub use model::{derive, DerivedParams, PhysicalParams};
pub use parallel::Execution;
pub use response::{build_drift, DriftMatrix, ResponseSpectrum};
pub use scenario::{CouplingMode, CurveSpec, FigureId, FigureRecipe, Scenario};
pub use steady::{is_stable, solve_mean_fields, tune_coupling_frequency, MeanFields, Tuning};
