//! Quaternionic Kähler geometry of the c-map, verified numerically.
//!
//! The crate constructs, in explicit real coordinates, the whole chain
//!
//! CASK domain M_k → rigid c-map T*M_k → elementary deformation/twist data →
//! one-loop deformed Ferrara–Sabharwal metrics,
//!
//! and machine-checks the identities these structures satisfy: quaternion
//! relations, closedness, moment maps, rotating and lifted symmetries, the
//! twist-Killing criterion, central-extension cocycles, curvature-operator
//! spectra and their closed forms.
//!
//! Every tensor is a [`jetcalc`] field program, so all derivatives are exact
//! (forward-mode jets) and every check reduces to residual sup-norms at
//! sampled points. See the `examples/` directory for runnable walkthroughs of
//! each capability, and the `qkmap` binary for scripted suites.

pub mod error;
pub mod geometries;
pub mod groups;
pub mod invariants;
pub mod report;
pub mod symmetries;

pub use error::{QkError, Result};
pub use jetcalc;
