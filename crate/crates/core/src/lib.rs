//! kinlab-core: a velocity-space laboratory for the non-cutoff Boltzmann
//! collision operator.
//!
//! The crate evaluates the singular collision operator on truncated velocity
//! lattices (a direct quadrature oracle and a Fourier-side path), builds the
//! weighted Sobolev / non-isotropic norms, certifies the functional
//! inequalities behind coercivity and commutator estimates by calibrated
//! sampling, constructs the thirteen-moment compensating function, and
//! reproduces algebraic relaxation rates and positivity/uniqueness
//! diagnostics at desk scale.

pub mod cross_section;
pub mod error;
pub mod grid;
pub mod quadrature;
pub mod snapshot;
pub mod spectral;
pub mod transform;
pub mod weights;

pub use error::{KinlabError, Result};
pub use grid::{inner, inner_complex, inner_dual, ComplexField, Field, VelocityGrid};
