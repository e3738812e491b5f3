//! Numerical laboratory for antibunching in weakly nonlinear coupled bosonic
//! modes.
//!
//! Two driven-dissipative Kerr resonators (and a Jaynes-Cummings variant) are
//! simulated exactly in a truncated two-mode Fock space. Alongside the
//! master-equation machinery the crate carries the weak-driving amplitude
//! recurrence, the closed-form optimal-interference conditions, Gaussian
//! (squeezed-state) analytics and input-output field mixing, so that every
//! analytic statement can be checked against full numerics.
//!
//! Units: `ħ = 1`, every rate in units of a reference linewidth `κ`, every
//! time in units of `1/κ`.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod iomix;
pub mod linalg;
pub mod ode;
pub mod optimal;
pub mod squeezing;
pub mod weakdrive;

pub use error::{Error, Result};
pub use fock::{BasisTag, DensityMatrix, FockBasis, Mode, Operator};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
