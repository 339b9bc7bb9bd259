//! Core models for a multimode surface-acoustic-wave cavity coupled to a
//! flux-tunable transmon.
//!
//! The crate covers the full chain from device parameters to observables:
//!
//! - [`model`] — domain types (mode tables, transmon, coupling) and the
//!   elementary relations between them (flux tuning law, level ladder, FSR).
//! - [`spectral`] — the bordered interaction matrix of n acoustic modes plus
//!   one qubit, its Jacobi eigendecomposition, and the hybridized loss rates
//!   of the dressed modes.
//! - [`reflection`] — one-port input-output reflection spectra of the bare
//!   and hybridized cavity, including 2-D flux sweeps.
//! - [`dispersive`] — the generalized Jaynes-Cummings ladder per excitation
//!   manifold, dispersive shift, and Stark-shift curves.
//! - [`acoustics`] — first-principles transducer physics: coupling estimates
//!   from geometry and materials, and the phonon emission rate.
//! - [`fitting`] — damped Gauss-Newton least squares with the two-stage
//!   spectrum fits used to recover device parameters from data.
//!
//! All frequencies and rates are linear (Hz, full width); angular factors of
//! 2π appear only inside formulas. The crate is `no_std` + `alloc`; IO and
//! file formats live in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod acoustics;
pub mod dispersive;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod model;
pub mod reflection;
pub mod spectral;

mod util;

pub use error::{Error, Result};
