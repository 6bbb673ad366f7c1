//! Quantum-graph vertex couplings with circulant structure and the square
//! lattice built on them.
//!
//! The crate covers three layers:
//!
//! - [`circulant`]: unitary circulant matrices, their Fourier
//!   diagonalization, the parity permutation and the mirror covariance
//!   `P U P = U^T` that every circulant coupling satisfies;
//! - [`star`]: vertex boundary conditions on a star of halflines, on-shell
//!   scattering matrices with closed forms for the (phased) shift coupling,
//!   momentum limits and (anti)bound states;
//! - [`lattice`]: the band structure of the square lattice with the
//!   phased-shift vertex coupling — secular determinant, quartic spectral
//!   condition, membership tests, band scans, flat bands, the negative
//!   branch, spectral-fraction estimates, Fermi contours and gap-closing
//!   (Dirac) points.
//!
//! [`numerics`] holds the small dense complex solver and root-finding the
//! rest of the crate is built on.

pub mod circulant;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod star;

pub use error::{Error, Result};
pub use num_complex::Complex64;
