//! Eigenvalue solver for fourth-order Sturm-Liouville problems
//!
//! The equation treated here is
//!
//! ```text
//! l y = (1/w) * ( ((p y'')' - s y')' + q y ) = lambda y      on (a, b)
//! ```
//!
//! with 1/p, s, q, w locally integrable and p, w > 0. Everything is built on
//! the first-order Hamiltonian reformulation `J z' = S(x, lambda) z` in the
//! quasi-derivative state `z = (y, y', y^[3], y^[2])`, which gives:
//!
//! * eigenvalues of regular self-adjoint problems by oscillation counting
//!   (rank-deficiency events of the fundamental solution plus a Weyl-matrix
//!   correction at a matching point), see [`oscillation`];
//! * classification of singular endpoints by the dimension of the
//!   square-integrable solution space, see [`problem::classify_endpoint`];
//! * regularization of singular problems by interval truncation with
//!   synthesized boundary conditions at the truncation points, including
//!   the sigma-forcing construction that keeps truncated spectra free of
//!   spurious accumulation, see [`bc`] and [`truncation`];
//! * Green's-function kernels and Hilbert-Schmidt distances between a
//!   singular kernel and its truncations, see [`greens`].
//!
//! The crate is `no_std` (with `alloc`) apart from the default `std` feature;
//! all transcendental math goes through `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bc;
pub mod error;
pub mod expr;
pub mod greens;
pub mod hamiltonian;
pub mod linalg;
pub mod oscillation;
pub mod problem;
pub mod propagate;
pub mod truncation;

pub use error::Error;
pub use linalg::C64;
