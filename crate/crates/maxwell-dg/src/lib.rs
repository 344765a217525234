//! Discontinuous Galerkin solvers for the 1D and 2D stochastic Maxwell
//! equations with additive Q-Wiener noise.
//!
//! The crate provides:
//!
//! * modal Legendre DG semi-discretizations with generalized alternating
//!   fluxes {v} + α[v] on periodic meshes ([`dg1d`], [`dg2d`]),
//! * truncated Q-Wiener noise models with joint (ΔB, J) increment sampling
//!   and reproducible per-path streams ([`qwiener`]),
//! * L² and generalized Radau projections for initial data ([`projections`]),
//! * symplectic Euler, two-stage partitioned Runge–Kutta, and a second-order
//!   Taylor reference integrator for the resulting linear SDE systems
//!   ([`sympint`]),
//! * the six-field reformulation used to verify discrete multi-symplectic
//!   conservation to machine precision ([`msp1d`]),
//! * experiment drivers for convergence tables, energy-growth slopes, and
//!   temporal strong-order studies ([`lab`]), exposed through the CLI
//!   ([`cli`]).

pub mod basis;
pub mod cli;
pub mod dg1d;
pub mod dg2d;
pub mod error;
pub mod field;
pub mod lab;
pub mod mesh;
pub mod msp1d;
pub mod projections;
pub mod qwiener;
pub mod sympint;
pub mod system;

pub use error::{Error, Result};
