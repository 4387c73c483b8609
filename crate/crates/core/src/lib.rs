//! Finite-dimensional unitary N-dilations of contraction matrices and tuples,
//! and what can be computed from them.
//!
//! The library is organized around a dense complex matrix kernel ([`matrix`],
//! [`decomp`]) on top of which sit the dilation constructions for a single
//! contraction ([`dilation`]) and for commuting tuples ([`mod@tuple`]), a small
//! multivariate polynomial engine ([`poly`]), the spectral machinery that
//! turns a dilation into a von Neumann certificate or a torus cubature rule
//! ([`cubature`]), and completely positive maps with their Choi/Kraus/index
//! calculus ([`cpmap`]).
//!
//! All operations are pure functions of immutable inputs; every type is
//! `Send + Sync`. Randomized choices (the Gaussian mixing coefficients used
//! for joint diagonalization, the sample generators) draw from an explicit
//! seeded [`rng::SplitMix64`] so results are reproducible bit-for-bit.

pub mod cpmap;
pub mod cubature;
pub mod decomp;
pub mod dilation;
pub mod error;
pub mod matrix;
mod mono;
pub mod poly;
pub mod rng;
pub mod sample;
pub mod tol;
pub mod tuple;

pub use cpmap::CPMap;
pub use cubature::{CubatureRule, JointDiag, VNCertificate, VnReport};
pub use decomp::{HermEig, Svd};
pub use dilation::{Construction, DefectData, ErgodicReport, NDilation, VerificationReport};
pub use error::{Error, Result};
pub use matrix::CMatrix;
pub use poly::MultiPoly;
pub use tol::Tol;
pub use tuple::{BrehmerReport, ContractionTuple, MultiIndex};
