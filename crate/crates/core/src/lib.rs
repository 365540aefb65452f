//! Hermitian symmetric pairs: exact root data, the strongly orthogonal
//! cascade, holomorphic discrete series criteria and numerical checks.

#![allow(clippy::needless_range_loop)]

pub mod cascade;
pub mod convergence;
pub mod criterion;
pub mod error;
pub mod exact;
pub mod hermitian;
pub mod matrix_model;
pub mod quadrature;
pub mod rootsystem;
pub mod suite;
pub mod weights;

pub use error::{Error, Result};
