//! Jet-based curvature toolkit for metrics and general Weyl connections,
//! with machine checks of the projective/conformal Weyl tensor coincidence
//! theorem.
//!
//! Pipeline: expressions ([`exprdsl`]) are evaluated as order-3 jets
//! ([`jets`]) to give metric jets; [`geometry`] builds connections; and
//! [`curvature`] derives Riemann, Ricci, Schouten, Weyl and Cotton-York
//! tensors. [`theorems`] turns the identities into residual checks.

// Tensor code indexes several arrays with the same loop variables.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod curvature;
pub mod exprdsl;
pub mod geometry;
pub mod jets;
pub mod parallel;
pub mod reference;
pub mod sampling;
pub mod specfile;
pub mod subject;
pub mod tensor;
pub mod theorems;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Curvature(#[from] curvature::CurvatureError),
    #[error(transparent)]
    Spec(#[from] specfile::SpecError),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

impl Error {
    /// Whether the error comes from user input rather than from evaluating a
    /// valid structure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Spec(_) | Error::UnknownEntry(_))
    }
}
