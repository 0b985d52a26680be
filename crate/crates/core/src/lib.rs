//! Numerical toolkit for the slice regular quaternionic Fock space at finite
//! truncation: regular products, reproducing kernels, weighted composition
//! operators, anti-linear conjugations and executable certificates.

pub mod certificate;
pub mod cli;
pub mod conjugations;
pub mod error;
pub mod fock;
pub mod operators;
pub mod quaternion;
pub mod random;
pub mod slice_series;

pub use error::{Error, Result};
pub use quaternion::{Frame, Quaternion, SlicePoint, UnitImaginary};
pub use slice_series::{QSeries, SplitSeries};
