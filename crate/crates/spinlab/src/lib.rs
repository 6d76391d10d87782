// `^` is the wedge product; `w ^ w` is meaningful.
#![allow(clippy::eq_op)]

//! Dirac operators on invariant spinors of nilpotent metric Lie algebras.

pub mod algebra;
pub mod clifford;
pub mod dirac;
pub mod error;
pub mod forms;
pub mod gstruct;
pub mod spin7;
pub mod scan;
pub mod cli;

pub use error::{Result, SpinError};
