pub mod bw;
pub mod curvature;
pub mod double_form;
pub mod dsl;
pub mod error;
pub mod exterior;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod selftest;
pub mod verdicts;
pub mod warped;
pub mod yamabe;

pub use error::{Error, Result};
