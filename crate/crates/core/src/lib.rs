//! Wiener-chaos laboratory for the parabolic Anderson model driven by
//! Gaussian noise that is fractional in time, with measure-valued initial data.

pub mod cli;
pub mod error;
pub mod kernels;
pub mod lab;
pub mod measure;
pub mod par;
pub mod params;
pub mod quad;
pub mod simplex;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use par::ExecMode;
