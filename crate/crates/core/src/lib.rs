pub mod cli;
pub mod error;
pub mod harness;
pub mod ext_real;
pub mod optimal_target;
pub mod orlicz;
pub mod profile;
pub mod quadrature;
pub mod rearrange;
pub mod ri_norms;
pub mod tail;

pub use error::{Error, Result};
