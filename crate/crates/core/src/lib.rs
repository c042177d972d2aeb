pub mod algebra;
pub mod bounds;
pub mod chain;
pub mod chainfile;
pub mod deflicity;
pub mod error;
pub mod local_mult;
pub mod ni_perturb;
pub mod numeric;

pub use error::{Error, Result};
