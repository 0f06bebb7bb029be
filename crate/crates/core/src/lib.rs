//! Exact and numerical machinery for verifying q-series identities, WZ pairs,
//! q-supercongruences and their classical limits.

pub mod congruences;
pub mod error;
pub mod exactnum;
pub mod hypterm;
pub mod identities;
pub mod numerics;
pub mod qpoly;
pub mod qseries;
pub mod transforms;
pub mod wz;

pub use error::{Error, Result};
