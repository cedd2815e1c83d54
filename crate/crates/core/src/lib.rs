//! Numerical laboratory for the damped magnetic Prandtl boundary-layer
//! system on the half-plane, with the Gevrey-2 norm machinery used to
//! monitor its global decay.

pub mod auxiliary;
pub mod error;
pub mod fd;
pub mod gevrey;
pub mod grid;
pub mod harness;
pub mod io;
pub mod mms;
pub mod norms;
pub mod solver;
pub mod suite;
pub mod toy;
pub mod tridiag;
pub mod yop;

pub use error::{LabError, Result};
pub use gevrey::GevreyParams;
pub use grid::{Field, Grid, GridSpec};
pub use norms::NormReport;
pub use solver::{RunConfig, SimState};
