//! Two-level-system swap heat engine.
//!
//! Two TLS prepared at different bath temperatures deliver work through the
//! unitary that swaps their occupations. The crate computes the work and
//! efficiency of that step, the post-swap subsystem temperatures, entropies
//! and heat capacities, three global temperatures for the resulting
//! nonequilibrium state, and the maximum-work engines behind
//! temperature-versus-efficiency curves.
//!
//! ```
//! use qhe_core::{swap, BathPair, EngineSetup};
//!
//! let baths = BathPair::new(9.0, 1.0)?;
//! let setup = EngineSetup::new(3.0, 1.0, baths)?;
//! let outcome = swap::swap(&setup);
//! assert!(outcome.extracting);
//! assert!((outcome.t1_prime - 3.0).abs() < 1e-12);
//! # Ok::<(), qhe_core::Error>(())
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod optimize;
pub mod swap;
pub mod sweep;
pub mod temperature;
pub mod thermo;

pub use error::{Error, Result};
pub use optimize::{GlobalMaxWork, MaxWorkAtEfficiency, TemperatureMinimum};
pub use swap::{EngineSetup, JointState, SwapOutcome};
pub use sweep::{OutputFormat, PointReport, SweepConfig, SweepRow};
pub use temperature::TemperatureReport;
pub use thermo::{BathPair, ClassicalBaseline, TlsThermal};
