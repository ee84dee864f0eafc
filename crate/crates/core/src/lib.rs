//! Leaky abelian sandpile model on Z².
//!
//! The crate is split by concern:
//!
//! * [`engine`]: configurations, the leaky toppling rule, stabilization, the
//!   operator `T`, the modified ASM and the exact coupled run.
//! * [`krw`]: killed random walk death probabilities by dynamic programming,
//!   closed forms and contour quadrature.
//! * [`shape`]: saddle points, limit curves, radial bands, amoeba and dual.
//! * [`verify`]: cross-module experiments producing pass/fail reports.
//! * [`io`]: CSV, JSON and PPM writers.

pub mod engine;
pub mod error;
pub mod grid;
pub mod io;
pub mod krw;
pub mod rule;
pub mod scalar;
pub mod shape;
pub mod verify;

pub use engine::{
	apply_t, coupled_run, point_source, radial_profile, stabilize, stabilize_modified_asm,
	stabilize_with, CouplingReport, Direction, FireOrder, GridPolicy, Odometer, RadialProfile,
	StabilizeOptions, StabilizationResult,
};
pub use error::{Error, Result};
pub use grid::{Grid, HeightField};
pub use rule::ToppleRule;
pub use scalar::{parse_rational, Rational, Scalar};
