use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
	#[error("invalid argument: {0}")]
	InvalidArgument(String),
	#[error("chip count {0} is not representable in float mode; use rational mode")]
	FloatOverflow(String),
	#[error("negative height {value} at site ({x}, {y})")]
	NegativeHeight { x: i64, y: i64, value: String },
	#[error("non-finite value at site ({x}, {y})")]
	NonFinite { x: i64, y: i64 },
	#[error("activity reached the edge of the fixed grid of radius {0}")]
	GridOverflow(usize),
	#[error("radius {radius} is smaller than the step horizon K = {steps}")]
	RadiusTooSmall { radius: usize, steps: usize },
	#[error("quadrature did not converge: doubling to {points} points changed the result by {change:e} (relative)")]
	QuadratureNotConverged { points: usize, change: f64 },
	#[error("branch point: z+ and 1/z+ coincide at w = {0}")]
	BranchPoint(String),
	#[error("empty set")]
	Empty,
	#[error("coupling violated: {0}")]
	CouplingViolation(String),
	#[error("io: {0}")]
	Io(String),
}

impl From<std::io::Error> for Error {
	fn from(e: std::io::Error) -> Self {
		Error::Io(e.to_string())
	}
}

pub type Result<T> = std::result::Result<T, Error>;
