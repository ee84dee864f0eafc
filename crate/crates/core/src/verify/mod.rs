//! Cross-module experiments with machine-readable pass/fail reports.

mod coupling;
mod leak;
mod operators;
mod sandwich;
mod shape;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::ToppleRule;

pub use coupling::check_coupling;
pub use leak::{check_leak_to_zero, crossing_radius};
pub use operators::check_operator_identities;
pub use sandwich::{check_sandwich, SandwichCounts};
pub use shape::{boundary_directions, check_shape_convergence};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
	pub name: String,
	pub measured: f64,
	pub bound: f64,
	pub pass: bool,
	pub note: String,
}

impl Check {
	/// Passes when `measured ≤ bound`.
	pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
		Check { name: name.into(), measured, bound, pass: measured <= bound, note: String::new() }
	}

	/// Passes when `measured < bound`.
	pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
		Check { name: name.into(), measured, bound, pass: measured < bound, note: String::new() }
	}

	pub fn with_note(mut self, note: impl Into<String>) -> Self {
		self.note = note.into();
		self
	}
}

/// A numeric table attached to a report, written out as CSV by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
	pub name: String,
	pub columns: Vec<String>,
	pub rows: Vec<Vec<f64>>,
}

impl Table {
	pub fn new(name: &str, columns: &[&str]) -> Self {
		Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
	}
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
	pub name: String,
	pub checks: Vec<Check>,
	/// All checks pass.
	pub pass: bool,
	/// Modules whose output served as reference values.
	pub oracles: Vec<String>,
	/// Facts worth reporting that are not pass/fail.
	pub notes: Vec<String>,
	pub tables: Vec<Table>,
}

impl VerificationReport {
	pub fn new(name: impl Into<String>, oracles: &[&str]) -> Self {
		VerificationReport {
			name: name.into(),
			checks: Vec::new(),
			pass: true,
			oracles: oracles.iter().map(|o| o.to_string()).collect(),
			notes: Vec::new(),
			tables: Vec::new(),
		}
	}

	pub fn push(&mut self, check: Check) {
		self.pass &= check.pass;
		self.checks.push(check);
	}

	pub fn note(&mut self, note: impl Into<String>) {
		self.notes.push(note.into());
	}

	pub fn failures(&self) -> impl Iterator<Item = &Check> {
		self.checks.iter().filter(|c| !c.pass)
	}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
	/// Largest directional deviation from the scaled limit curve, lattice units.
	pub shape_deviation: f64,
	/// Largest change of the deviation across the sweep along its linear trend.
	pub shape_trend: f64,
	/// Extra room around the asymptotic inner/outer radii, lattice units.
	pub band_slack: f64,
	/// Largest fraction of boundary-adjacent sites left unclassified.
	pub inconclusive_fraction: f64,
	pub anisotropy: f64,
	/// Allowed distance between the exact and predicted radius ratio.
	pub ratio: f64,
	pub operator_origin: f64,
	pub operator_ones: f64,
	pub round_trip: f64,
	/// Simulations predicted to need more fires than this are skipped.
	pub max_fires: f64,
}

impl Default for Tolerances {
	fn default() -> Self {
		Tolerances {
			shape_deviation: 3.0,
			shape_trend: 1.0,
			band_slack: 2.0,
			inconclusive_fraction: 0.05,
			anisotropy: 0.05,
			ratio: 0.1,
			operator_origin: 1e-10,
			operator_ones: 1e-12,
			round_trip: 1e-8,
			max_fires: 1e10,
		}
	}
}

impl Tolerances {
	fn validate(&self) -> Result<()> {
		let all = [
			self.shape_deviation,
			self.shape_trend,
			self.band_slack,
			self.inconclusive_fraction,
			self.anisotropy,
			self.ratio,
			self.operator_origin,
			self.operator_ones,
			self.round_trip,
			self.max_fires,
		];
		if all.iter().all(|t| *t > 0.0) {
			Ok(())
		} else {
			Err(Error::InvalidArgument("tolerances must be positive".into()))
		}
	}
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Experiment {
	Sandwich,
	Operators,
	Shape,
	Leak,
	Coupling,
}

impl Experiment {
	pub const ALL: [Experiment; 5] =
		[Experiment::Sandwich, Experiment::Operators, Experiment::Shape, Experiment::Leak, Experiment::Coupling];

	pub fn name(self) -> &'static str {
		match self {
			Experiment::Sandwich => "sandwich",
			Experiment::Operators => "operators",
			Experiment::Shape => "shape",
			Experiment::Leak => "leak",
			Experiment::Coupling => "coupling",
		}
	}

	pub fn parse(s: &str) -> Result<Self> {
		Experiment::ALL
			.into_iter()
			.find(|e| e.name() == s)
			.ok_or_else(|| Error::InvalidArgument(format!("unknown experiment {s}")))
	}
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
	pub experiment: Experiment,
	/// Chip counts; a sweep for the shape experiment, a list for coupling.
	pub n: Vec<f64>,
	pub d: Vec<f64>,
	/// Leakiness values `d − 1` for the vanishing-leakiness experiment.
	pub t: Vec<f64>,
	/// Weight sets (up, right, down, left) for the sandwich and operator checks.
	pub weights: Vec<[f64; 4]>,
	/// Grid radius for the all-ones operator check.
	pub radius: usize,
	pub tolerances: Tolerances,
	pub seed: u64,
}

impl ExperimentConfig {
	/// The acceptance-level defaults for each experiment.
	pub fn preset(experiment: Experiment) -> Self {
		let uniform = [1.0; 4];
		let base = ExperimentConfig {
			experiment,
			n: Vec::new(),
			d: Vec::new(),
			t: Vec::new(),
			weights: vec![uniform],
			radius: 20,
			tolerances: Tolerances::default(),
			seed: 1,
		};
		match experiment {
			Experiment::Sandwich => ExperimentConfig {
				n: vec![1e5, 1e6],
				d: vec![2.0, 1.5],
				weights: vec![uniform, [2.0, 1.0, 1.0, 1.0]],
				..base
			},
			Experiment::Operators => ExperimentConfig {
				d: vec![1.5, 2.0, 5.0],
				weights: vec![uniform, [2.0, 1.0, 1.0, 1.0]],
				..base
			},
			Experiment::Shape => ExperimentConfig { n: vec![1e10, 1e20, 1e40, 1e80], d: vec![2.0], ..base },
			Experiment::Leak => {
				let n: f64 = 1e7;
				ExperimentConfig { n: vec![n], t: vec![n.powf(-0.5), 1.0 / n.ln()], ..base }
			}
			Experiment::Coupling => ExperimentConfig { n: vec![5.0, 50.0, 500.0, 2000.0], ..base },
		}
	}

	pub fn validate(&self) -> Result<()> {
		self.tolerances.validate()?;
		let need = |ok: bool, what: &str| {
			if ok {
				Ok(())
			} else {
				Err(Error::InvalidArgument(format!("{} needs a nonempty {what} list", self.experiment.name())))
			}
		};
		match self.experiment {
			Experiment::Sandwich => {
				need(!self.n.is_empty(), "n")?;
				need(!self.d.is_empty(), "d")?;
				need(!self.weights.is_empty(), "weights")
			}
			Experiment::Operators => {
				need(!self.d.is_empty(), "d")?;
				need(!self.weights.is_empty(), "weights")
			}
			Experiment::Shape => {
				need(!self.n.is_empty(), "n")?;
				need(!self.d.is_empty(), "d")
			}
			Experiment::Leak => {
				need(self.n.len() == 1, "single-element n")?;
				need(!self.t.is_empty(), "t")
			}
			Experiment::Coupling => {
				need(!self.n.is_empty(), "n")?;
				if self.n.iter().any(|n| *n < 0.0 || n.fract() != 0.0 || *n > u64::MAX as f64) {
					return Err(Error::InvalidArgument("coupling needs nonnegative integer n".into()));
				}
				Ok(())
			}
		}
	}

	/// Independent runs making up this experiment, in a fixed order.
	pub fn jobs(&self) -> Result<Vec<Job>> {
		self.validate()?;
		let mut jobs = Vec::new();
		match self.experiment {
			Experiment::Sandwich => {
				for w in &self.weights {
					for &d in &self.d {
						for &n in &self.n {
							jobs.push(Job::Sandwich { n, rule: ToppleRule::from_weights(*w, d)? });
						}
					}
				}
			}
			Experiment::Operators => {
				for w in &self.weights {
					for &d in &self.d {
						jobs.push(Job::Operators { rule: ToppleRule::from_weights(*w, d)?, radius: self.radius });
					}
				}
			}
			Experiment::Shape => {
				for &d in &self.d {
					jobs.push(Job::Shape { n: self.n.clone(), d });
				}
			}
			Experiment::Leak => jobs.push(Job::Leak { n: self.n[0], t: self.t.clone() }),
			Experiment::Coupling => jobs.push(Job::Coupling { n: self.n.iter().map(|&n| n as u64).collect() }),
		}
		Ok(jobs)
	}
}

/// One deterministic, single-threaded unit of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
	Sandwich { n: f64, rule: ToppleRule<f64> },
	Operators { rule: ToppleRule<f64>, radius: usize },
	Shape { n: Vec<f64>, d: f64 },
	Leak { n: f64, t: Vec<f64> },
	Coupling { n: Vec<u64> },
}

impl Job {
	pub fn run(&self, tol: &Tolerances, seed: u64) -> Result<VerificationReport> {
		match self {
			Job::Sandwich { n, rule } => check_sandwich(*n, rule, tol),
			Job::Operators { rule, radius } => check_operator_identities(rule, *radius, seed, tol),
			Job::Shape { n, d } => check_shape_convergence(n, *d, tol),
			Job::Leak { n, t } => check_leak_to_zero(*n, t, tol),
			Job::Coupling { n } => check_coupling(n),
		}
	}
}

/// Runs every job of the experiment in order.
pub fn run(config: &ExperimentConfig) -> Result<Vec<VerificationReport>> {
	config.jobs()?.iter().map(|j| j.run(&config.tolerances, config.seed)).collect()
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
	let n = x.len() as f64;
	if x.len() < 2 {
		return 0.0;
	}
	let mx = x.iter().sum::<f64>() / n;
	let my = y.iter().sum::<f64>() / n;
	let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
	let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
	if sxx == 0.0 {
		0.0
	} else {
		sxy / sxx
	}
}
