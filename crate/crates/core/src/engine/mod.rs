//! Configurations and their stabilization.

mod accel;
mod coupling;
mod operator;
mod profile;
mod relax;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, HeightField};
use crate::rule::ToppleRule;
use crate::scalar::Scalar;

pub use coupling::{coupled_run, stabilize_modified_asm, CouplingReport};
pub use operator::apply_t;
pub use profile::{radial_profile, sector_radii, sectors_for_arc, Direction, RadialProfile};

/// Order in which active sites are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FireOrder {
	/// First in, first out.
	Fifo,
	/// Uniformly random active site, seeded.
	Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPolicy {
	/// Grow by 25% whenever activity reaches the edge.
	Auto,
	/// Fail when activity reaches the edge.
	Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizeOptions {
	pub order: FireOrder,
	pub grid: GridPolicy,
	/// Fire `k` times at once instead of once per visit.
	pub batch: bool,
	/// Float mode only: seed the odometer of large point sources from the
	/// death probability field before relaxing.
	pub accelerate: bool,
	/// Record every single fire in order (requires `batch = false`).
	pub record_sequence: bool,
}

impl Default for StabilizeOptions {
	fn default() -> Self {
		StabilizeOptions {
			order: FireOrder::Fifo,
			grid: GridPolicy::Auto,
			batch: true,
			accelerate: true,
			record_sequence: false,
		}
	}
}

/// How one fire changes the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Firing<S> {
	/// A site fires when its height reaches this value.
	pub threshold: S,
	/// Chips removed from the firing site.
	pub loss: S,
	/// Chips sent (up, right, down, left).
	pub sends: [S; 4],
}

impl<S: Scalar> Firing<S> {
	pub fn leaky(rule: &ToppleRule<S>) -> Self {
		let thr = rule.threshold();
		Firing { threshold: thr.clone(), loss: thr, sends: rule.weights() }
	}

	/// Fires at 5 chips, sends one chip to each neighbour.
	pub fn modified_asm() -> Self {
		Firing { threshold: S::from_i64(5), loss: S::from_i64(4), sends: [S::one_val(), S::one_val(), S::one_val(), S::one_val()] }
	}

	/// Mass destroyed by one fire.
	pub fn dissipation(&self) -> S {
		let sent = self.sends.iter().fold(S::zero_val(), |acc, s| acc.add(s));
		self.loss.sub(&sent)
	}
}

/// Topple counts; the odometer value is `topples · emitted-per-fire`.
#[derive(Debug, Clone, PartialEq)]
pub struct Odometer<S> {
	pub topples: Grid<S>,
	/// Mass emitted by one fire (the threshold for the leaky rule).
	pub per_fire: S,
}

impl<S: Scalar> Odometer<S> {
	/// `u(x)`, total mass emitted from each site.
	pub fn u(&self) -> Grid<S> {
		self.topples.map(|t| t.mul(&self.per_fire))
	}

	pub fn u_at(&self, x: i64, y: i64) -> S {
		self.topples.get(x, y).map(|t| t.mul(&self.per_fire)).unwrap_or_else(S::zero_val)
	}
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationResult<S> {
	pub final_field: HeightField<S>,
	pub odometer: Odometer<S>,
	/// Sites that fired at least once.
	pub visited: Grid<bool>,
	pub visited_count: usize,
	/// Largest topple count at a single site.
	pub max_topples: S,
	pub total_topples: S,
	pub leaked_mass: S,
	pub initial_mass: S,
	/// Activity reached the edge of the starting grid at least once.
	pub boundary_touched: bool,
	/// Single fires in order, when requested.
	pub sequence: Option<Vec<(i64, i64)>>,
}

impl<S: Scalar> StabilizationResult<S> {
	pub fn final_mass(&self) -> S {
		sum(self.final_field.values())
	}

	/// `initial − final − leaked`; zero in exact mode.
	pub fn mass_defect(&self) -> S {
		self.initial_mass.sub(&self.final_mass()).sub(&self.leaked_mass)
	}

	pub fn radius(&self) -> usize {
		self.final_field.radius()
	}

	pub fn is_visited(&self, x: i64, y: i64) -> bool {
		self.visited.get(x, y).copied().unwrap_or(false)
	}
}

/// JSON summary of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
	pub n: String,
	pub d: String,
	pub weights: [String; 4],
	pub m_n: String,
	pub leaked: String,
	pub visited_count: usize,
	pub radius: usize,
}

impl RunSummary {
	pub fn new<S: Scalar>(n: &S, rule: &ToppleRule<S>, res: &StabilizationResult<S>) -> Self {
		RunSummary {
			n: n.to_text(),
			d: rule.d.to_text(),
			weights: rule.weights().map(|w| w.to_text()),
			m_n: res.max_topples.to_text(),
			leaked: res.leaked_mass.to_text(),
			visited_count: res.visited_count,
			radius: res.radius(),
		}
	}
}

pub(crate) fn sum<S: Scalar>(v: &[S]) -> S {
	v.iter().fold(S::zero_val(), |acc, x| acc.add(x))
}

/// `n` chips at the origin of a grid of the given radius.
pub fn point_source<S: Scalar>(n: S, radius: usize) -> Result<HeightField<S>> {
	if !n.is_finite() {
		return Err(Error::FloatOverflow(n.to_text()));
	}
	if n.is_negative() {
		return Err(Error::InvalidArgument(format!("chip count {} is negative", n.to_text())));
	}
	let mut g = Grid::new(radius, S::zero_val());
	g.set(0, 0, n);
	Ok(g)
}

/// Starting radius `⌈log n / |S(w₊)|⌉ + 16` for a point source of `n` chips,
/// with `S` taken on the axis direction of the uniform model.
pub fn start_radius(n: f64, d: f64) -> usize {
	if !(d > 1.0) || !(n > 1.0) {
		return 16;
	}
	let s = crate::shape::saddle(0.0, d).map(|s| -s.s_cr).unwrap_or(1.0);
	(n.ln() / s).ceil().max(0.0) as usize + 16
}

/// Stabilize with default options (FIFO, batched, auto-growing grid).
pub fn stabilize<S: Scalar>(field: HeightField<S>, rule: &ToppleRule<S>) -> Result<StabilizationResult<S>> {
	stabilize_with(field, rule, &StabilizeOptions::default())
}

pub fn stabilize_with<S: Scalar>(
	field: HeightField<S>,
	rule: &ToppleRule<S>,
	opts: &StabilizeOptions,
) -> Result<StabilizationResult<S>> {
	rule.validate()?;
	if rule.d == S::one_val() {
		return Err(Error::InvalidArgument("d = 1 is only available through the modified ASM".into()));
	}
	let firing = Firing::leaky(rule);
	let fast = opts.accelerate && !S::EXACT && rule.is_uniform() && accel::worth_it(&field, &firing);
	if fast {
		let mut f = field.clone();
		let res = accel::run(&mut f, rule, &firing, opts)?;
		if let Some(r) = res {
			return Ok(r);
		}
	}
	run_firing(field, &firing, opts)
}

/// Stabilize under an arbitrary firing rule.
pub(crate) fn run_firing<S: Scalar>(
	field: HeightField<S>,
	firing: &Firing<S>,
	opts: &StabilizeOptions,
) -> Result<StabilizationResult<S>> {
	check_field(&field)?;
	let initial_mass = sum(field.values());
	let mut h = field;
	let mut topples = Grid::new(h.radius(), S::zero_val());
	let mut seq = if opts.record_sequence { Some(Vec::new()) } else { None };
	let touched = relax::relax(&mut h, &mut topples, firing, opts, &mut seq)?;
	Ok(finish(h, topples, firing, initial_mass, touched, seq))
}

pub(crate) fn check_field<S: Scalar>(field: &HeightField<S>) -> Result<()> {
	for ((x, y), v) in field.iter() {
		if !v.is_finite() {
			return Err(Error::NonFinite { x, y });
		}
		if v.is_negative() {
			return Err(Error::NegativeHeight { x, y, value: v.to_text() });
		}
	}
	Ok(())
}

pub(crate) fn finish<S: Scalar>(
	h: Grid<S>,
	topples: Grid<S>,
	firing: &Firing<S>,
	initial_mass: S,
	touched: bool,
	sequence: Option<Vec<(i64, i64)>>,
) -> StabilizationResult<S> {
	let zero = S::zero_val();
	let visited = topples.map(|t| *t > zero);
	let visited_count = visited.values().iter().filter(|&&v| v).count();
	let mut max_topples = S::zero_val();
	for t in topples.values() {
		if *t > max_topples {
			max_topples = t.clone();
		}
	}
	let total_topples = sum(topples.values());
	let leaked_mass = total_topples.mul(&firing.dissipation());
	StabilizationResult {
		final_field: h,
		odometer: Odometer { topples, per_fire: firing.loss.clone() },
		visited,
		visited_count,
		max_topples,
		total_topples,
		leaked_mass,
		initial_mass,
		boundary_touched: touched,
		sequence,
	}
}
