use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rule::ToppleRule;
use crate::scalar::{Rational, Scalar};

use super::{point_source, run_firing, stabilize_with, Firing, StabilizationResult, StabilizeOptions};

/// Classical-ASM variant: fire at 5 chips, send one chip to each neighbour.
pub fn stabilize_modified_asm(n: u64, radius: usize) -> Result<StabilizationResult<Rational>> {
	let field = point_source(Rational::from_integer(n.into()), radius)?;
	run_firing(field, &Firing::modified_asm(), &StabilizeOptions::default())
}

fn single_fire_options() -> StabilizeOptions {
	StabilizeOptions { batch: false, record_sequence: true, accelerate: false, ..StabilizeOptions::default() }
}

#[derive(Debug, Clone)]
pub struct CouplingReport {
	pub n: u64,
	/// Largest topple count in the modified ASM.
	pub m_n: u64,
	/// `1/(8 m_n)`; absent when nothing fires.
	pub t: Option<Rational>,
	pub fires: usize,
	/// Final modified-ASM field `B` and leaky field `L` on a common grid.
	pub b: Grid<Rational>,
	pub l: Grid<Rational>,
	/// `B = ⌈L⌉` at every site.
	pub ceil_matches: bool,
	/// The independently stabilized leaky run visits the same sites.
	pub visited_equal: bool,
	/// ... and fires each site the same number of times.
	pub topples_equal: bool,
	/// Largest `B − L` seen during the replay; must stay below 1.
	pub max_gap: Rational,
}

impl CouplingReport {
	pub fn pass(&self) -> bool {
		self.ceil_matches && self.visited_equal && self.topples_equal && self.max_gap < Rational::one()
	}
}

fn violation(msg: String) -> Error {
	Error::CouplingViolation(msg)
}

/// Replays the modified-ASM firing sequence in the leaky model with
/// `d = 1 + 1/(8 m_n)`, checking that every fire is legal in both models
/// and that `B − 1 < L ≤ B` holds throughout.
pub fn coupled_run(n: u64) -> Result<CouplingReport> {
	let radius = ((n as f64).sqrt() as usize) / 2 + 4;
	let field = point_source(Rational::from_integer(n.into()), radius)?;
	let modified = run_firing(field, &Firing::modified_asm(), &single_fire_options())?;
	let seq = modified.sequence.clone().unwrap_or_default();
	let m_n: u64 = modified.max_topples.to_integer().try_into().map_err(|_| violation("m_n overflow".into()))?;
	let radius = modified.radius();
	let zero = Rational::zero();
	let one = Rational::one();

	if m_n == 0 {
		let l = modified.final_field.clone();
		return Ok(CouplingReport {
			n,
			m_n,
			t: None,
			fires: 0,
			b: modified.final_field,
			l,
			ceil_matches: true,
			visited_equal: true,
			topples_equal: true,
			max_gap: zero,
		});
	}

	let t = Rational::new(1.into(), (8 * m_n).into());
	let d = &one + &t;
	let rule = ToppleRule::uniform(d.clone())?;
	let thr = rule.threshold();
	let five = Rational::from_i64(5);
	let four = Rational::from_i64(4);

	let mut b = Grid::new(radius, zero.clone());
	let mut l = Grid::new(radius, zero.clone());
	let mut fired = Grid::new(radius, 0u64);
	b.set(0, 0, Rational::from_integer(n.into()));
	l.set(0, 0, Rational::from_integer(n.into()));
	let mut max_gap = zero.clone();

	for (step, &(x, y)) in seq.iter().enumerate() {
		let i = b.index(x, y).ok_or_else(|| violation(format!("fire outside grid at ({x}, {y})")))?;
		if b.values()[i] < five {
			return Err(violation(format!("step {step}: modified ASM fire at ({x}, {y}) not legal")));
		}
		if l.values()[i] < thr {
			return Err(violation(format!("step {step}: leaky fire at ({x}, {y}) not legal")));
		}
		b.values_mut()[i] -= &four;
		l.values_mut()[i] -= &thr;
		fired.values_mut()[i] += 1;
		for (dx, dy) in [(0, 0), (0, 1), (1, 0), (0, -1), (-1, 0)] {
			let (px, py) = (x + dx, y + dy);
			if (dx, dy) != (0, 0) {
				*b.get_mut(px, py).unwrap() += &one;
				*l.get_mut(px, py).unwrap() += &one;
			}
			let bv = b.get(px, py).unwrap();
			let lv = l.get(px, py).unwrap();
			let gap = bv - lv;
			let ever = *fired.get(px, py).unwrap() > 0;
			if !(gap < one) || lv > bv || (ever && !(lv < bv)) {
				return Err(violation(format!("step {step}: B − 1 < L ≤ B fails at ({px}, {py})")));
			}
			if gap > max_gap {
				max_gap = gap;
			}
		}
	}

	if b != modified.final_field {
		return Err(violation("replayed B differs from the modified ASM run".into()));
	}
	if let Some(((x, y), _)) = l.iter().find(|(_, v)| **v >= thr) {
		return Err(violation(format!("leaky configuration unstable at ({x}, {y}) after replay")));
	}
	let ceil_matches = b.values().iter().zip(l.values()).all(|(bv, lv)| lv.ceil() == *bv);

	let leaky = stabilize_with(point_source(Rational::from_integer(n.into()), radius)?, &rule, &StabilizeOptions::default())?;
	let same_grid = leaky.radius() == radius;
	let visited_equal = same_grid && leaky.visited == modified.visited;
	let topples_equal = same_grid && leaky.odometer.topples == modified.odometer.topples;
	if same_grid && leaky.final_field != l {
		return Err(violation("independent leaky run ends in a different configuration".into()));
	}

	Ok(CouplingReport {
		n,
		m_n,
		t: Some(t),
		fires: seq.len(),
		b,
		l,
		ceil_matches,
		visited_equal,
		topples_equal,
		max_gap,
	})
}
