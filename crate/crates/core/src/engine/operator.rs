use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rule::ToppleRule;
use crate::scalar::Scalar;

/// `(Tu)(x) = Σ_{y∼x} (c_{y→x}/(c·d))·u(y) − u(x)`, with `u = 0` off the grid.
///
/// The neighbour below `x` reaches it with its up weight, the neighbour to
/// the left with its right weight, and so on.
pub fn apply_t<S: Scalar>(u: &Grid<S>, rule: &ToppleRule<S>) -> Result<Grid<S>> {
	rule.validate()?;
	for ((x, y), v) in u.iter() {
		if !v.is_finite() {
			return Err(Error::NonFinite { x, y });
		}
	}
	let thr = rule.threshold();
	let p = rule.weights().map(|c| c.div(&thr));
	let [p_up, p_right, p_down, p_left] = &p;
	let r = u.radius() as i64;
	let w = u.width();
	let mut out = Grid::new(u.radius(), S::zero_val());
	for (i, v) in u.values().iter().enumerate() {
		let (x, y) = u.coords(i);
		let mut acc = S::zero_val().sub(v);
		if y > -r {
			acc.add_assign(&u.data[i - w].mul(p_up));
		}
		if x > -r {
			acc.add_assign(&u.data[i - 1].mul(p_right));
		}
		if y < r {
			acc.add_assign(&u.data[i + w].mul(p_down));
		}
		if x < r {
			acc.add_assign(&u.data[i + 1].mul(p_left));
		}
		out.data[i] = acc;
	}
	Ok(out)
}
