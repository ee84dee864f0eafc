use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Directional chip weights and leakiness `d`.
///
/// A site holding at least `c·d` chips topples: it sends `c_dir` to the
/// neighbour in each direction and the remaining `c·(d−1)` leaks away.
#[derive(Debug, Clone, PartialEq)]
pub struct ToppleRule<S = f64> {
	pub c_up: S,
	pub c_right: S,
	pub c_down: S,
	pub c_left: S,
	pub d: S,
}

impl<S: Scalar> ToppleRule<S> {
	pub fn new(c_up: S, c_right: S, c_down: S, c_left: S, d: S) -> Result<Self> {
		let r = ToppleRule { c_up, c_right, c_down, c_left, d };
		r.validate()?;
		Ok(r)
	}

	/// All four weights equal to one.
	pub fn uniform(d: S) -> Result<Self> {
		Self::new(S::one_val(), S::one_val(), S::one_val(), S::one_val(), d)
	}

	/// Weights in (up, right, down, left) order.
	pub fn from_weights(w: [S; 4], d: S) -> Result<Self> {
		let [u, r, dn, l] = w;
		Self::new(u, r, dn, l, d)
	}

	pub fn validate(&self) -> Result<()> {
		for w in self.weights() {
			if !w.is_finite() || w.is_negative() {
				return Err(Error::InvalidArgument(format!("weight {} must be finite and nonnegative", w.to_text())));
			}
		}
		if self.c() <= S::zero_val() {
			return Err(Error::InvalidArgument("weights sum to zero".into()));
		}
		if !self.d.is_finite() || self.d < S::one_val() {
			return Err(Error::InvalidArgument(format!("d = {} must be at least 1", self.d.to_text())));
		}
		Ok(())
	}

	pub fn weights(&self) -> [S; 4] {
		[self.c_up.clone(), self.c_right.clone(), self.c_down.clone(), self.c_left.clone()]
	}

	pub fn c(&self) -> S {
		self.c_up.add(&self.c_right).add(&self.c_down).add(&self.c_left)
	}

	pub fn threshold(&self) -> S {
		self.c().mul(&self.d)
	}

	/// Mass dissipated by one fire, `c·(d−1)`.
	pub fn leak_per_fire(&self) -> S {
		self.c().mul(&self.d.sub(&S::one_val()))
	}

	pub fn is_uniform(&self) -> bool {
		self.c_up == self.c_right && self.c_right == self.c_down && self.c_down == self.c_left
	}

	pub fn to_f64(&self) -> ToppleRule<f64> {
		ToppleRule {
			c_up: self.c_up.to_f64(),
			c_right: self.c_right.to_f64(),
			c_down: self.c_down.to_f64(),
			c_left: self.c_left.to_f64(),
			d: self.d.to_f64(),
		}
	}
}
