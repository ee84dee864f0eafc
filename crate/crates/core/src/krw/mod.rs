//! Killed random walk death probabilities.
//!
//! Three independent routes to `P_d(x)`: a step-by-step dynamic program
//! ([`death_prob_dp`]), closed forms for special geometries ([`closed`]) and
//! trapezoid quadrature of the one-dimensional contour integral
//! ([`contour`]).

pub mod closed;
pub mod contour;
pub mod dp;

use serde::Serialize;

use crate::grid::Grid;
use crate::rule::ToppleRule;
use crate::scalar::Scalar;

pub use closed::{coeff_z, death_prob_ne, line_death_prob, line_log_prob, ne_log_prob, z_roots};
pub use contour::{
	contour_field, death_prob_contour, death_prob_contour_auto, death_prob_contour_detail, ContourRadius, ContourValue,
};
pub use dp::{death_prob_dp, death_prob_dp_exact, steps_for_tail};

/// One-step transition probabilities of the killed walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution<S = f64> {
	pub p_up: S,
	pub p_right: S,
	pub p_down: S,
	pub p_left: S,
	pub p_kill: S,
}

impl<S: Scalar> StepDistribution<S> {
	pub fn from_rule(rule: &ToppleRule<S>) -> Self {
		let thr = rule.threshold();
		StepDistribution {
			p_up: rule.c_up.div(&thr),
			p_right: rule.c_right.div(&thr),
			p_down: rule.c_down.div(&thr),
			p_left: rule.c_left.div(&thr),
			p_kill: S::one_val().sub(&S::one_val().div(&rule.d)),
		}
	}

	pub fn total(&self) -> S {
		self.p_up.add(&self.p_right).add(&self.p_down).add(&self.p_left).add(&self.p_kill)
	}
}

/// The Laurent polynomial `P(z, w) = (cd − (c↑z + c↓/z + c→w + c←/w)) / (c(d−1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPolynomial {
	pub rule: ToppleRule<f64>,
}

impl SpectralPolynomial {
	pub fn new(rule: ToppleRule<f64>) -> crate::Result<Self> {
		if rule.d <= 1.0 {
			return Err(crate::Error::InvalidArgument("spectral polynomial needs d > 1".into()));
		}
		Ok(SpectralPolynomial { rule })
	}

	pub fn eval(&self, z: num_complex::Complex64, w: num_complex::Complex64) -> num_complex::Complex64 {
		let r = &self.rule;
		let cd = r.threshold();
		(cd - (r.c_up * z + r.c_down / z + r.c_right * w + r.c_left / w)) / r.leak_per_fire()
	}
}

/// How a [`DeathProbField`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMethod {
	/// Step-by-step dynamic program; `tail_bound` is a rigorous certificate.
	Dp,
	/// Column-wise contour quadrature; no truncation, error is floating point only.
	Contour,
}

/// Natural-log death probabilities on a grid.
#[derive(Debug, Clone)]
pub struct DeathProbField {
	pub log_p: Grid<f64>,
	/// Step horizon `K` of the dynamic program (0 for contour fields).
	pub steps_used: usize,
	/// Upper bound `(1/d)^K` on the probability mass not accounted for.
	pub tail_bound: f64,
	pub d: f64,
	/// Weights in (up, right, down, left) order.
	pub weights: [f64; 4],
	pub method: FieldMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldMetadata {
	pub d: f64,
	pub weights: [f64; 4],
	#[serde(rename = "K")]
	pub k: usize,
	pub tail_bound: f64,
	pub radius: usize,
	pub method: FieldMethod,
}

impl DeathProbField {
	pub fn log_prob(&self, x: i64, y: i64) -> f64 {
		self.log_p.get(x, y).copied().unwrap_or(f64::NEG_INFINITY)
	}

	pub fn prob(&self, x: i64, y: i64) -> f64 {
		self.log_prob(x, y).exp()
	}

	/// Σ exp(log p), summed smallest first.
	pub fn total_mass(&self) -> f64 {
		let mut v: Vec<f64> = self.log_p.values().iter().map(|l| l.exp()).collect();
		v.sort_by(|a, b| a.partial_cmp(b).unwrap());
		v.iter().sum()
	}

	/// Probability of dying on the vertical line `x = j`.
	pub fn column_sum(&self, j: i64) -> f64 {
		let r = self.log_p.radius() as i64;
		let mut v: Vec<f64> = (-r..=r).map(|y| self.prob(j, y)).collect();
		v.sort_by(|a, b| a.partial_cmp(b).unwrap());
		v.iter().sum()
	}

	pub fn metadata(&self) -> FieldMetadata {
		FieldMetadata {
			d: self.d,
			weights: self.weights,
			k: self.steps_used,
			tail_bound: self.tail_bound,
			radius: self.log_p.radius(),
			method: self.method,
		}
	}
}

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
	let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
	if lo == f64::NEG_INFINITY {
		return hi;
	}
	hi + (lo - hi).exp().ln_1p()
}

/// `log Σ exp(t)` over a slice.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
	let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
	if m == f64::NEG_INFINITY {
		return m;
	}
	m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
	use super::*;
	use crate::scalar::Rational;

	#[test]
	fn step_distribution_sums_to_one() {
		let r = ToppleRule::from_weights([2.0, 1.0, 1.0, 1.0], 2.0).unwrap();
		let s = StepDistribution::from_rule(&r);
		assert!((s.total() - 1.0).abs() < 1e-15);
		assert_eq!(s.p_up, 0.2);
		let q = ToppleRule::<Rational>::uniform(Rational::new(7.into(), 3.into())).unwrap();
		assert_eq!(StepDistribution::from_rule(&q).total(), Rational::from_i64(1));
	}

	#[test]
	fn log_sums() {
		assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
		assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
		assert!((log_sum_exp(&[-1000.0, -1000.0]) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
		assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
	}

	#[test]
	fn spectral_polynomial_vanishes_on_roots() {
		let p = SpectralPolynomial::new(ToppleRule::uniform(2.0).unwrap()).unwrap();
		let w = num_complex::Complex64::new(0.3, 0.8);
		let (zm, zp) = z_roots(w, 2.0).unwrap();
		assert!(p.eval(zp, w).norm() < 1e-12);
		assert!(p.eval(zm, w).norm() < 1e-12);
		assert!((p.eval(1.0.into(), 1.0.into()).re - 1.0).abs() < 1e-15);
	}
}
