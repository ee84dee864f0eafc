use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rule::ToppleRule;
use crate::scalar::Rational;

use super::{log_add_exp, DeathProbField, FieldMethod, StepDistribution};

/// Step horizon `K = ⌈log(tail_eps) / log(1/d)⌉`.
pub fn steps_for_tail(d: f64, tail_eps: f64) -> Result<usize> {
	if !(tail_eps > 0.0) {
		return Err(Error::InvalidArgument(format!("tail_eps must be positive, got {tail_eps}")));
	}
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	if tail_eps >= 1.0 {
		return Ok(0);
	}
	let k = tail_eps.ln() / (1.0 / d).ln();
	// exact powers of 1/d should not gain a step through rounding
	let k = if (k - k.round()).abs() <= 1e-9 * k { k.round() } else { k.ceil() };
	Ok(k as usize)
}

/// Death probabilities by dynamic programming over the step count.
///
/// The occupation of the live walker after `k` steps is propagated in log
/// domain; the walker dies at its current site with probability `1 − 1/d`.
/// Steps `0..=K` are accumulated, so the missing mass is at most `(1/d)^K`.
pub fn death_prob_dp(rule: &ToppleRule<f64>, radius: usize, tail_eps: f64) -> Result<DeathProbField> {
	rule.validate()?;
	let d = rule.d;
	let k_steps = steps_for_tail(d, tail_eps)?;
	if radius < k_steps {
		return Err(Error::RadiusTooSmall { radius, steps: k_steps });
	}
	let st = StepDistribution::from_rule(rule);
	let lp = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
	let (l_up, l_right, l_down, l_left, l_kill) =
		(lp(st.p_up), lp(st.p_right), lp(st.p_down), lp(st.p_left), lp(st.p_kill));

	let mut q = Grid::new(radius, f64::NEG_INFINITY);
	let mut next = q.clone();
	let mut acc = q.clone();
	q.set(0, 0, 0.0);
	let w = q.width();
	let r = radius as i64;

	for k in 0..=k_steps {
		let m = (k as i64).min(r);
		for y in -m..=m {
			let xr = m - y.abs();
			let base = q.index(-xr, y).unwrap();
			for i in base..=base + 2 * xr as usize {
				let v = q.data[i];
				if v > f64::NEG_INFINITY {
					acc.data[i] = log_add_exp(acc.data[i], l_kill + v);
				}
			}
		}
		if k == k_steps {
			break;
		}
		let m = (k as i64 + 1).min(r);
		for y in -m..=m {
			let xr = m - y.abs();
			for x in -xr..=xr {
				let i = q.index(x, y).unwrap();
				// arrivals from the four neighbours
				let mut t = [f64::NEG_INFINITY; 4];
				if x > -r {
					t[0] = l_right + q.data[i - 1];
				}
				if x < r {
					t[1] = l_left + q.data[i + 1];
				}
				if y > -r {
					t[2] = l_up + q.data[i - w];
				}
				if y < r {
					t[3] = l_down + q.data[i + w];
				}
				next.data[i] = lse4(t);
			}
		}
		std::mem::swap(&mut q, &mut next);
	}

	Ok(DeathProbField {
		log_p: acc,
		steps_used: k_steps,
		tail_bound: (1.0 / d).powi(k_steps as i32),
		d,
		weights: [rule.c_up, rule.c_right, rule.c_down, rule.c_left],
		method: FieldMethod::Dp,
	})
}

/// Death probabilities truncated after exactly `steps` steps, in exact
/// rational arithmetic on the square of radius `steps`.
///
/// With all step probabilities written as `a/L` the occupation after `k`
/// steps is an integer field over `L^k`, so the recursion runs on big
/// integers and only the final division is rational.
pub fn death_prob_dp_exact(rule: &ToppleRule<Rational>, steps: usize) -> Result<Grid<Rational>> {
	rule.validate()?;
	let st = StepDistribution::from_rule(rule);
	let probs = [&st.p_up, &st.p_right, &st.p_down, &st.p_left, &st.p_kill];
	let l = probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
	let num = |p: &Rational| p.numer() * (&l / p.denom());
	let (a_up, a_right, a_down, a_left) = (num(&st.p_up), num(&st.p_right), num(&st.p_down), num(&st.p_left));

	let radius = steps;
	let r = radius as i64;
	let mut m = Grid::new(radius, BigInt::zero());
	let mut next = m.clone();
	let mut acc = m.clone();
	m.set(0, 0, BigInt::one());
	let w = m.width();
	for k in 0..=steps {
		// Horner: acc ← acc·L + M_k
		let reach = k as i64;
		for y in -reach..=reach {
			let xr = reach - y.abs();
			let base = m.index(-xr, y).unwrap();
			for i in base..=base + 2 * xr as usize {
				acc.data[i] = &acc.data[i] * &l + &m.data[i];
			}
		}
		if k == steps {
			break;
		}
		let reach = (k as i64 + 1).min(r);
		for y in -reach..=reach {
			let xr = reach - y.abs();
			for x in -xr..=xr {
				let i = m.index(x, y).unwrap();
				let mut v = BigInt::zero();
				if x > -r {
					v += &a_right * &m.data[i - 1];
				}
				if x < r {
					v += &a_left * &m.data[i + 1];
				}
				if y > -r {
					v += &a_up * &m.data[i - w];
				}
				if y < r {
					v += &a_down * &m.data[i + w];
				}
				next.data[i] = v;
			}
		}
		std::mem::swap(&mut m, &mut next);
	}
	let denom: BigInt = Pow::pow(&l, steps as u32);
	Ok(acc.map(|a| &st.p_kill * Rational::new(a.clone(), denom.clone())))
}

#[inline]
fn lse4(t: [f64; 4]) -> f64 {
	let m = t[0].max(t[1]).max(t[2]).max(t[3]);
	if m == f64::NEG_INFINITY {
		return m;
	}
	m + ((t[0] - m).exp() + (t[1] - m).exp() + (t[2] - m).exp() + (t[3] - m).exp()).ln()
}

#[cfg(test)]
mod tests {
	use super::*;

	/// Plain linear-domain propagation, no logs.
	fn linear_dp(rule: &ToppleRule<f64>, radius: usize, steps: usize) -> Grid<f64> {
		let st = StepDistribution::from_rule(rule);
		let mut q = Grid::new(radius, 0.0);
		q.set(0, 0, 1.0);
		let mut acc = Grid::new(radius, 0.0);
		let r = radius as i64;
		for k in 0..=steps {
			for (i, v) in q.values().iter().enumerate() {
				acc.values_mut()[i] += st.p_kill * v;
			}
			if k == steps {
				break;
			}
			let mut n = Grid::new(radius, 0.0);
			for y in -r..=r {
				for x in -r..=r {
					let v = *q.get(x, y).unwrap();
					if v == 0.0 {
						continue;
					}
					for (dx, dy, p) in [(0, 1, st.p_up), (1, 0, st.p_right), (0, -1, st.p_down), (-1, 0, st.p_left)] {
						if let Some(c) = n.get_mut(x + dx, y + dy) {
							*c += p * v;
						}
					}
				}
			}
			q = n;
		}
		acc
	}

	#[test]
	fn matches_linear_propagation() {
		let rule = ToppleRule::from_weights([2.0, 1.0, 0.5, 1.0], 1.7).unwrap();
		let f = death_prob_dp(&rule, 30, 1e-6).unwrap();
		let lin = linear_dp(&rule, 30, f.steps_used);
		for ((x, y), v) in lin.iter() {
			if *v > 1e-280 {
				let got = f.prob(x, y);
				assert!((got - v).abs() <= 1e-12 * v, "({x},{y}) {got} vs {v}");
			}
		}
	}

	#[test]
	fn normalization_and_origin() {
		let rule = ToppleRule::uniform(2.0).unwrap();
		let f = death_prob_dp(&rule, 120, 1e-30).unwrap();
		assert_eq!(f.steps_used, 100);
		let m = f.total_mass();
		assert!(m <= 1.0 + 1e-12 && m >= 1.0 - f.tail_bound - 1e-12, "{m}");
		assert!(f.prob(0, 0) >= 0.5);
		let (a, b, c, e) = (f.prob(1, 0), f.prob(0, 1), f.prob(-1, 0), f.prob(0, -1));
		assert!((a - b).abs() < 1e-15 * a && (a - c).abs() < 1e-15 * a && (a - e).abs() < 1e-15 * a);
	}

	#[test]
	fn longer_horizon_agrees_within_tail() {
		let rule = ToppleRule::uniform(2.0).unwrap();
		let a = death_prob_dp(&rule, 200, 0.5f64.powi(200)).unwrap();
		assert_eq!(a.steps_used, 200);
		let b = death_prob_dp(&rule, 250, 0.5f64.powi(250)).unwrap();
		let diff = (a.prob(0, 0) - b.prob(0, 0)).abs();
		assert!(diff <= 0.5f64.powi(200));
	}

	#[test]
	fn exact_recursion_agrees_and_truncates_cleanly() {
		use crate::engine::apply_t;
		use crate::scalar::Scalar;
		for (w, d) in [([1i64, 1, 1, 1], (3i64, 2i64)), ([2, 1, 1, 1], (2, 1))] {
			let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
			let rule = ToppleRule::from_weights(w.map(|c| q(c, 1)), q(d.0, d.1)).unwrap();
			let k = 40;
			let exact = death_prob_dp_exact(&rule, k).unwrap();
			let df = d.0 as f64 / d.1 as f64;
			let float = death_prob_dp(&rule.to_f64(), k, (1.0 / df).powi(k as i32)).unwrap();
			assert_eq!(float.steps_used, k);
			for ((x, y), p) in exact.iter() {
				let pf = Scalar::to_f64(p);
				if pf > 0.0 {
					assert!((float.prob(x, y) / pf - 1.0).abs() < 1e-12, "({x},{y})");
				}
			}
			let tp = apply_t(&exact, &rule).unwrap();
			let tail = Rational::new(1.into(), 1.into()) / Pow::pow(&rule.d, k as u32);
			let four_tail = &tail * q(4, 1);
			for ((x, y), v) in tp.iter() {
				if (x, y) != (0, 0) {
					assert!(num_traits::Signed::abs(v) <= four_tail);
				}
			}
			let eig = -(&rule.d - q(1, 1)) / &rule.d;
			assert!(num_traits::Signed::abs(&(tp.get(0, 0).unwrap() - eig)) <= tail);
		}
	}

	#[test]
	fn rejects_small_radius_and_bad_eps() {
		let rule = ToppleRule::uniform(2.0).unwrap();
		assert!(matches!(death_prob_dp(&rule, 10, 1e-30), Err(Error::RadiusTooSmall { radius: 10, steps: 100 })));
		assert!(death_prob_dp(&rule, 10, 0.0).is_err());
		assert!(death_prob_dp(&rule, 10, -1.0).is_err());
	}

	#[test]
	fn two_directional_walk_only_reaches_quadrant() {
		let rule = ToppleRule::from_weights([1.0, 1.0, 0.0, 0.0], 2.0).unwrap();
		let f = death_prob_dp(&rule, 20, 1e-6).unwrap();
		assert_eq!(f.log_prob(-1, 0), f64::NEG_INFINITY);
		assert_eq!(f.log_prob(0, -1), f64::NEG_INFINITY);
		assert!(f.prob(3, 2) > 0.0);
	}
}
