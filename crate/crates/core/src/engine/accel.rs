//! Odometer seeding for large point sources in float mode.
//!
//! For a point source of `m` chips the odometer counts fires
//! `u/thr ≥ m·P_d(x)/(c(d−1)) − d/(d−1)`. Firing every site
//! `v(x) = ⌊(1−ε)·m·P_d(x)/(c(d−1)) − B⌋` times up front is therefore a
//! legal prefix of some firing sequence as long as `P_d` is accurate to well
//! below `ε`, and the abelian property makes the final state independent of
//! that choice. What remains is, up to small positive debris, a point source
//! of about `ε·m` chips, so the step is repeated until the origin is small
//! and ordinary relaxation finishes the job.

use crate::error::Result;
use crate::grid::{Grid, HeightField};
use crate::krw::contour_field;
use crate::rule::ToppleRule;
use crate::scalar::Scalar;

use super::{finish, relax, start_radius, sum, Firing, GridPolicy, StabilizationResult, StabilizeOptions};

/// Fraction of the predicted remainder left unfired in each round.
const EPS: f64 = 1e-6;
/// Below this many threshold units the origin is left to plain relaxation.
const STOP: f64 = 1e12;
/// Smallest source worth seeding.
const MIN_SOURCE: f64 = 1e15;

pub(super) fn worth_it<S: Scalar>(field: &HeightField<S>, firing: &Firing<S>) -> bool {
	let Some(o) = field.index(0, 0) else { return false };
	let n = field.values()[o].to_f64();
	let thr = firing.threshold.to_f64();
	n.is_finite() && n / thr >= MIN_SOURCE && field.values().iter().enumerate().all(|(i, v)| i == o || v.to_f64() == 0.0)
}

/// Returns `None` when the float path is unavailable and the caller should
/// relax normally.
pub(super) fn run<S: Scalar>(
	field: &mut HeightField<S>,
	rule: &ToppleRule<S>,
	firing: &Firing<S>,
	opts: &StabilizeOptions,
) -> Result<Option<StabilizationResult<S>>> {
	let d = rule.d.to_f64();
	let n = field.get(0, 0).map(|v| v.to_f64()).unwrap_or(0.0);
	let want = start_radius(n, d);
	let mut touched = false;
	if field.radius() < want {
		if opts.grid == GridPolicy::Fixed {
			return Ok(None);
		}
		*field = field.embed(want, S::zero_val());
		touched = true;
	}
	let initial_mass = sum(field.values());
	let mut topples = Grid::new(field.radius(), S::zero_val());
	{
		let (Some(h), Some(t)) = (S::as_f64_grid(field), S::as_f64_grid(&mut topples)) else {
			return Ok(None);
		};
		seed(h, t, d, rule.c_up.to_f64())?;
	}
	let mut seq = None;
	touched |= relax::relax(field, &mut topples, firing, opts, &mut seq)?;
	let thr = firing.threshold.to_f64();
	if field.values().iter().any(|v| v.to_f64() < -1e-9 * thr) {
		// a seed overshot; should not happen, but the plain path is always correct
		return Ok(None);
	}
	Ok(Some(finish(field.clone(), topples, firing, initial_mass, touched, None)))
}

/// Apply seeding rounds in place. Returns the number of rounds.
///
/// Round `k` treats the configuration as `r_k·δ₀ − thr·T(g)`, where `g` is
/// the real-valued part of the lower bound not yet fired. The odometer of
/// that configuration is at least `r_k·P/(c(d−1)) + g − d/(d−1)`, so the
/// round fires `⌊(1−ε)·r_k·P/(c(d−1)) + g − B⌋` times and carries the rest
/// in `g`. Afterwards the configuration has the same form with
/// `r_{k+1} = ε·r_k`.
pub(crate) fn seed(h: &mut Grid<f64>, topples: &mut Grid<f64>, d: f64, send: f64) -> Result<usize> {
	let radius = h.radius();
	let c = 4.0 * send;
	let thr = c * d;
	let leak = c * (d - 1.0);
	let margin = d / (d - 1.0) + 2.0;
	let field = contour_field(d, radius)?;
	let lp = field.log_p.values();
	let w = h.width();
	let o = h.index(0, 0).unwrap();
	let mut owed = vec![0.0f64; h.len()];
	let mut r = h.data[o];
	let mut rounds = 0;
	while r >= STOP * thr && rounds < 1000 {
		let lm = ((1.0 - EPS) * r / leak).ln();
		for row in 0..w {
			let base = row * w;
			for col in 0..w {
				let i = base + col;
				let l = lm + lp[i];
				let t = if l > -40.0 { l.exp() + owed[i] } else { owed[i] };
				let v = (t - margin).floor();
				if v < 1.0 || row < 2 || col < 2 || row + 2 >= w || col + 2 >= w {
					owed[i] = t;
					continue;
				}
				owed[i] = t - v;
				topples.data[i] += v;
				h.data[i] -= thr * v;
				let sv = send * v;
				h.data[i + 1] += sv;
				h.data[i - 1] += sv;
				h.data[i + w] += sv;
				h.data[i - w] += sv;
			}
		}
		r *= EPS;
		rounds += 1;
	}
	// Where the odometer is far beyond 2^53 the propagated heights are
	// rounding noise of size ~1e−16 of the throughput. The exact residual
	// there is `r·δ₀ + thr·g − send·Σ g(neighbours)`.
	let big = 2f64.powi(40);
	for row in 1..w - 1 {
		for col in 1..w - 1 {
			let i = row * w + col;
			if topples.data[i] >= big {
				let nb = owed[i + 1] + owed[i - 1] + owed[i + w] + owed[i - w];
				h.data[i] = thr * owed[i] - send * nb + if i == o { r } else { 0.0 };
			}
		}
	}
	unfire_negative(h, topples, thr, send);
	Ok(rounds)
}

/// Rounding in the subtractions above can leave heights slightly below
/// zero at sites with very large odometers. Undo just enough fires there.
fn unfire_negative(h: &mut Grid<f64>, topples: &mut Grid<f64>, thr: f64, send: f64) {
	let w = h.width();
	for _ in 0..64 {
		let mut any = false;
		for i in 0..h.len() {
			if h.data[i] >= 0.0 {
				continue;
			}
			let k = (-h.data[i] / thr).ceil().min(topples.data[i]);
			if k <= 0.0 {
				continue;
			}
			any = true;
			topples.data[i] -= k;
			h.data[i] += thr * k;
			let sv = send * k;
			for j in [i + 1, i - 1, i + w, i - w] {
				h.data[j] -= sv;
			}
		}
		if !any {
			break;
		}
	}
}
