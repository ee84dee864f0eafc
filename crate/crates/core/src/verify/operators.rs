use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_traits::{One, Pow, Signed, Zero};

use crate::engine::apply_t;
use crate::error::Result;
use crate::grid::Grid;
use crate::error::Error;
use crate::krw::{death_prob_dp, death_prob_dp_exact, steps_for_tail};
use crate::scalar::{Rational, Scalar};
use crate::rule::ToppleRule;

use super::{Check, Tolerances, VerificationReport};

fn rule_to_rational(rule: &ToppleRule<f64>) -> Result<ToppleRule<Rational>> {
	let q = |v: f64| Rational::from_float(v).ok_or_else(|| Error::InvalidArgument(format!("{v} is not finite")));
	let [u, r, dn, l] = rule.weights();
	ToppleRule::from_weights([q(u)?, q(r)?, q(dn)?, q(l)?], q(rule.d)?)
}

/// Support radius of the random test functions.
const G_RADIUS: usize = 5;

/// The three operator facts behind the odometer analysis:
/// `T P = −((d−1)/d)·δ₀`, the inverse kernel `−(d/(d−1))·P *`, and the
/// eigenvalue `−(d−1)/d` of constants.
pub fn check_operator_identities(
	rule: &ToppleRule<f64>,
	radius: usize,
	seed: u64,
	tol: &Tolerances,
) -> Result<VerificationReport> {
	rule.validate()?;
	let d = rule.d;
	let [u, r, dn, l] = rule.weights();
	let mut report =
		VerificationReport::new(format!("operators d={d} weights=({u},{r},{dn},{l})"), &["krw::dp", "engine::apply_t"]);
	let eig = -(d - 1.0) / d;

	// (i) in exact arithmetic: with P known to 1e−16 only, a float T P
	// cannot resolve a 1e−30 truncation bound
	let k = steps_for_tail(d, 1e-30)?;
	let exact_rule = rule_to_rational(rule)?;
	let pk = death_prob_dp_exact(&exact_rule, k)?;
	let tp = apply_t(&pk, &exact_rule)?;
	let tail = Rational::one() / Pow::pow(&exact_rule.d, k as u32);
	let zero = Rational::zero();
	let off = tp.iter().filter(|((x, y), _)| (*x, *y) != (0, 0)).map(|(_, v)| v.abs()).fold(zero, |a, b| a.max(b));
	let eig_q = -(&exact_rule.d - Rational::one()) / &exact_rule.d;
	let origin = (tp.get(0, 0).unwrap() - &eig_q).abs();
	let four_tail = &tail * Rational::from_integer(4.into());
	report.push(Check {
		pass: off <= four_tail,
		..Check::at_most("max off-origin |T P| (exact)", Scalar::to_f64(&off), Scalar::to_f64(&four_tail))
	});
	report.push(Check::at_most("|T P(0) + (d-1)/d| (exact)", Scalar::to_f64(&origin), tol.operator_origin));

	// the float oracle used everywhere else, against the exact values
	let horizon = k.max(3 * G_RADIUS + 1);
	let field = death_prob_dp(rule, horizon, (1.0 / d).powi(horizon as i32))?;
	let rel = pk
		.iter()
		.filter(|(_, p)| !p.is_zero())
		.map(|((x, y), p)| (field.prob(x, y) / Scalar::to_f64(p) - 1.0).abs())
		.fold(0.0, f64::max);
	report.note(format!("float DP vs exact, largest relative difference {rel:e}"));
	let p = field.log_p.map(|lp| lp.exp());

	let mut rng = ChaCha8Rng::seed_from_u64(seed);
	let g = Grid::from_fn(G_RADIUS + 1, |x, y| {
		if x.unsigned_abs() as usize <= G_RADIUS && y.unsigned_abs() as usize <= G_RADIUS {
			rng.gen_range(-1.0..1.0)
		} else {
			0.0
		}
	});
	let f = apply_t(&g, rule)?;
	let scale = -d / (d - 1.0);
	let out = 2 * G_RADIUS;
	let mut worst: f64 = 0.0;
	for y in -(out as i64)..=out as i64 {
		for x in -(out as i64)..=out as i64 {
			let mut acc = 0.0;
			for ((fx, fy), fv) in f.iter() {
				if *fv != 0.0 {
					acc += p.get(x - fx, y - fy).copied().unwrap_or(0.0) * fv;
				}
			}
			let want = g.get(x, y).copied().unwrap_or(0.0);
			worst = worst.max((scale * acc - want).abs());
		}
	}
	report.push(Check::below("inverse kernel round trip", worst, tol.round_trip));

	let ones = Grid::new(radius.max(2), 1.0);
	let t1 = apply_t(&ones, rule)?;
	let interior =
		t1.iter().filter(|((x, y), _)| x.unsigned_abs() < radius as u64 && y.unsigned_abs() < radius as u64);
	let e1 = interior.map(|(_, v)| (v - eig).abs()).fold(0.0, f64::max);
	report.push(Check::at_most("T(1) + (d-1)/d in the interior", e1, tol.operator_ones));
	report.note(format!("DP steps {k}, tail {:e}", Scalar::to_f64(&tail)));
	Ok(report)
}
