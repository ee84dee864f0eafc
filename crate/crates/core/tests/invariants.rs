use proptest::prelude::*;

use leaky_asm::engine::start_radius;
use leaky_asm::io::write_heights_csv;
use leaky_asm::krw::{death_prob_dp, steps_for_tail};
use leaky_asm::shape::saddle;
use leaky_asm::{apply_t, parse_rational, point_source, stabilize, Grid, Rational, Scalar, ToppleRule};

fn weights() -> impl Strategy<Value = [f64; 4]> {
	prop::array::uniform4(1u8..=4).prop_map(|w| w.map(f64::from))
}

proptest! {
	#![proptest_config(ProptestConfig::with_cases(24))]

	#[test]
	fn odometer_identity_in_float_mode(log_n in 1.0f64..12.0, d in 1.05f64..5.0, w in weights()) {
		let n = 10f64.powf(log_n);
		let rule = ToppleRule::from_weights(w, d).unwrap();
		let res = stabilize(point_source(n, start_radius(n, d)).unwrap(), &rule).unwrap();
		let thr = rule.threshold();
		prop_assert!(res.final_field.values().iter().all(|h| *h >= 0.0 && *h < thr));
		prop_assert!(res.mass_defect().abs() <= 1e-9 * n);
		let tu = apply_t(&res.odometer.u(), &rule).unwrap();
		for ((x, y), v) in tu.iter() {
			let want = res.final_field.get(x, y).unwrap() - if (x, y) == (0, 0) { n } else { 0.0 };
			prop_assert!((v - want).abs() <= 1e-9 * n, "({x}, {y}): {v} vs {want}");
		}
	}

	#[test]
	fn dp_mass_is_within_the_tail(d in 1.2f64..6.0, w in weights(), eps in 1e-14f64..1e-3) {
		let rule = ToppleRule::from_weights(w, d).unwrap();
		let k = steps_for_tail(d, eps).unwrap();
		let f = death_prob_dp(&rule, k, eps).unwrap();
		let total = f.total_mass();
		prop_assert!(total <= 1.0 + 1e-12);
		prop_assert!(total >= 1.0 - f.tail_bound - 1e-12);
		prop_assert!(f.tail_bound <= eps * (1.0 + 1e-9));
	}

	#[test]
	fn t_is_linear_in_exact_arithmetic(seed in prop::collection::vec(-20i64..20, 2 * 25), alpha in -5i64..5) {
		let rule = ToppleRule::from_weights([1, 2, 3, 1].map(Rational::from_i64), Rational::new(7.into(), 4.into())).unwrap();
		let u = Grid::from_fn(2, |x, y| Rational::from_i64(seed[((y + 2) * 5 + x + 2) as usize]));
		let v = Grid::from_fn(2, |x, y| Rational::from_i64(seed[25 + ((y + 2) * 5 + x + 2) as usize]));
		let a = Rational::from_i64(alpha);
		let mut mix = u.clone();
		for (m, b) in mix.values_mut().iter_mut().zip(v.values()) {
			*m = &*m * &a + b;
		}
		let lhs = apply_t(&mix, &rule).unwrap();
		let (tu, tv) = (apply_t(&u, &rule).unwrap(), apply_t(&v, &rule).unwrap());
		for (i, l) in lhs.values().iter().enumerate() {
			prop_assert_eq!(l.clone(), &tu.values()[i] * &a + &tv.values()[i]);
		}
	}

	#[test]
	fn decay_rate_is_at_least_the_axis_rate(a in 0.0f64..=1.0, d in 1.01f64..50.0) {
		// the axis is the slowest direction per unit of x
		let s = saddle(a, d).unwrap();
		let s0 = saddle(0.0, d).unwrap();
		prop_assert!(s.s_cr <= s0.s_cr + 1e-12);
		prop_assert!(s.s_cr / (1.0 + a) >= s0.s_cr - 1e-12);
	}
}

#[test]
fn heights_csv_round_trips_in_rational_mode() {
	let rule = ToppleRule::uniform(Rational::new(3.into(), 2.into())).unwrap();
	let res = stabilize(point_source(Rational::from_i64(200), 6).unwrap(), &rule).unwrap();
	let mut buf = Vec::new();
	write_heights_csv(&res, &mut buf).unwrap();
	let text = String::from_utf8(buf).unwrap();
	let mut rows = 0;
	for line in text.lines().skip(1) {
		let cells: Vec<&str> = line.split(',').collect();
		let (x, y): (i64, i64) = (cells[0].parse().unwrap(), cells[1].parse().unwrap());
		assert_eq!(&parse_rational(cells[2]).unwrap(), res.final_field.get(x, y).unwrap());
		rows += 1;
	}
	assert!(rows >= res.visited_count);
}
