use num_traits::{One, Zero};

use crate::engine::{coupled_run, point_source, stabilize, stabilize_modified_asm};
use crate::error::Result;
use crate::grid::Grid;
use crate::rule::ToppleRule;
use crate::scalar::{Rational, Scalar};

use super::{Check, Table, VerificationReport};

/// Halvings of `t = 1/(8 m_n)` checked after the coupled run.
const HALVINGS: u32 = 2;

fn same_on_union<T: Clone + PartialEq, U: Clone>(a: &Grid<T>, b: &Grid<U>, fa: T, fb: U, eq: impl Fn(&T, &U) -> bool) -> bool {
	let r = a.radius().max(b.radius()) as i64;
	(-r..=r).all(|y| {
		(-r..=r).all(|x| {
			let va = a.get(x, y).cloned().unwrap_or_else(|| fa.clone());
			let vb = b.get(x, y).cloned().unwrap_or_else(|| fb.clone());
			eq(&va, &vb)
		})
	})
}

/// Exact comparison of the leaky model at `d = 1 + 1/(8 m_n)` with the
/// modified ASM (background height −1), followed by leaky runs at smaller
/// `t` whose rounded-up final field must stay equal to the modified ASM's.
pub fn check_coupling(n_list: &[u64]) -> Result<VerificationReport> {
	let mut report = VerificationReport::new("coupling", &["engine::coupled_run", "engine::stabilize_modified_asm"]);
	let mut table = Table::new("coupling", &["n", "m_n", "fires", "max_gap", "ceil_matches", "visited_equal", "topples_equal"]);
	for &n in n_list {
		let rep = match coupled_run(n) {
			Ok(r) => r,
			Err(e) => {
				report.push(Check::at_most(format!("coupled run n={n}"), 1.0, 0.0).with_note(e.to_string()));
				continue;
			}
		};
		let flag = |b: bool| if b { 0.0 } else { 1.0 };
		report.push(Check::at_most(format!("B = ceil(L) everywhere, n={n}"), flag(rep.ceil_matches), 0.0));
		report.push(Check::at_most(format!("visited sets equal, n={n}"), flag(rep.visited_equal), 0.0));
		report.push(Check::at_most(format!("firing counts equal, n={n}"), flag(rep.topples_equal), 0.0));
		report.push(Check::below(format!("max B - L, n={n}"), rep.max_gap.to_f64(), 1.0));
		table.rows.push(vec![
			n as f64,
			rep.m_n as f64,
			rep.fires as f64,
			rep.max_gap.to_f64(),
			1.0 - flag(rep.ceil_matches),
			1.0 - flag(rep.visited_equal),
			1.0 - flag(rep.topples_equal),
		]);

		let Some(t) = rep.t.clone() else {
			report.note(format!("n={n}: nothing fires in either model"));
			continue;
		};
		let radius = rep.b.radius();
		let modified = stabilize_modified_asm(n, radius)?;
		let mut tk = t;
		for k in 1..=HALVINGS {
			tk /= Rational::from_integer(2.into());
			let rule = ToppleRule::uniform(Rational::one() + &tk)?;
			let leaky = stabilize(point_source(Rational::from_integer(n.into()), radius)?, &rule)?;
			let visited = same_on_union(&leaky.visited, &modified.visited, false, false, |a, b| a == b);
			let ceil = same_on_union(&leaky.final_field, &modified.final_field, Rational::zero(), Rational::zero(), |l, b| {
				l.ceil() == *b
			});
			report.push(Check::at_most(format!("visited sets equal at t/{}, n={n}", 1 << k), flag(visited), 0.0));
			report.push(Check::at_most(format!("B = ceil(L) at t/{}, n={n}", 1 << k), flag(ceil), 0.0));
		}
	}
	report.tables.push(table);
	Ok(report)
}

#[cfg(test)]
mod tests {
	use super::*;

	#[test]
	fn small_list_passes() {
		let rep = check_coupling(&[4, 5, 30]).unwrap();
		assert!(rep.pass, "{rep:#?}");
		assert!(rep.notes.iter().any(|n| n.contains("n=4")));
	}
}
