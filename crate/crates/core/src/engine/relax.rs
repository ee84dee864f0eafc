use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Scalar;

use super::{FireOrder, Firing, GridPolicy, StabilizeOptions};

enum Worklist {
	Fifo(VecDeque<usize>),
	Random(Vec<usize>, ChaCha8Rng),
}

impl Worklist {
	fn push(&mut self, i: usize) {
		match self {
			Worklist::Fifo(q) => q.push_back(i),
			Worklist::Random(v, _) => v.push(i),
		}
	}

	fn pop(&mut self) -> Option<usize> {
		match self {
			Worklist::Fifo(q) => q.pop_front(),
			Worklist::Random(v, rng) => {
				if v.is_empty() {
					None
				} else {
					let k = rng.gen_range(0..v.len());
					Some(v.swap_remove(k))
				}
			}
		}
	}

	fn clear(&mut self) {
		match self {
			Worklist::Fifo(q) => q.clear(),
			Worklist::Random(v, _) => v.clear(),
		}
	}
}

fn grow<S: Scalar>(h: &mut Grid<S>, topples: &mut Grid<S>) {
	let r = h.radius();
	let nr = (r + 1).max((r * 5).div_ceil(4));
	*h = h.embed(nr, S::zero_val());
	*topples = topples.embed(nr, S::zero_val());
}

/// Fire unstable sites until none remain. Returns whether the grid edge was
/// reached.
pub(crate) fn relax<S: Scalar>(
	h: &mut Grid<S>,
	topples: &mut Grid<S>,
	firing: &Firing<S>,
	opts: &StabilizeOptions,
	seq: &mut Option<Vec<(i64, i64)>>,
) -> Result<bool> {
	if seq.is_some() && opts.batch {
		return Err(Error::InvalidArgument("recording a firing sequence needs single fires".into()));
	}
	let thr = &firing.threshold;
	let loss = &firing.loss;
	let act = S::active_level(thr);
	let [s_up, s_right, s_down, s_left] = &firing.sends;
	let mut touched = false;
	let mut work = match opts.order {
		FireOrder::Fifo => Worklist::Fifo(VecDeque::new()),
		FireOrder::Random(seed) => Worklist::Random(Vec::new(), ChaCha8Rng::seed_from_u64(seed)),
	};

	'outer: loop {
		let w = h.width();
		let mut queued = vec![false; h.len()];
		work.clear();
		for (i, v) in h.values().iter().enumerate() {
			if *v >= act {
				queued[i] = true;
				work.push(i);
			}
		}
		while let Some(i) = work.pop() {
			if !(h.data[i] >= act) {
				queued[i] = false;
				continue;
			}
			if h.on_edge(i) {
				match opts.grid {
					GridPolicy::Fixed => return Err(Error::GridOverflow(h.radius())),
					GridPolicy::Auto => {
						touched = true;
						grow(h, topples);
						continue 'outer;
					}
				}
			}
			let k = if opts.batch {
				let (k, rem) = S::fire_split(&h.data[i], thr, loss);
				h.data[i] = rem;
				k
			} else {
				h.data[i].sub_assign(loss);
				S::one_val()
			};
			topples.data[i].add_assign(&k);
			if let Some(s) = seq.as_mut() {
				s.push(h.coords(i));
			}
			for (j, send) in [(i + w, s_up), (i + 1, s_right), (i - w, s_down), (i - 1, s_left)] {
				h.data[j].add_assign(&k.mul(send));
				if !queued[j] && h.data[j] >= act {
					queued[j] = true;
					work.push(j);
				}
			}
			if h.data[i] >= act {
				work.push(i);
			} else {
				queued[i] = false;
			}
		}
		return Ok(touched);
	}
}
