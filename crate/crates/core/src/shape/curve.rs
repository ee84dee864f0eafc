use serde::Serialize;

use crate::error::{Error, Result};

use super::saddle::saddle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
	pub a: f64,
	pub x: f64,
	pub y: f64,
}

/// Sampled limit shape in units where the radius in direction `a` is `1/|S|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCurve {
	pub d: f64,
	/// Samples for `a` from 0 to 1 (first octant, or the lower half of the
	/// quadrant for the 2-directional curve).
	pub octant: Vec<CurvePoint>,
	/// Reflected curve, counterclockwise starting on the positive x axis.
	pub closed: Vec<(f64, f64)>,
	/// Normalization tag for the coordinates.
	pub unit: &'static str,
}

fn reflect_diagonal(oct: &[CurvePoint]) -> Vec<(f64, f64)> {
	let mut q: Vec<(f64, f64)> = oct.iter().map(|p| (p.x, p.y)).collect();
	q.extend(oct.iter().rev().skip(1).map(|p| (p.y, p.x)));
	q
}

/// `−(1/S(w₊), a/S(w₊))` for `a ∈ [0, 1]`, reflected 8-fold.
pub fn limit_curve(d: f64, n_samples: usize) -> Result<LimitCurve> {
	if n_samples < 2 {
		return Err(Error::InvalidArgument("need at least 2 samples".into()));
	}
	let mut oct = Vec::with_capacity(n_samples);
	for a in super::a_grid(n_samples) {
		let s = saddle(a, d)?;
		oct.push(CurvePoint { a, x: -1.0 / s.s_cr, y: -a / s.s_cr });
	}
	let quarter = reflect_diagonal(&oct);
	let mut closed = Vec::with_capacity(4 * quarter.len());
	for rot in 0..4 {
		for &(x, y) in &quarter[..quarter.len() - 1] {
			let p = match rot {
				0 => (x, y),
				1 => (-y, x),
				2 => (-x, -y),
				_ => (y, -x),
			};
			closed.push(p);
		}
	}
	Ok(LimitCurve { d, octant: oct, closed, unit: "1/|S(w+)|" })
}

/// `g(a) = log(a^{−a}·((1+a)/(2d))^{1+a})`.
fn ne_g(a: f64, d: f64) -> f64 {
	let ala = if a > 0.0 { a * a.ln() } else { 0.0 };
	-ala + (1.0 + a) * ((1.0 + a) / (2.0 * d)).ln()
}

/// Limit shape of the walk stepping only up or right: `(−1/g, −a/g)`,
/// reflected about the diagonal.
pub fn ne_curve(d: f64, n_samples: usize) -> Result<LimitCurve> {
	if !(d > 1.0) {
		return Err(Error::InvalidArgument(format!("d must exceed 1, got {d}")));
	}
	if n_samples < 2 {
		return Err(Error::InvalidArgument("need at least 2 samples".into()));
	}
	let oct: Vec<CurvePoint> = super::a_grid(n_samples)
		.into_iter()
		.map(|a| {
			let g = ne_g(a, d);
			CurvePoint { a, x: -1.0 / g, y: -a / g }
		})
		.collect();
	let closed = reflect_diagonal(&oct);
	Ok(LimitCurve { d, octant: oct, closed, unit: "1/|g(a)|" })
}

impl LimitCurve {
	/// Closed curve divided by its `a = 0` radius.
	pub fn normalized(&self) -> Vec<(f64, f64)> {
		let r0 = self.octant[0].x;
		self.closed.iter().map(|&(x, y)| (x / r0, y / r0)).collect()
	}

	/// Signed area of the closed polygon; positive when counterclockwise.
	pub fn area(&self) -> f64 {
		let p = &self.closed;
		let n = p.len();
		(0..n).map(|i| p[i].0 * p[(i + 1) % n].1 - p[(i + 1) % n].0 * p[i].1).sum::<f64>() / 2.0
	}

	/// True when every turn of the closed polygon is a left turn (up to `tol`).
	pub fn is_convex(&self, tol: f64) -> bool {
		let p = &self.closed;
		let n = p.len();
		(0..n).all(|i| {
			let (a, b, c) = (p[i], p[(i + 1) % n], p[(i + 2) % n]);
			(b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0) >= -tol
		})
	}
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
	let (dx, dy) = (b.0 - a.0, b.1 - a.1);
	let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
	((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

pub fn sup_distance_to_circle(points: &[(f64, f64)]) -> f64 {
	points.iter().map(|&(x, y)| (x.hypot(y) - 1.0).abs()).fold(0.0, f64::max)
}

/// Distance to the boundary `|x| + |y| = 1`.
pub fn sup_distance_to_l1_ball(points: &[(f64, f64)]) -> f64 {
	points
		.iter()
		.map(|&(x, y)| segment_distance((x.abs(), y.abs()), (1.0, 0.0), (0.0, 1.0)))
		.fold(0.0, f64::max)
}

/// Distance to the segment `x + y = 1`, `x, y ≥ 0`.
pub fn sup_distance_to_triangle(points: &[(f64, f64)]) -> f64 {
	points.iter().map(|&p| segment_distance(p, (1.0, 0.0), (0.0, 1.0))).fold(0.0, f64::max)
}

/// Smallest sup-distance over a common rescaling `λ·points`, `λ ∈ [0.5, 2]`.
pub fn best_scale_sup_distance(points: &[(f64, f64)], dist: fn(&[(f64, f64)]) -> f64) -> (f64, f64) {
	let f = |l: f64| {
		let s: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (l * x, l * y)).collect();
		dist(&s)
	};
	// golden-section search; the sup of distances is unimodal in λ here
	let (mut lo, mut hi) = (0.5f64, 2.0f64);
	let g = (5f64.sqrt() - 1.0) / 2.0;
	let mut c = hi - g * (hi - lo);
	let mut e = lo + g * (hi - lo);
	let (mut fc, mut fe) = (f(c), f(e));
	for _ in 0..100 {
		if fc < fe {
			hi = e;
			e = c;
			fe = fc;
			c = hi - g * (hi - lo);
			fc = f(c);
		} else {
			lo = c;
			c = e;
			fc = fe;
			e = lo + g * (hi - lo);
			fe = f(e);
		}
	}
	let l = 0.5 * (lo + hi);
	(f(l), l)
}
