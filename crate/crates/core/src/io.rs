//! CSV, JSON and PPM writers. CSV files use a header row, `.` as decimal
//! separator and `\n` line endings.

use std::io::Write;

use crate::engine::StabilizationResult;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::krw::DeathProbField;
use crate::scalar::{fmt_sig, Scalar};
use crate::shape::LimitCurve;

/// `x,y,height` for every site that holds chips or has fired.
pub fn write_heights_csv<S: Scalar, W: Write>(res: &StabilizationResult<S>, out: &mut W) -> Result<()> {
	writeln!(out, "x,y,height")?;
	let zero = S::zero_val();
	for ((x, y), h) in res.final_field.iter() {
		if *h != zero || res.is_visited(x, y) {
			writeln!(out, "{x},{y},{}", h.to_text())?;
		}
	}
	Ok(())
}

/// `x,y,u,topples` for every visited site.
pub fn write_odometer_csv<S: Scalar, W: Write>(res: &StabilizationResult<S>, out: &mut W) -> Result<()> {
	writeln!(out, "x,y,u,topples")?;
	let per = &res.odometer.per_fire;
	for ((x, y), t) in res.odometer.topples.iter() {
		if res.is_visited(x, y) {
			writeln!(out, "{x},{y},{},{}", t.mul(per).to_text(), t.to_text())?;
		}
	}
	Ok(())
}

/// `x,y,log_p` for every site; unreachable sites print `-inf`.
pub fn write_field_csv<W: Write>(field: &DeathProbField, out: &mut W) -> Result<()> {
	writeln!(out, "x,y,log_p")?;
	for ((x, y), l) in field.log_p.iter() {
		writeln!(out, "{x},{y},{}", fmt_sig(*l))?;
	}
	Ok(())
}

/// `a,x,y` for the first-octant samples.
pub fn write_curve_csv<W: Write>(curve: &LimitCurve, out: &mut W) -> Result<()> {
	writeln!(out, "a,x,y")?;
	for p in &curve.octant {
		writeln!(out, "{},{},{}", fmt_sig(p.a), fmt_sig(p.x), fmt_sig(p.y))?;
	}
	Ok(())
}

/// `x,y` for a closed point list.
pub fn write_points_csv<W: Write>(points: &[(f64, f64)], out: &mut W) -> Result<()> {
	writeln!(out, "x,y")?;
	for (x, y) in points {
		writeln!(out, "{},{}", fmt_sig(*x), fmt_sig(*y))?;
	}
	Ok(())
}

/// Colours for height buckets and for untouched sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
	pub background: [u8; 3],
	pub buckets: Vec<[u8; 3]>,
}

impl Default for Palette {
	fn default() -> Self {
		Palette {
			background: [255, 255, 255],
			buckets: vec![
				[20, 20, 60],
				[40, 70, 160],
				[30, 140, 190],
				[60, 170, 110],
				[170, 200, 60],
				[240, 190, 40],
				[230, 110, 40],
				[180, 30, 40],
			],
		}
	}
}

impl Palette {
	/// Colour for height `h` given the firing threshold.
	pub fn colour(&self, h: f64, threshold: f64, visited: bool) -> [u8; 3] {
		if !visited && h == 0.0 {
			return self.background;
		}
		let nb = self.buckets.len();
		let b = ((h / threshold) * nb as f64).floor().clamp(0.0, (nb - 1) as f64) as usize;
		self.buckets[b]
	}
}

/// Binary PPM, one pixel per site, top row is the largest `y`.
pub fn render_ppm(field: &Grid<f64>, visited: Option<&Grid<bool>>, threshold: f64, palette: &Palette) -> Result<Vec<u8>> {
	if field.is_empty() {
		return Err(Error::InvalidArgument("empty field".into()));
	}
	if palette.buckets.is_empty() {
		return Err(Error::InvalidArgument("palette has no buckets".into()));
	}
	if !(threshold > 0.0) {
		return Err(Error::InvalidArgument("threshold must be positive".into()));
	}
	let w = field.width();
	let r = field.radius() as i64;
	let mut out = format!("P6\n{w} {w}\n255\n").into_bytes();
	out.reserve(3 * w * w);
	for y in (-r..=r).rev() {
		for x in -r..=r {
			let h = *field.get(x, y).unwrap();
			if !h.is_finite() {
				return Err(Error::NonFinite { x, y });
			}
			let v = visited.and_then(|g| g.get(x, y).copied()).unwrap_or(false);
			out.extend_from_slice(&palette.colour(h, threshold, v));
		}
	}
	Ok(out)
}

#[cfg(test)]
mod tests {
	use super::*;
	use crate::engine::{point_source, stabilize};
	use crate::rule::ToppleRule;

	#[test]
	fn blank_field_is_background() {
		let p = Palette::default();
		let img = render_ppm(&Grid::new(1, 0.0), None, 5.0, &p).unwrap();
		let header = b"P6\n3 3\n255\n";
		assert_eq!(&img[..header.len()], header);
		assert!(img[header.len()..].chunks(3).all(|c| c == p.background));
		assert_eq!(img.len(), header.len() + 27);
	}

	#[test]
	fn single_topple_colours() {
		let rule = ToppleRule::uniform(1.25).unwrap();
		let res = stabilize(point_source(5.0, 1).unwrap(), &rule).unwrap();
		let p = Palette::default();
		let img = render_ppm(&res.final_field, Some(&res.visited), 5.0, &p).unwrap();
		let px = &img[img.len() - 27..];
		let at = |row: usize, col: usize| &px[3 * (3 * row + col)..3 * (3 * row + col) + 3];
		assert_eq!(at(1, 1), p.buckets[0]);
		for (r, c) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
			assert_eq!(at(r, c), p.buckets[1]);
		}
		assert_eq!(at(0, 0), p.background);
		let again = render_ppm(&res.final_field, Some(&res.visited), 5.0, &p).unwrap();
		assert_eq!(img, again);
	}

	#[test]
	fn csv_shapes() {
		let rule = ToppleRule::uniform(1.25).unwrap();
		let res = stabilize(point_source(5.0, 2).unwrap(), &rule).unwrap();
		let mut buf = Vec::new();
		write_heights_csv(&res, &mut buf).unwrap();
		let text = String::from_utf8(buf).unwrap();
		assert!(text.starts_with("x,y,height\n"));
		assert_eq!(text.lines().count(), 6);
		let mut buf = Vec::new();
		write_odometer_csv(&res, &mut buf).unwrap();
		assert_eq!(String::from_utf8(buf).unwrap(), "x,y,u,topples\n0,0,5,1\n");
	}
}
