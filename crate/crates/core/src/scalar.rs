//! Scalar modes: `f64` for speed, [`Rational`] for exact arithmetic.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grid::Grid;

pub type Rational = BigRational;

/// Relative slack applied to the firing threshold in float mode.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Arithmetic needed by the engine and the operator `T`.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static {
	const EXACT: bool;

	fn zero_val() -> Self;
	fn one_val() -> Self;
	fn from_i64(v: i64) -> Self;
	fn from_f64(v: f64) -> Result<Self>;
	/// Parse decimal, mantissa-exponent ("1e100") or fraction ("7/3") text.
	fn parse(text: &str) -> Result<Self>;
	fn to_f64(&self) -> f64;

	fn add(&self, o: &Self) -> Self;
	fn sub(&self, o: &Self) -> Self;
	fn mul(&self, o: &Self) -> Self;
	fn div(&self, o: &Self) -> Self;
	fn add_assign(&mut self, o: &Self);
	fn sub_assign(&mut self, o: &Self);

	fn floor(&self) -> Self;
	fn ceil(&self) -> Self;
	fn is_finite(&self) -> bool;
	fn is_negative(&self) -> bool;

	/// Smallest height treated as unstable for threshold `thr`.
	fn active_level(thr: &Self) -> Self;

	/// For an unstable height `h`, the number of fires `k` that bring it
	/// below `thr` when each fire removes `loss`, and the remainder.
	fn fire_split(h: &Self, thr: &Self, loss: &Self) -> (Self, Self);

	/// Text form: 12 significant digits for floats, `p/q` for rationals.
	fn to_text(&self) -> String;

	/// Downcast hook used by float-only fast paths.
	fn as_f64_grid(_g: &mut Grid<Self>) -> Option<&mut Grid<f64>> {
		None
	}
}

impl Scalar for f64 {
	const EXACT: bool = false;

	fn zero_val() -> Self {
		0.0
	}
	fn one_val() -> Self {
		1.0
	}
	fn from_i64(v: i64) -> Self {
		v as f64
	}
	fn from_f64(v: f64) -> Result<Self> {
		if v.is_finite() {
			Ok(v)
		} else {
			Err(Error::FloatOverflow(v.to_string()))
		}
	}
	fn parse(text: &str) -> Result<Self> {
		let t = text.trim();
		let v = if let Some((p, q)) = t.split_once('/') {
			let p: f64 = p.trim().parse().map_err(|_| Error::InvalidArgument(format!("not a number: {t}")))?;
			let q: f64 = q.trim().parse().map_err(|_| Error::InvalidArgument(format!("not a number: {t}")))?;
			p / q
		} else {
			t.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: {t}")))?
		};
		if v.is_finite() {
			Ok(v)
		} else {
			Err(Error::FloatOverflow(t.to_string()))
		}
	}
	#[inline]
	fn to_f64(&self) -> f64 {
		*self
	}
	#[inline]
	fn add(&self, o: &Self) -> Self {
		self + o
	}
	#[inline]
	fn sub(&self, o: &Self) -> Self {
		self - o
	}
	#[inline]
	fn mul(&self, o: &Self) -> Self {
		self * o
	}
	#[inline]
	fn div(&self, o: &Self) -> Self {
		self / o
	}
	#[inline]
	fn add_assign(&mut self, o: &Self) {
		*self += o
	}
	#[inline]
	fn sub_assign(&mut self, o: &Self) {
		*self -= o
	}
	fn floor(&self) -> Self {
		f64::floor(*self)
	}
	fn ceil(&self) -> Self {
		f64::ceil(*self)
	}
	fn is_finite(&self) -> bool {
		f64::is_finite(*self)
	}
	fn is_negative(&self) -> bool {
		*self < 0.0
	}
	#[inline]
	fn active_level(thr: &Self) -> Self {
		thr * (1.0 - FLOAT_SLACK)
	}
	#[inline]
	fn fire_split(h: &Self, thr: &Self, loss: &Self) -> (Self, Self) {
		let (h, thr, loss) = (*h, *thr, *loss);
		if h < thr {
			// inside the slack band
			return (1.0, (h - loss).max(0.0));
		}
		let mut k = ((h - thr) / loss).floor() + 1.0;
		if k > 4.0e15 {
			// remainder is exact through fmod, the count is not
			let rem = thr - loss + (h - thr + loss) % loss;
			return (k, rem.max(0.0));
		}
		let mut rem = h - k * loss;
		if rem < thr - loss {
			k -= 1.0;
			rem += loss;
		}
		if rem >= thr {
			k += 1.0;
			rem -= loss;
		}
		(k, rem.max(0.0))
	}
	fn to_text(&self) -> String {
		fmt_sig(*self)
	}
	fn as_f64_grid(g: &mut Grid<Self>) -> Option<&mut Grid<f64>> {
		Some(g)
	}
}

impl Scalar for Rational {
	const EXACT: bool = true;

	fn zero_val() -> Self {
		Zero::zero()
	}
	fn one_val() -> Self {
		One::one()
	}
	fn from_i64(v: i64) -> Self {
		Rational::from_integer(BigInt::from(v))
	}
	fn from_f64(v: f64) -> Result<Self> {
		Rational::from_float(v).ok_or_else(|| Error::InvalidArgument(format!("not finite: {v}")))
	}
	fn parse(text: &str) -> Result<Self> {
		parse_rational(text)
	}
	fn to_f64(&self) -> f64 {
		rational_to_f64(self)
	}
	fn add(&self, o: &Self) -> Self {
		self + o
	}
	fn sub(&self, o: &Self) -> Self {
		self - o
	}
	fn mul(&self, o: &Self) -> Self {
		self * o
	}
	fn div(&self, o: &Self) -> Self {
		self / o
	}
	fn add_assign(&mut self, o: &Self) {
		*self += o
	}
	fn sub_assign(&mut self, o: &Self) {
		*self -= o
	}
	fn floor(&self) -> Self {
		Rational::floor(self)
	}
	fn ceil(&self) -> Self {
		Rational::ceil(self)
	}
	fn is_finite(&self) -> bool {
		true
	}
	fn is_negative(&self) -> bool {
		Signed::is_negative(self)
	}
	fn active_level(thr: &Self) -> Self {
		thr.clone()
	}
	fn fire_split(h: &Self, thr: &Self, loss: &Self) -> (Self, Self) {
		let k = ((h - thr) / loss).floor() + Rational::one();
		let rem = h - &k * loss;
		(k, rem)
	}
	fn to_text(&self) -> String {
		if self.is_integer() {
			self.numer().to_string()
		} else {
			format!("{}/{}", self.numer(), self.denom())
		}
	}
}

/// Format with 12 significant digits, the precision used for all printed output.
pub fn fmt_sig(v: f64) -> String {
	if v == 0.0 || !v.is_finite() {
		return format!("{v}");
	}
	let mag = v.abs().log10().floor() as i32;
	if (-5..15).contains(&mag) {
		let decimals = (11 - mag).max(0) as usize;
		let s = format!("{:.*}", decimals, v);
		if s.contains('.') {
			s.trim_end_matches('0').trim_end_matches('.').to_string()
		} else {
			s
		}
	} else {
		let s = format!("{:.11e}", v);
		let (m, e) = s.split_once('e').unwrap();
		let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
		format!("{m}e{e}")
	}
}

fn rational_to_f64(r: &Rational) -> f64 {
	if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
		if n.is_finite() && d.is_finite() && d != 0.0 {
			return n / d;
		}
	}
	// scale both sides into range
	let nb = r.numer().bits() as i64;
	let db = r.denom().bits() as i64;
	let shift = nb - db - 60;
	let scaled = if shift >= 0 {
		Rational::new(r.numer().clone(), r.denom().clone() << shift as usize)
	} else {
		Rational::new(r.numer().clone() << (-shift) as usize, r.denom().clone())
	};
	let q = scaled.to_integer().to_f64().unwrap_or(f64::NAN);
	q * 2f64.powi(shift as i32)
}

/// Exact parse of "123", "-1.25", "1e100", "2.5e-3" or "7/3".
pub fn parse_rational(text: &str) -> Result<Rational> {
	let t = text.trim();
	let bad = || Error::InvalidArgument(format!("not a number: {t}"));
	if let Some((p, q)) = t.split_once('/') {
		let p = parse_rational(p)?;
		let q = parse_rational(q)?;
		if q.is_zero() {
			return Err(bad());
		}
		return Ok(p / q);
	}
	let (mant, exp) = match t.find(['e', 'E']) {
		Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
		None => (t, 0),
	};
	let (neg, mant) = match mant.strip_prefix('-') {
		Some(m) => (true, m),
		None => (false, mant.strip_prefix('+').unwrap_or(mant)),
	};
	let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
	if ip.is_empty() && fp.is_empty() {
		return Err(bad());
	}
	if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
		return Err(bad());
	}
	if exp.abs() > 100_000 {
		return Err(bad());
	}
	let digits: BigInt = format!("{ip}{fp}").parse().unwrap_or_else(|_| BigInt::zero());
	let e10 = exp - fp.len() as i64;
	let ten = BigInt::from(10);
	let mut r = if e10 >= 0 {
		Rational::from_integer(digits * num_traits::pow(ten, e10 as usize))
	} else {
		Rational::new(digits, num_traits::pow(ten, (-e10) as usize))
	};
	if neg {
		r = -r;
	}
	Ok(r)
}

#[cfg(test)]
mod tests {
	use super::*;

	#[test]
	fn parse_forms() {
		assert_eq!(parse_rational("1e3").unwrap(), Rational::from_i64(1000));
		assert_eq!(parse_rational("2.5e-1").unwrap(), Rational::new(1.into(), 4.into()));
		assert_eq!(parse_rational("7/3").unwrap(), Rational::new(7.into(), 3.into()));
		assert_eq!(parse_rational("-0.5").unwrap(), Rational::new((-1).into(), 2.into()));
		assert!(parse_rational("abc").is_err());
		assert!(parse_rational("").is_err());
		let big = parse_rational("1e300").unwrap();
		assert!((Scalar::to_f64(&big) / 1e300 - 1.0).abs() < 1e-15);
		let huge = parse_rational("1e400").unwrap();
		assert!(Scalar::to_f64(&huge).is_infinite() || Scalar::to_f64(&huge) > 1e308);
	}

	#[test]
	fn float_overflow_is_reported() {
		assert!(matches!(f64::parse("1e400"), Err(Error::FloatOverflow(_))));
		assert_eq!(f64::parse("1e100").unwrap(), 1e100);
	}

	#[test]
	fn split_matches_floor() {
		let (k, r) = f64::fire_split(&17.0, &4.0, &4.0);
		assert_eq!((k, r), (4.0, 1.0));
		let (k, r) = f64::fire_split(&(4.0 * (1.0 - 1e-13)), &4.0, &4.0);
		assert_eq!((k, r), (1.0, 0.0));
		let (k, r) = Rational::fire_split(&Rational::from_i64(17), &Rational::from_i64(5), &Rational::from_i64(4));
		assert_eq!((k, r), (Rational::from_i64(4), Rational::from_i64(1)));
		let (k, r) = f64::fire_split(&1e300, &4.2, &4.2);
		assert!(r >= 0.0 && r < 4.2);
		assert!((k * 4.2 / 1e300 - 1.0).abs() < 1e-12);
	}

	#[test]
	fn sig_digits() {
		assert_eq!(fmt_sig(0.70710678118654752), "0.707106781187");
		assert_eq!(fmt_sig(1e100), "1e100");
		assert_eq!(fmt_sig(5.0), "5");
		assert_eq!(fmt_sig(-0.0625), "-0.0625");
	}
}
