/// Square grid of values on `[−radius, radius]²`, origin at the centre.
///
/// Storage is row-major with `y` increasing upwards: the value for `(x, y)`
/// lives at `(y + radius)·width + (x + radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
	radius: usize,
	width: usize,
	pub(crate) data: Vec<T>,
}

/// Site heights; the scalar type selects float or exact mode.
pub type HeightField<S> = Grid<S>;

impl<T: Clone> Grid<T> {
	pub fn new(radius: usize, fill: T) -> Self {
		let width = 2 * radius + 1;
		Grid { radius, width, data: vec![fill; width * width] }
	}

	pub fn from_fn(radius: usize, mut f: impl FnMut(i64, i64) -> T) -> Self {
		let width = 2 * radius + 1;
		let r = radius as i64;
		let mut data = Vec::with_capacity(width * width);
		for y in -r..=r {
			for x in -r..=r {
				data.push(f(x, y));
			}
		}
		Grid { radius, width, data }
	}

	/// Copy into a larger grid, filling new cells with `fill`.
	pub fn embed(&self, radius: usize, fill: T) -> Self {
		assert!(radius >= self.radius);
		let mut g = Grid::new(radius, fill);
		let off = radius - self.radius;
		for row in 0..self.width {
			let src = &self.data[row * self.width..(row + 1) * self.width];
			let start = (row + off) * g.width + off;
			g.data[start..start + self.width].clone_from_slice(src);
		}
		g
	}

	pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
		Grid { radius: self.radius, width: self.width, data: self.data.iter().map(f).collect() }
	}

	pub fn set(&mut self, x: i64, y: i64, v: T) {
		let i = self.index(x, y).expect("site outside grid");
		self.data[i] = v;
	}
}

impl<T> Grid<T> {
	pub fn radius(&self) -> usize {
		self.radius
	}

	pub fn width(&self) -> usize {
		self.width
	}

	pub fn len(&self) -> usize {
		self.data.len()
	}

	pub fn is_empty(&self) -> bool {
		self.data.is_empty()
	}

	pub fn contains(&self, x: i64, y: i64) -> bool {
		let r = self.radius as i64;
		x.abs() <= r && y.abs() <= r
	}

	#[inline]
	pub fn index(&self, x: i64, y: i64) -> Option<usize> {
		if self.contains(x, y) {
			let r = self.radius as i64;
			Some((y + r) as usize * self.width + (x + r) as usize)
		} else {
			None
		}
	}

	#[inline]
	pub fn coords(&self, i: usize) -> (i64, i64) {
		let r = self.radius as i64;
		((i % self.width) as i64 - r, (i / self.width) as i64 - r)
	}

	pub fn get(&self, x: i64, y: i64) -> Option<&T> {
		self.index(x, y).map(|i| &self.data[i])
	}

	pub fn get_mut(&mut self, x: i64, y: i64) -> Option<&mut T> {
		self.index(x, y).map(move |i| &mut self.data[i])
	}

	pub fn values(&self) -> &[T] {
		&self.data
	}

	pub fn values_mut(&mut self) -> &mut [T] {
		&mut self.data
	}

	/// True when index `i` lies on the outermost ring.
	#[inline]
	pub fn on_edge(&self, i: usize) -> bool {
		let (col, row) = (i % self.width, i / self.width);
		col == 0 || row == 0 || col + 1 == self.width || row + 1 == self.width
	}

	/// Iterate `((x, y), &value)` in storage order.
	pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &T)> + '_ {
		self.data.iter().enumerate().map(move |(i, v)| (self.coords(i), v))
	}
}

/// The eight symmetries of the square lattice, as coordinate maps.
pub const DIHEDRAL: [fn(i64, i64) -> (i64, i64); 8] = [
	|x, y| (x, y),
	|x, y| (-y, x),
	|x, y| (-x, -y),
	|x, y| (y, -x),
	|x, y| (-x, y),
	|x, y| (x, -y),
	|x, y| (y, x),
	|x, y| (-y, -x),
];
