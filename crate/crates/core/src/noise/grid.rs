use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack (in units of the step) when deciding whether a time sits on
/// the lattice.
pub const LATTICE_TOL: f64 = 1e-7;

/// Uniform grid `t0 = s_0 < s_1 < ... < s_n = t1` with spacing `(t1 - t0) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite endpoints [{t0}, {t1}]")));
        }
        if t0 >= t1 {
            return Err(Error::InvalidGrid(format!("t0 = {t0} must be below t1 = {t1}")));
        }
        if n == 0 {
            return Err(Error::InvalidGrid("a grid needs at least one step".into()));
        }
        Ok(Self { t0, t1, n })
    }

    /// Grid of `n` steps of size `h` starting at `t0`.
    pub fn with_step(t0: f64, h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {h}")));
        }
        Self::new(t0, t0 + h * n as f64, n)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Number of steps; the grid has `n + 1` points.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.n as f64
    }

    pub fn span(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        if i == self.n {
            self.t1
        } else {
            self.t0 + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.point(i))
    }

    /// Index of the lattice point equal to `t`, if `t` lies on the lattice.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.step();
        let k = x.round();
        if (x - k).abs() > LATTICE_TOL || k < 0.0 || k > self.n as f64 {
            return None;
        }
        Some(k as usize)
    }

    /// Index of the grid point `t = 0`.
    pub fn origin_index(&self) -> Option<usize> {
        self.index_of(0.0)
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = LATTICE_TOL * self.step();
        t >= self.t0 - slack && t <= self.t1 + slack
    }

    /// Sub-grid spanning indices `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi > self.n {
            return Err(Error::InvalidGrid(format!(
                "index range {lo}..={hi} is not inside 0..={}",
                self.n
            )));
        }
        Self::new(self.point(lo), self.point(hi), hi - lo)
    }

    /// Every `stride`-th point; `n` must be divisible by `stride`.
    pub fn coarsen(&self, stride: usize) -> Result<Self> {
        if stride == 0 || self.n % stride != 0 {
            return Err(Error::InvalidGrid(format!(
                "cannot coarsen {} steps by a stride of {stride}",
                self.n
            )));
        }
        Self::new(self.t0, self.t1, self.n / stride)
    }

    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidGrid("refinement factor must be positive".into()));
        }
        Self::new(self.t0, self.t1, self.n * factor)
    }

    /// Whether both grids share spacing and their points interleave on one lattice.
    pub fn same_lattice(&self, other: &TimeGrid) -> bool {
        let (h, k) = (self.step(), other.step());
        if ((h - k) / h).abs() > 1e-9 {
            return false;
        }
        let offset = (other.t0 - self.t0) / h;
        (offset - offset.round()).abs() <= LATTICE_TOL
    }

    /// Index offset of `inner` within `self`; `inner` must lie on the same
    /// lattice and inside `self`.
    pub fn locate(&self, inner: &TimeGrid) -> Result<usize> {
        if !self.same_lattice(inner) {
            return Err(Error::GridMismatch(format!(
                "grid [{}, {}] (h = {}) is not on the lattice of [{}, {}] (h = {})",
                inner.t0,
                inner.t1,
                inner.step(),
                self.t0,
                self.t1,
                self.step()
            )));
        }
        if inner.t0 < self.t0 - LATTICE_TOL * self.step() {
            return Err(Error::InsufficientSupport {
                required: inner.t0,
                available: self.t0,
            });
        }
        match self.index_of(inner.t0) {
            Some(lo) if lo + inner.n <= self.n => Ok(lo),
            _ => Err(Error::GridMismatch(format!(
                "[{}, {}] extends past the end {} of the path support",
                inner.t0, inner.t1, self.t1
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimeGrid::new(1.0, 1.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, f64::NAN, 3).is_err());
    }

    #[test]
    fn origin_on_two_sided_grid() {
        let g = TimeGrid::new(-2.0, 2.0, 40).unwrap();
        assert_eq!(g.origin_index(), Some(20));
        let g = TimeGrid::new(-1.0, 2.0, 4).unwrap();
        assert_eq!(g.origin_index(), None);
    }

    #[test]
    fn endpoints_are_exact() {
        let g = TimeGrid::new(-0.3, 0.7, 3).unwrap();
        assert_eq!(g.point(0), -0.3);
        assert_eq!(g.point(3), 0.7);
        let pts: Vec<f64> = g.points().collect();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn locate_sub_window() {
        let g = TimeGrid::with_step(-20.0, 0.25, 120).unwrap();
        let w = TimeGrid::new(0.0, 10.0, 40).unwrap();
        assert_eq!(g.locate(&w).unwrap(), 80);
        let off = TimeGrid::new(0.1, 10.1, 40).unwrap();
        assert!(g.locate(&off).is_err());
        let early = TimeGrid::new(-30.0, 0.0, 120).unwrap();
        assert!(matches!(g.locate(&early), Err(Error::InsufficientSupport { .. })));
    }
}
