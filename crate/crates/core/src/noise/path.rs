use crate::error::{Error, Result};
use crate::noise::grid::TimeGrid;

/// Values of a `dim`-dimensional path on a uniform grid, stored row-major
/// (`values[i * dim + j]` is component `j` at grid point `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("path dimension must be positive".into()));
        }
        if values.len() != grid.len() * dim {
            return Err(Error::GridMismatch(format!(
                "{} values do not fill {} points of dimension {dim}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, dim, values })
    }

    pub fn scalar(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, dim: 1, values }
    }

    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        Self {
            grid,
            dim: dim.max(1),
            values: vec![0.0; grid.len() * dim.max(1)],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Scalar value at point `i` (first component for vector paths).
    pub fn value(&self, i: usize) -> f64 {
        self.values[i * self.dim]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn time(&self, i: usize) -> f64 {
        self.grid.point(i)
    }

    pub fn origin_index(&self) -> Option<usize> {
        self.grid.origin_index()
    }

    /// Value at lattice time `t`.
    pub fn at(&self, t: f64) -> Option<&[f64]> {
        self.grid.index_of(t).map(|i| self.state(i))
    }

    /// Restriction to the sub-window `window`, which must lie on this path's lattice.
    pub fn restrict(&self, window: &TimeGrid) -> Result<SamplePath> {
        let lo = self.grid.locate(window)?;
        let d = self.dim;
        Ok(SamplePath {
            grid: *window,
            dim: d,
            values: self.values[lo * d..(lo + window.len()) * d].to_vec(),
        })
    }

    /// Keeps every `stride`-th point.
    pub fn subsample(&self, stride: usize) -> Result<SamplePath> {
        let grid = self.grid.coarsen(stride)?;
        let d = self.dim;
        let values = (0..grid.len())
            .flat_map(|i| self.state(i * stride).iter().copied())
            .collect::<Vec<_>>();
        debug_assert_eq!(values.len(), grid.len() * d);
        Ok(SamplePath { grid, dim: d, values })
    }

    pub fn component(&self, j: usize) -> SamplePath {
        let values = (0..self.len()).map(|i| self.values[i * self.dim + j]).collect();
        SamplePath {
            grid: self.grid,
            dim: 1,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SamplePath {
        SamplePath {
            grid: self.grid,
            dim: self.dim,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a * self + b * other` on a shared grid.
    pub fn combine(&self, a: f64, other: &SamplePath, b: f64) -> Result<SamplePath> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::GridMismatch("paths live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(SamplePath {
            grid: self.grid,
            dim: self.dim,
            values,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `sup_i |self_i - other_i|` (Euclidean norm per point) over a shared grid.
    pub fn sup_distance(&self, other: &SamplePath) -> Result<f64> {
        if self.grid.len() != other.grid.len() || self.dim != other.dim {
            return Err(Error::GridMismatch("paths live on different grids".into()));
        }
        Ok((0..self.len())
            .map(|i| crate::linalg::distance(self.state(i), other.state(i)))
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrict_and_subsample() {
        let g = TimeGrid::new(-1.0, 1.0, 8).unwrap();
        let p = SamplePath::from_fn(g, |t| 2.0 * t);
        let w = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let r = p.restrict(&w).unwrap();
        assert_eq!(r.values(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        let c = p.subsample(2).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.value(2), 0.0);
        assert!(p.subsample(3).is_err());
    }

    #[test]
    fn length_is_checked() {
        let g = TimeGrid::new(0.0, 1.0, 2).unwrap();
        assert!(SamplePath::new(g, 2, vec![0.0; 5]).is_err());
        assert!(SamplePath::new(g, 2, vec![0.0; 6]).is_ok());
    }
}
