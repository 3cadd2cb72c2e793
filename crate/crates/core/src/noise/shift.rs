use crate::error::{Error, Result};
use crate::noise::grid::TimeGrid;
use crate::noise::path::SamplePath;

/// Wiener shift `(θ_τ ω)(t) = ω(t + τ) - ω(τ)`, evaluated on the part of the
/// grid where both `t` and `t + τ` are sampled.
pub fn wiener_shift(path: &SamplePath, tau: f64) -> Result<SamplePath> {
    let grid = path.grid();
    let out_of_window = || Error::OutOfWindow {
        tau,
        t0: grid.t0(),
        t1: grid.t1(),
    };
    let h = grid.step();
    let k = (tau / h).round();
    if ((tau / h) - k).abs() > 1e-7 {
        return Err(Error::InvalidParameter(format!(
            "shift {tau} is not a multiple of the grid step {h}"
        )));
    }
    let anchor = grid.index_of(tau).ok_or_else(out_of_window)?;
    let k = k as i64;
    let n = grid.n() as i64;
    // indices i with both i and i + k in 0..=n
    let lo = 0.max(-k);
    let hi = n.min(n - k);
    if hi <= lo {
        return Err(out_of_window());
    }
    let (lo, hi) = (lo as usize, hi as usize);
    let out_grid = if k == 0 {
        *grid
    } else {
        TimeGrid::new(grid.point(lo), grid.point(hi), hi - lo)?
    };
    let d = path.dim();
    let base = path.state(anchor).to_vec();
    let mut values = Vec::with_capacity(out_grid.len() * d);
    for i in lo..=hi {
        let src = (i as i64 + k) as usize;
        values.extend(path.state(src).iter().zip(&base).map(|(v, b)| v - b));
    }
    SamplePath::new(out_grid, d, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_is_identity() {
        let g = TimeGrid::new(-1.0, 1.0, 10).unwrap();
        let p = SamplePath::from_fn(g, |t| t * t * t);
        assert_eq!(wiener_shift(&p, 0.0).unwrap(), p);
    }

    #[test]
    fn shift_by_one_step() {
        let g = TimeGrid::new(0.0, 2.0, 2).unwrap();
        let p = SamplePath::scalar(g, vec![0.0, 1.0, 3.0]).unwrap();
        let s = wiener_shift(&p, 1.0).unwrap();
        assert_eq!(s.values(), &[0.0, 2.0]);
        assert_eq!(s.grid().t0(), 0.0);
        assert_eq!(s.grid().t1(), 1.0);
    }

    #[test]
    fn negative_shift_and_origin() {
        let g = TimeGrid::new(-2.0, 2.0, 8).unwrap();
        let p = SamplePath::from_fn(g, |t| t.sin());
        let s = wiener_shift(&p, -1.0).unwrap();
        assert_eq!(s.grid().t0(), -1.0);
        assert_eq!(s.grid().t1(), 2.0);
        let i0 = s.origin_index().unwrap();
        assert_eq!(s.value(i0), 0.0);
    }

    #[test]
    fn out_of_window() {
        let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let p = SamplePath::from_fn(g, |t| t);
        assert!(matches!(wiener_shift(&p, 2.0), Err(Error::OutOfWindow { .. })));
        assert!(matches!(wiener_shift(&p, 1.0), Err(Error::OutOfWindow { .. })));
    }
}
