//! Rectangular `(t, z)` grids and value surfaces shared by the PDE solvers,
//! the tabulated strategy and the plotting front end.

use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform grid on `[0, t_max] x [z_min, z_max]` with `nz` spatial nodes
/// (both ends included) and `nt` time steps, so surfaces carry `nt + 1` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T: Real> {
    z_min: T,
    z_max: T,
    nz: usize,
    nt: usize,
    t_max: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(z_min: T, z_max: T, nz: usize, nt: usize, t_max: T) -> Result<Self> {
        if !(z_max > z_min) {
            return Err(Error::InvalidParameter(format!(
                "z_max must exceed z_min, got [{z_min}, {z_max}]"
            )));
        }
        if nz < 3 {
            return Err(Error::InvalidParameter(format!(
                "nz must be >= 3, got {nz}"
            )));
        }
        if nt < 1 {
            return Err(Error::InvalidParameter(format!(
                "nt must be >= 1, got {nt}"
            )));
        }
        if !(t_max > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be > 0, got {t_max}"
            )));
        }
        Ok(Grid1D {
            z_min,
            z_max,
            nz,
            nt,
            t_max,
        })
    }

    pub fn z_min(&self) -> T {
        self.z_min
    }

    pub fn z_max(&self) -> T {
        self.z_max
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn dz(&self) -> T {
        (self.z_max - self.z_min) / T::of((self.nz - 1) as f64)
    }

    pub fn dt(&self) -> T {
        self.t_max / T::of(self.nt as f64)
    }

    pub fn z_at(&self, j: usize) -> T {
        self.z_min + self.dz() * T::of(j as f64)
    }

    pub fn t_at(&self, k: usize) -> T {
        self.dt() * T::of(k as f64)
    }

    /// Grid refined by `space_factor` in `z` and `time_factor` in `t`.
    pub fn refined(&self, space_factor: usize, time_factor: usize) -> Result<Self> {
        Grid1D::new(
            self.z_min,
            self.z_max,
            (self.nz - 1) * space_factor + 1,
            self.nt * time_factor,
            self.t_max,
        )
    }
}

/// Values on a [`Grid1D`], stored densely row-major: row `k` holds time
/// `k * dt`, column `j` holds `z_min + j * dz`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface<T: Real> {
    grid: Grid1D<T>,
    values: Vec<T>,
}

impl<T: Real> Surface<T> {
    /// Wraps a dense value array; every entry must be finite.
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        let expected = (grid.nt + 1) * grid.nz;
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "surface needs {expected} values ({} rows x {} cols), got {}",
                grid.nt + 1,
                grid.nz,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite surface value at row {} col {}",
                bad / grid.nz,
                bad % grid.nz
            )));
        }
        Ok(Surface { grid, values })
    }

    /// Builds a surface by evaluating `f(t, z)` at every node.
    pub fn tabulate(grid: Grid1D<T>, mut f: impl FnMut(T, T) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity((grid.nt + 1) * grid.nz);
        for k in 0..=grid.nt {
            let t = grid.t_at(k);
            for j in 0..grid.nz {
                values.push(f(t, grid.z_at(j)));
            }
        }
        Surface::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn value(&self, row: usize, col: usize) -> T {
        self.values[row * self.grid.nz + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.values[row * self.grid.nz..(row + 1) * self.grid.nz]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(*v))
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, v| m.max(*v))
    }

    /// Bilinear interpolation with `(t, z)` clamped to the grid hull, which
    /// keeps tabulated strategies globally bounded.
    pub fn bilinear_clamped(&self, t: T, z: T) -> T {
        let g = &self.grid;
        let tt = t.max(T::zero()).min(g.t_max);
        let zz = z.max(g.z_min).min(g.z_max);
        let ft = (tt / g.dt()).to_f64_lossy();
        let fz = ((zz - g.z_min) / g.dz()).to_f64_lossy();
        let k = (ft.floor() as usize).min(g.nt - 1);
        let j = (fz.floor() as usize).min(g.nz - 2);
        let wt = (ft - k as f64).clamp(0.0, 1.0);
        let wz = (fz - j as f64).clamp(0.0, 1.0);
        let (wt, wz) = (T::of(wt), T::of(wz));
        let one = T::one();
        (one - wt) * ((one - wz) * self.value(k, j) + wz * self.value(k, j + 1))
            + wt * ((one - wz) * self.value(k + 1, j) + wz * self.value(k + 1, j + 1))
    }

    /// Maximum absolute difference against another surface on the same grid.
    pub fn sup_distance(&self, other: &Surface<T>) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(
                "surfaces live on different grids".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(0.0, 2.0, 5, 4, 1.0).unwrap()
    }

    #[test]
    fn grid_spacing() {
        let g = grid();
        assert_eq!(g.dz(), 0.5);
        assert_eq!(g.dt(), 0.25);
        assert_eq!(g.z_at(4), 2.0);
        assert_eq!(g.t_at(4), 1.0);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 0.0, 5, 4, 1.0).is_err());
        assert!(Grid1D::new(0.0, 1.0, 2, 4, 1.0).is_err());
        assert!(Grid1D::new(0.0, 1.0, 5, 0, 1.0).is_err());
        assert!(Grid1D::new(0.0, 1.0, 5, 4, 0.0).is_err());
    }

    #[test]
    fn surface_rejects_wrong_shape_and_non_finite() {
        let g = grid();
        assert!(Surface::new(g, vec![0.0; 7]).is_err());
        let mut v = vec![0.0; 25];
        v[13] = f64::NAN;
        assert!(matches!(Surface::new(g, v), Err(Error::Numerical(_))));
    }

    #[test]
    fn bilinear_reproduces_affine_functions() {
        let g = grid();
        let s = Surface::tabulate(g, |t, z| 2.0 * t - 3.0 * z + 1.0).unwrap();
        for &(t, z) in &[(0.1, 0.2), (0.6, 1.9), (0.25, 0.5), (1.0, 2.0)] {
            let exact = 2.0 * t - 3.0 * z + 1.0;
            assert!((s.bilinear_clamped(t, z) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_clamps_outside_hull() {
        let g = grid();
        let s = Surface::tabulate(g, |t, z| t + z).unwrap();
        assert_eq!(s.bilinear_clamped(-1.0, -5.0), 0.0);
        assert_eq!(s.bilinear_clamped(9.0, 9.0), 3.0);
    }
}
