//! Rectangular sample windows, row-major value grids, and affine slice planes
//! (2-real-parameter charts into C^2) shared by the renderers.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Closed rectangle `[x0, x1] x [y0, y1]` in slice coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Window> {
        let w = Window { x0, x1, y0, y1 };
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite())
            || x1 <= x0
            || y1 <= y0
        {
            return Err(Error::BadWindow);
        }
        Ok(w)
    }

    pub fn square(half_side: f64) -> Result<Window> {
        Window::new(-half_side, half_side, -half_side, half_side)
    }

    /// i-th of n samples along `[lo, hi]`, endpoints included (midpoint if n = 1).
    pub fn coord(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
        if n <= 1 {
            return 0.5 * (lo + hi);
        }
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }

    pub fn x_coord(&self, i: usize, n: usize) -> f64 {
        Window::coord(self.x0, self.x1, i, n)
    }

    pub fn y_coord(&self, j: usize, n: usize) -> f64 {
        Window::coord(self.y0, self.y1, j, n)
    }
}

/// Row-major grid of per-pixel values; row 0 is y0 (bottom of the window).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_rows(width: usize, height: usize, data: Vec<T>) -> Grid<T> {
        assert_eq!(data.len(), width * height);
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, col: usize, row: usize) -> &T {
        &self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.width)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Affine chart `(x, y) -> origin + x * ex + y * ey` from R^2 into C^2.
///
/// The default rendering chart fixes z2 and lets (x, y) run over the complex
/// z1 plane; that slice stays away from the forward indeterminacy direction
/// (reached only along z2 -> infinity with z1 fixed).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePlane {
    pub origin: [Complex64; 2],
    pub ex: [Complex64; 2],
    pub ey: [Complex64; 2],
}

impl SlicePlane {
    pub fn new(origin: [Complex64; 2], ex: [Complex64; 2], ey: [Complex64; 2]) -> Result<SlicePlane> {
        let finite = |v: &[Complex64; 2]| v[0].is_finite() && v[1].is_finite();
        if !(finite(&origin) && finite(&ex) && finite(&ey)) {
            return Err(Error::NonFinitePoint);
        }
        if (ex[0].norm() == 0.0 && ex[1].norm() == 0.0)
            || (ey[0].norm() == 0.0 && ey[1].norm() == 0.0)
        {
            return Err(Error::ZeroDirection);
        }
        Ok(SlicePlane { origin, ex, ey })
    }

    /// Complex z1 line `{z2 = c}`: x + iy is the z1 coordinate.
    pub fn z1_plane(z2: Complex64) -> SlicePlane {
        SlicePlane {
            origin: [Complex64::new(0.0, 0.0), z2],
            ex: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ey: [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        }
    }

    /// Real points `(x, y)` of C^2 (the classical real Hénon picture).
    pub fn real_plane() -> SlicePlane {
        SlicePlane {
            origin: [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            ex: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ey: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn point(&self, x: f64, y: f64) -> [Complex64; 2] {
        [
            self.origin[0] + x * self.ex[0] + y * self.ey[0],
            self.origin[1] + x * self.ex[1] + y * self.ey[1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_validation_and_sampling() {
        assert!(Window::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(Window::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        let w = Window::new(-3.0, 3.0, 0.0, 1.0).unwrap();
        assert_eq!(w.x_coord(0, 4), -3.0);
        assert_eq!(w.x_coord(3, 4), 3.0);
        assert_eq!(w.y_coord(0, 1), 0.5);
        let mid = w.x_coord(2, 5);
        assert!((mid - 0.0).abs() < 1e-15);
    }

    #[test]
    fn grid_indexing_is_row_major() {
        let g = Grid::from_rows(3, 2, vec![0, 1, 2, 10, 11, 12]);
        assert_eq!(*g.get(0, 0), 0);
        assert_eq!(*g.get(2, 0), 2);
        assert_eq!(*g.get(0, 1), 10);
        assert_eq!(g.rows().nth(1).unwrap(), &[10, 11, 12]);
        let doubled = g.map(|v| v * 2);
        assert_eq!(*doubled.get(2, 1), 24);
    }

    #[test]
    fn slice_planes_chart_the_expected_points() {
        let p = SlicePlane::z1_plane(Complex64::new(0.5, -0.5)).point(1.0, 2.0);
        assert_eq!(p[0], Complex64::new(1.0, 2.0));
        assert_eq!(p[1], Complex64::new(0.5, -0.5));
        let q = SlicePlane::real_plane().point(-1.5, 0.25);
        assert_eq!(q[0], Complex64::new(-1.5, 0.0));
        assert_eq!(q[1], Complex64::new(0.25, 0.0));
        assert!(SlicePlane::new(
            [Complex64::new(0.0, 0.0); 2],
            [Complex64::new(0.0, 0.0); 2],
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        )
        .is_err());
    }
}
