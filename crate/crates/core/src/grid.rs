//! Uniform 2-D cell-centered grids.

use serde::{Deserialize, Serialize};

use crate::Error;

/// Grid geometry shared by every field of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridShape {
    pub nx: usize,
    pub ny: usize,
    /// Uniform spacing in both directions.
    pub dx: f64,
}

impl GridShape {
    pub fn new(nx: usize, ny: usize, dx: f64) -> Result<Self, Error> {
        if nx < 3 || ny < 3 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dx",
                value: dx,
            });
        }
        Ok(Self { nx, ny, dx })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Area of one cell.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    /// Domain measure `nx·dx · ny·dx`.
    pub fn area(&self) -> f64 {
        (self.nx as f64 * self.dx) * (self.ny as f64 * self.dx)
    }

    /// Row-major index of cell `(i, j)`, `i` along x.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Cell-center coordinates of `(i, j)`.
    #[inline]
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.dx, (j as f64 + 0.5) * self.dx)
    }
}

/// One scalar field sampled on a [`GridShape`], row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    shape: GridShape,
    values: Vec<f64>,
}

impl FieldGrid {
    pub fn zeros(shape: GridShape) -> Self {
        Self::constant(shape, 0.0)
    }

    pub fn constant(shape: GridShape, c: f64) -> Self {
        Self {
            shape,
            values: vec![c; shape.len()],
        }
    }

    pub fn from_values(shape: GridShape, values: Vec<f64>) -> Result<Self, Error> {
        if values.len() != shape.len() {
            return Err(Error::ShapeMismatch {
                expected: shape.len(),
                found: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index: idx });
        }
        Ok(Self { shape, values })
    }

    /// Samples `f(x, y)` at cell centers.
    pub fn from_fn(shape: GridShape, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(shape.len());
        for j in 0..shape.ny {
            for i in 0..shape.nx {
                let (x, y) = shape.center(i, j);
                values.push(f(x, y));
            }
        }
        Self { shape, values }
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.shape.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.shape.index(i, j);
        self.values[idx] = v;
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &FieldGrid) -> FieldGrid {
        debug_assert_eq!(self.shape, other.shape);
        FieldGrid {
            shape: self.shape,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> FieldGrid {
        FieldGrid {
            shape: self.shape,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &FieldGrid) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grids() {
        assert!(GridShape::new(2, 5, 1.0).is_err());
        assert!(GridShape::new(3, 3, 0.0).is_err());
        assert!(GridShape::new(3, 3, 1.0).is_ok());
    }

    #[test]
    fn area_is_cell_count_for_unit_spacing() {
        let s = GridShape::new(32, 32, 1.0).unwrap();
        assert_eq!(s.area(), 1024.0);
        let s = GridShape::new(64, 32, 0.5).unwrap();
        assert_eq!(s.area(), 512.0);
    }

    #[test]
    fn from_values_checks_len_and_finiteness() {
        let s = GridShape::new(3, 3, 1.0).unwrap();
        assert!(FieldGrid::from_values(s, vec![0.0; 8]).is_err());
        let mut v = vec![0.0; 9];
        v[4] = f64::NAN;
        assert!(matches!(
            FieldGrid::from_values(s, v),
            Err(Error::NonFiniteInput { index: 4 })
        ));
    }
}
