use crate::error::{invalid, Result};

/// Uniform staggered grid on `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    /// Bar length, cm.
    pub length: f64,
    /// Number of cells.
    pub nx: usize,
}

impl Grid1D {
    pub fn new(length: f64, nx: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("grid.length", format!("must be positive, got {length}")));
        }
        if nx < 4 {
            return Err(invalid("grid.nx", format!("need at least 4 cells, got {nx}")));
        }
        Ok(Self { length, nx })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn num_nodes(&self) -> usize {
        self.nx + 1
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.nx).map(move |i| self.node(i))
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(move |j| self.midpoint(j))
    }
}
