use super::grid::Grid1D;
use crate::error::{invalid, Result};

/// Nodal fields of the bar plus the midpoint stress.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Displacement, cm.
    pub u: Vec<f64>,
    /// Velocity, cm/ms.
    pub v: Vec<f64>,
    /// Temperature, K.
    pub theta: Vec<f64>,
    /// Temperature rate, K/ms; present only with a positive relaxation time.
    pub theta_dot: Option<Vec<f64>>,
    /// Stress at the cell midpoints, g/(cm ms^2).
    pub s: Vec<f64>,
}

impl FieldState {
    /// Undeformed bar at rest at uniform temperature.
    pub fn at_rest(grid: &Grid1D, theta: f64, with_rate: bool) -> Self {
        let n = grid.num_nodes();
        Self {
            u: vec![0.0; n],
            v: vec![0.0; n],
            theta: vec![theta; n],
            theta_dot: with_rate.then(|| vec![0.0; n]),
            s: vec![0.0; grid.nx],
        }
    }

    pub fn validate(&self, grid: &Grid1D) -> Result<()> {
        let n = grid.num_nodes();
        if self.u.len() != n || self.v.len() != n || self.theta.len() != n {
            return Err(invalid("state", format!("nodal arrays must have {n} entries")));
        }
        if self.theta_dot.as_ref().is_some_and(|w| w.len() != n) {
            return Err(invalid("state.theta_dot", format!("must have {n} entries")));
        }
        if self.s.len() != grid.nx {
            return Err(invalid("state.s", format!("must have {} entries", grid.nx)));
        }
        if let Some(bad) = self.theta.iter().find(|th| !(**th > 0.0)) {
            return Err(invalid(
                "state.theta",
                format!("temperatures must be positive, found {bad}"),
            ));
        }
        Ok(())
    }

    /// Strain at the midpoints.
    pub fn strain(&self, grid: &Grid1D) -> Vec<f64> {
        let dx = grid.dx();
        self.u.windows(2).map(|w| (w[1] - w[0]) / dx).collect()
    }

    pub fn max_abs_strain(&self, grid: &Grid1D) -> f64 {
        self.strain(grid).iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Midpoint values averaged onto the nodes; the end nodes take their single
/// neighbour.
pub fn midpoints_to_nodes(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..=n)
        .map(|i| match i {
            0 => values[0],
            i if i == n => values[n - 1],
            i => 0.5 * (values[i - 1] + values[i]),
        })
        .collect()
}
