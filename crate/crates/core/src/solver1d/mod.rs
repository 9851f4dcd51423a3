//! Staggered-grid method-of-lines solver for the coupled 1D
//! thermoviscoelastic system.
//!
//! Layout: displacement `u`, velocity `v`, temperature `theta` (and the
//! auxiliary rate `theta_dot` when the thermal relaxation time is positive)
//! live at the `nx + 1` nodes; strain and stress live at the `nx` cell
//! midpoints. Every difference operator is centred and second order.

mod boundary;
mod forcing;
mod grid;
pub mod mms;
mod model;
mod simulate;
mod state;

pub use boundary::{BoundarySpec, MechanicalBc, ThermalBc};
pub use forcing::{Forcing, Source, SourceSpec};
pub use grid::Grid1D;
pub use model::{Derivatives, Model1D};
pub use simulate::{simulate, Diagnostics, RunSettings, Snapshot, Trajectory};
pub use state::{midpoints_to_nodes, FieldState};
