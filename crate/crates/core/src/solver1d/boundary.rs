use serde::{Deserialize, Serialize};

use super::forcing::SourceSpec;
use crate::error::{invalid, Result};

/// Mechanical end conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanicalBc {
    /// `s(0) = s(L) = 0`.
    StressFree,
    /// `u(0) = u(L) = 0`.
    Pinned,
    /// `s(0) = 0`, `u(L) = 0`.
    Mixed,
}

impl MechanicalBc {
    pub fn left_free(&self) -> bool {
        matches!(self, MechanicalBc::StressFree | MechanicalBc::Mixed)
    }

    pub fn right_free(&self) -> bool {
        matches!(self, MechanicalBc::StressFree)
    }
}

/// Thermal end conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThermalBc {
    /// Zero flux at both ends.
    Insulated,
    /// Zero gradient at `x = 0`, `-k theta_x(L) = beta (theta(L) - ambient(t))`.
    ControlledFlux { beta: f64, ambient: SourceSpec },
    /// Both end temperatures held at `value`.
    FixedTheta { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub mechanical: MechanicalBc,
    pub thermal: ThermalBc,
}

impl BoundarySpec {
    pub fn pinned_insulated() -> Self {
        Self {
            mechanical: MechanicalBc::Pinned,
            thermal: ThermalBc::Insulated,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.thermal {
            ThermalBc::ControlledFlux { beta, .. } if !(*beta >= 0.0 && beta.is_finite()) => Err(invalid(
                "boundary.thermal.beta",
                format!("must be non-negative, got {beta}"),
            )),
            ThermalBc::FixedTheta { value } if !(*value > 0.0 && value.is_finite()) => Err(invalid(
                "boundary.thermal.value",
                format!("held temperature must be positive, got {value}"),
            )),
            _ => Ok(()),
        }
    }
}
