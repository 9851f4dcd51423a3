//! Heat-flux constitutive laws in one dimension: Fourier, the Cattaneo-Vernotte
//! relaxation law `tau0 dq/dt + q = -k grad(theta)`, and its first-order
//! generalised approximation.

use crate::error::{invalid, Result};

/// Flux and the temperature gradient driving it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxState {
    /// Heat flux, g/ms^3.
    pub q: f64,
    /// Temperature gradient, K/cm.
    pub grad_theta: f64,
}

/// Fourier law `q = -k grad(theta)`.
pub fn fourier_flux(k: f64, grad_theta: f64) -> f64 {
    -k * grad_theta
}

/// Advances the Cattaneo-Vernotte law over `dt` holding the gradient fixed.
///
/// The update is the exact solution for a piecewise-constant gradient:
/// `q <- q e^(-dt/tau0) + (-k grad)(1 - e^(-dt/tau0))`.
pub fn cattaneo_step(q: f64, grad_theta: f64, k: f64, tau0: f64, dt: f64) -> Result<f64> {
    if !(tau0 > 0.0) {
        return Err(invalid(
            "tau0",
            format!("relaxation time must be positive (use the Fourier law for tau0 = 0), got {tau0}"),
        ));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let decay = (-dt / tau0).exp();
    let target = fourier_flux(k, grad_theta);
    // -expm1 keeps 1 - e^(-x) accurate for tiny dt/tau0.
    Ok(q * decay + target * -(-dt / tau0).exp_m1())
}

impl FluxState {
    pub fn relax(self, k: f64, tau0: f64, dt: f64) -> Result<Self> {
        Ok(Self {
            q: cattaneo_step(self.q, self.grad_theta, k, tau0, dt)?,
            ..self
        })
    }
}

/// Generalised flux `q = -k grad(theta) - alpha d(k grad(theta))/dt`.
pub fn generalized_flux(k: f64, grad_theta: f64, d_dt_of_k_grad_theta: f64, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(invalid("alpha", format!("must be non-negative, got {alpha}")));
    }
    Ok(fourier_flux(k, grad_theta) - alpha * d_dt_of_k_grad_theta)
}
