//! Manufactured solution for convergence checks.
//!
//! `u = a sin(kx) sin(wt)`, `theta = theta_mean + b cos(kx)` with `k = pi/L`,
//! compatible with pinned, insulated ends. The body force and heat supply
//! are chosen so that these fields solve the full 1D balance laws exactly.

use super::forcing::{Forcing, Source};
use super::grid::Grid1D;
use super::state::FieldState;
use crate::constitutive::MaterialParams1D;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    /// Displacement amplitude `a`, cm.
    pub amplitude: f64,
    /// Angular frequency `w`, rad/ms.
    pub omega: f64,
    /// Mean temperature, K.
    pub theta_mean: f64,
    /// Temperature amplitude `b`, K.
    pub theta_amplitude: f64,
    pub length: f64,
}

/// Exact pointwise kinematics of the manufactured fields.
struct Exact {
    theta: f64,
    theta_x: f64,
    theta_xx: f64,
    eps: f64,
    eps_x: f64,
    eps_t: f64,
    eps_xt: f64,
    eps_tt: f64,
    u: f64,
    u_tt: f64,
}

impl ManufacturedSolution {
    pub fn kappa(&self) -> f64 {
        PI / self.length
    }

    pub fn displacement(&self, x: f64, t: f64) -> f64 {
        self.amplitude * (self.kappa() * x).sin() * (self.omega * t).sin()
    }

    pub fn velocity(&self, x: f64, t: f64) -> f64 {
        self.amplitude * self.omega * (self.kappa() * x).sin() * (self.omega * t).cos()
    }

    pub fn temperature(&self, x: f64) -> f64 {
        self.theta_mean + self.theta_amplitude * (self.kappa() * x).cos()
    }

    pub fn strain(&self, x: f64, t: f64) -> f64 {
        self.amplitude * self.kappa() * (self.kappa() * x).cos() * (self.omega * t).sin()
    }

    fn exact(&self, x: f64, t: f64) -> Exact {
        let (a, k, w, b) = (self.amplitude, self.kappa(), self.omega, self.theta_amplitude);
        let (sx, cx) = (k * x).sin_cos();
        let (st, ct) = (w * t).sin_cos();
        Exact {
            theta: self.theta_mean + b * cx,
            theta_x: -b * k * sx,
            theta_xx: -b * k * k * cx,
            eps: a * k * cx * st,
            eps_x: -a * k * k * sx * st,
            eps_t: a * k * w * cx * ct,
            eps_xt: -a * k * k * w * sx * ct,
            eps_tt: -a * k * w * w * cx * st,
            u: a * sx * st,
            u_tt: -a * w * w * sx * st,
        }
    }

    /// Body force making the momentum balance exact.
    pub fn body_force(&self, p: &MaterialParams1D, ginsburg_sign: f64, x: f64, t: f64) -> f64 {
        let e = self.exact(x, t);
        let stress_x = p.k1 * e.theta_x * e.eps + p.tangent_stiffness(e.theta, e.eps) * e.eps_x + p.mu * e.eps_xt;
        let u_xxxx = self.kappa().powi(4) * e.u;
        p.rho * e.u_tt - stress_x - ginsburg_sign * p.gamma * u_xxxx
    }

    /// Heat supply making the energy balance exact (the temperature is steady).
    pub fn heat_supply(&self, p: &MaterialParams1D, x: f64, t: f64) -> f64 {
        let e = self.exact(x, t);
        let tau0 = p.tau0;
        let thermoelastic = p.k1 * e.theta * (e.eps * e.eps_t + tau0 * (e.eps_t * e.eps_t + e.eps * e.eps_tt));
        let viscous = p.mu * (e.eps_t * e.eps_t + 2.0 * tau0 * e.eps_t * e.eps_tt);
        let conduction = p.conductivity(e.theta) * e.theta_xx + p.k0 * p.beta_tilde * e.theta_x * e.theta_x;
        -thermoelastic - viscous - conduction
    }

    pub fn forcing(&self, params: &MaterialParams1D, ginsburg_sign: f64) -> Forcing {
        let (ms, p) = (*self, params.clone());
        let (ms2, p2) = (*self, params.clone());
        Forcing {
            body: Source::field(move |x, t| ms.body_force(&p, ginsburg_sign, x, t)),
            heat: Source::field(move |x, t| ms2.heat_supply(&p2, x, t)),
        }
    }

    /// Exact nodal fields at time `t` (stress left at zero).
    pub fn state(&self, grid: &Grid1D, t: f64, with_rate: bool) -> FieldState {
        let mut st = FieldState::at_rest(grid, self.theta_mean, with_rate);
        for (i, x) in grid.nodes().enumerate() {
            st.u[i] = self.displacement(x, t);
            st.v[i] = self.velocity(x, t);
            st.theta[i] = self.temperature(x);
        }
        st
    }
}
