//! One-dimensional Landau-Devonshire thermodynamics of a shape-memory alloy.
//!
//! Units follow the cgs-millisecond-Kelvin system: lengths in cm, masses in g,
//! times in ms, temperatures in K. Stresses are in g/(cm ms^2) and energy
//! densities per unit mass in cm^2/ms^2.
//!
//! The solver works with the density-absorbed coefficients `cv = rho*a1`,
//! `k1 = rho*a2`, `k2 = rho*a4`, `k3 = rho*a6`; the per-mass `a_i` forms are
//! derived accessors.
//!
//! Note on units: parameter tables for this alloy often quote `k2` and `k3` in
//! g/(ms^2 cm K), but the corresponding stress terms carry no temperature
//! factor, so both are stored here in g/(ms^2 cm).

use crate::error::{invalid, Error, Result};

/// Constitutive and transport constants of the 1D model.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams1D {
    /// Mass density, g/cm^3.
    pub rho: f64,
    /// Heat capacity `C_v = rho*a1`, g/(ms^2 cm K).
    pub cv: f64,
    /// Reference thermal conductivity, cm g/(ms^3 K).
    pub k0: f64,
    /// Slope of the conductivity law `k = k0 (1 + beta_tilde*theta)`, 1/K.
    pub beta_tilde: f64,
    /// Transition reference temperature, K.
    pub theta1: f64,
    /// Coefficient of the temperature-dependent quadratic term, g/(ms^2 cm K).
    pub k1: f64,
    /// Quartic coefficient, g/(ms^2 cm).
    pub k2: f64,
    /// Sextic coefficient, g/(ms^2 cm).
    pub k3: f64,
    /// Mechanical viscosity `mu = rho*mu_tilde`, g/(cm ms).
    pub mu: f64,
    /// Thermomechanical rate coefficient `nu = rho*nu_tilde`, g/(cm ms K).
    pub nu: f64,
    /// Thermal relaxation time of the Cattaneo-Vernotte flux, ms.
    pub tau0: f64,
    /// Ginsburg (strain-gradient) coefficient.
    pub gamma: f64,
    /// Additive internal-energy offset, cm^2/ms^2. Only differences matter.
    pub alpha0: f64,
}

impl MaterialParams1D {
    /// Cu-based core used for the thermally and mechanically driven rod runs.
    /// All dissipative and relaxation terms are off.
    pub fn cu_based() -> Self {
        Self {
            rho: 11.1,
            cv: 29.0,
            k0: 1.9e-2,
            beta_tilde: 0.0,
            theta1: 208.0,
            k1: 480.0,
            k2: 6.0e6,
            k3: 4.5e8,
            mu: 0.0,
            nu: 0.0,
            tau0: 0.0,
            gamma: 0.0,
            alpha0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("cv", self.cv),
            ("k0", self.k0),
            ("theta1", self.theta1),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {value}")));
            }
        }
        let non_negative = [("k2", self.k2), ("k3", self.k3), ("tau0", self.tau0), ("mu", self.mu)];
        for (name, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be non-negative and finite, got {value}")));
            }
        }
        for (name, value) in [
            ("k1", self.k1),
            ("nu", self.nu),
            ("gamma", self.gamma),
            ("alpha0", self.alpha0),
            ("beta_tilde", self.beta_tilde),
        ] {
            if !value.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn alpha1(&self) -> f64 {
        self.cv / self.rho
    }

    pub fn alpha2(&self) -> f64 {
        self.k1 / self.rho
    }

    pub fn alpha4(&self) -> f64 {
        self.k2 / self.rho
    }

    pub fn alpha6(&self) -> f64 {
        self.k3 / self.rho
    }

    /// Helmholtz free energy per unit mass,
    /// `psi0(theta) + psi1(theta) psi2(eps) + psi3(eps)`.
    pub fn free_energy(&self, theta: f64, eps: f64) -> Result<f64> {
        check_theta(theta)?;
        let thermal = self.alpha0 - self.alpha1() * theta * theta.ln();
        let shape_memory = 0.5 * self.alpha2() * theta * eps * eps;
        Ok(thermal + shape_memory + self.mechanical_energy(eps))
    }

    /// Strain-only part `psi3(eps)` of the free energy, per unit mass.
    pub fn mechanical_energy(&self, eps: f64) -> f64 {
        let e2 = eps * eps;
        -0.5 * self.alpha2() * self.theta1 * e2 - 0.25 * self.alpha4() * e2 * e2 + self.alpha6() * e2 * e2 * e2 / 6.0
    }

    /// Equilibrium stress `k1 (theta - theta1) eps - k2 eps^3 + k3 eps^5`.
    pub fn equilibrium_stress(&self, theta: f64, eps: f64) -> f64 {
        let e2 = eps * eps;
        eps * (self.k1 * (theta - self.theta1) - self.k2 * e2 + self.k3 * e2 * e2)
    }

    /// Tangent stiffness `d(equilibrium_stress)/d(eps)`.
    pub fn tangent_stiffness(&self, theta: f64, eps: f64) -> f64 {
        let e2 = eps * eps;
        self.k1 * (theta - self.theta1) - 3.0 * self.k2 * e2 + 5.0 * self.k3 * e2 * e2
    }

    /// Equilibrium stress plus the rate contributions `mu*eps_dot + nu*theta_dot`.
    pub fn total_stress(&self, st: &ThermoState) -> f64 {
        self.equilibrium_stress(st.theta, st.eps) + self.mu * st.eps_dot + self.nu * st.theta_dot
    }

    /// Entropy per unit mass, `a1 (1 + ln theta) - a2 eps^2 / 2`.
    pub fn entropy(&self, theta: f64, eps: f64) -> Result<f64> {
        check_theta(theta)?;
        Ok(self.alpha1() * (1.0 + theta.ln()) - 0.5 * self.alpha2() * eps * eps)
    }

    /// Internal energy per unit mass, `a0 + a1 theta + psi3(eps)`.
    pub fn internal_energy(&self, theta: f64, eps: f64) -> f64 {
        self.alpha0 + self.alpha1() * theta + self.mechanical_energy(eps)
    }

    /// Thermal conductivity `k0 (1 + beta_tilde*theta)`.
    pub fn conductivity(&self, theta: f64) -> f64 {
        self.k0 * (1.0 + self.beta_tilde * theta)
    }
}

impl Default for MaterialParams1D {
    fn default() -> Self {
        Self::cu_based()
    }
}

/// Local thermomechanical state at a material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub theta: f64,
    pub eps: f64,
    pub theta_dot: f64,
    pub eps_dot: f64,
}

impl ThermoState {
    pub fn new(theta: f64, eps: f64, theta_dot: f64, eps_dot: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(1.0 + eps > 0.0) {
            return Err(invalid("eps", format!("1 + eps must be positive, got eps = {eps}")));
        }
        Ok(Self {
            theta,
            eps,
            theta_dot,
            eps_dot,
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(theta))
    }
}
