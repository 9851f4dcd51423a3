//! Time integrators for the method-of-lines systems.
//!
//! Two schemes are available: the classical explicit four-stage Runge-Kutta
//! method and the second-order backward differentiation formula. BDF2 is
//! started with one backward Euler step, solved by a modified Newton
//! iteration with a finite-difference Jacobian that is reused across steps
//! until convergence degrades.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A first-order system `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;

    /// Re-imposes held values (pinned displacements, fixed temperatures).
    fn constrain(&self, _t: f64, _y: &mut [f64]) {}

    /// Typical magnitude of each component, used for Newton tolerances and
    /// finite-difference increments.
    fn component_scales(&self) -> Vec<f64> {
        vec![1.0; self.dim()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Rk4,
    Bdf2,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::Rk4 => "rk4",
            Integrator::Bdf2 => "bdf2",
        }
    }
}

/// Newton controls for the implicit scheme.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub rtol: f64,
    pub atol_factor: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol_factor: 1e-9,
            max_iter: 8,
        }
    }
}

const MAX_SUBDIVISIONS: u32 = 10;

/// Integrator state carried between steps.
pub struct Stepper {
    kind: Integrator,
    newton: NewtonOptions,
    stages: [Vec<f64>; 4],
    scratch: Vec<f64>,
    prev: Option<(Vec<f64>, f64)>,
    jacobian: Option<CachedJacobian>,
    scales: Vec<f64>,
    /// Number of Jacobian evaluations, for diagnostics.
    pub jacobian_evaluations: usize,
}

struct CachedJacobian {
    lu: LU<f64, Dyn, Dyn>,
    gamma: f64,
}

impl Stepper {
    pub fn new<S: OdeSystem>(kind: Integrator, system: &S) -> Self {
        let n = system.dim();
        Self {
            kind,
            newton: NewtonOptions::default(),
            stages: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            scratch: vec![0.0; n],
            prev: None,
            jacobian: None,
            scales: system.component_scales(),
            jacobian_evaluations: 0,
        }
    }

    pub fn with_newton(mut self, newton: NewtonOptions) -> Self {
        self.newton = newton;
        self
    }

    pub fn kind(&self) -> Integrator {
        self.kind
    }

    /// Advances `y` from `t` to `t + dt`.
    pub fn step<S: OdeSystem>(&mut self, system: &S, t: f64, y: &mut [f64], dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::IntegrationAbort {
                time: t,
                reason: format!("non-positive time step {dt}"),
            });
        }
        match self.kind {
            Integrator::Rk4 => self.rk4(system, t, y, dt)?,
            Integrator::Bdf2 => self.bdf2_subdividing(system, t, y, dt, 0)?,
        }
        system.constrain(t + dt, y);
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::IntegrationAbort {
                time: t + dt,
                reason: format!("non-finite value in component {i} (time step too large for the stability bound?)"),
            });
        }
        Ok(())
    }

    fn rk4<S: OdeSystem>(&mut self, system: &S, t: f64, y: &mut [f64], dt: f64) -> Result<()> {
        let [k1, k2, k3, k4] = &mut self.stages;
        let tmp = &mut self.scratch;
        system.rhs(t, y, k1)?;
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        system.rhs(t + 0.5 * dt, tmp, k2)?;
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        system.rhs(t + 0.5 * dt, tmp, k3)?;
        for i in 0..y.len() {
            tmp[i] = y[i] + dt * k3[i];
        }
        system.rhs(t + dt, tmp, k4)?;
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(())
    }

    /// BDF2 step that halves the step (restarting from backward Euler) when
    /// the Newton solve fails, e.g. across a fast phase transformation.
    fn bdf2_subdividing<S: OdeSystem>(&mut self, system: &S, t: f64, y: &mut [f64], dt: f64, depth: u32) -> Result<()> {
        match self.bdf2(system, t, y, dt) {
            Err(_) if depth < MAX_SUBDIVISIONS => {
                self.bdf2_subdividing(system, t, y, 0.5 * dt, depth + 1)?;
                self.bdf2_subdividing(system, t + 0.5 * dt, y, 0.5 * dt, depth + 1)
            }
            other => other,
        }
    }

    fn bdf2<S: OdeSystem>(&mut self, system: &S, t: f64, y: &mut [f64], dt: f64) -> Result<()> {
        let n = y.len();
        // z - base - gamma f(t+dt, z) = 0
        let (base, gamma, guess) = match &self.prev {
            Some((prev, prev_dt)) if (prev_dt - dt).abs() <= 1e-12 * dt => {
                let base: Vec<f64> = (0..n).map(|i| (4.0 * y[i] - prev[i]) / 3.0).collect();
                let guess: Vec<f64> = (0..n).map(|i| 2.0 * y[i] - prev[i]).collect();
                (base, 2.0 / 3.0 * dt, guess)
            }
            _ => (y.to_vec(), dt, y.to_vec()),
        };
        let t_new = t + dt;
        let solution = match self.newton_solve(system, t_new, &base, gamma, &guess, false) {
            Ok(z) => z,
            Err(_) => self.newton_solve(system, t_new, &base, gamma, &guess, true)?,
        };
        self.prev = Some((y.to_vec(), dt));
        y.copy_from_slice(&solution);
        Ok(())
    }

    fn newton_solve<S: OdeSystem>(
        &mut self,
        system: &S,
        t: f64,
        base: &[f64],
        gamma: f64,
        guess: &[f64],
        force_jacobian: bool,
    ) -> Result<Vec<f64>> {
        let n = base.len();
        let mut z = guess.to_vec();
        system.constrain(t, &mut z);
        let stale = match &self.jacobian {
            Some(j) => (j.gamma - gamma).abs() > 1e-12 * gamma,
            None => true,
        };
        if force_jacobian || stale {
            self.refresh_jacobian(system, t, &z, gamma)?;
        }
        let mut f = vec![0.0; n];
        let mut previous_norm = f64::INFINITY;
        for _ in 0..self.newton.max_iter {
            system.rhs(t, &z, &mut f)?;
            let residual = DVector::from_iterator(n, (0..n).map(|i| -(z[i] - base[i] - gamma * f[i])));
            let jac = self.jacobian.as_ref().expect("jacobian present");
            let delta = jac.lu.solve(&residual).ok_or_else(|| Error::IntegrationAbort {
                time: t,
                reason: "singular Newton matrix".into(),
            })?;
            let mut norm = 0.0f64;
            for i in 0..n {
                z[i] += delta[i];
                let tol = self.newton.atol_factor * self.scales[i] + self.newton.rtol * z[i].abs();
                norm = norm.max(delta[i].abs() / tol);
            }
            if !norm.is_finite() {
                break;
            }
            if norm <= 1.0 {
                system.constrain(t, &mut z);
                return Ok(z);
            }
            if norm > previous_norm {
                break;
            }
            previous_norm = norm;
        }
        Err(Error::IntegrationAbort {
            time: t,
            reason: "Newton iteration did not converge".into(),
        })
    }

    fn refresh_jacobian<S: OdeSystem>(&mut self, system: &S, t: f64, z: &[f64], gamma: f64) -> Result<()> {
        let n = z.len();
        let mut f0 = vec![0.0; n];
        system.rhs(t, z, &mut f0)?;
        let mut m = DMatrix::<f64>::identity(n, n);
        let mut zp = z.to_vec();
        let mut fp = vec![0.0; n];
        for j in 0..n {
            let h = 1e-7 * z[j].abs().max(self.scales[j]);
            zp[j] = z[j] + h;
            system.rhs(t, &zp, &mut fp)?;
            zp[j] = z[j];
            for i in 0..n {
                let d = (fp[i] - f0[i]) / h;
                if d != 0.0 {
                    m[(i, j)] -= gamma * d;
                }
            }
        }
        self.jacobian = Some(CachedJacobian { lu: m.lu(), gamma });
        self.jacobian_evaluations += 1;
        Ok(())
    }
}
