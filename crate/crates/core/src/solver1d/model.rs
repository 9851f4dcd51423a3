use super::boundary::{BoundarySpec, ThermalBc};
use super::forcing::Forcing;
use super::grid::Grid1D;
use super::state::FieldState;
use crate::constitutive::MaterialParams1D;
use crate::error::{invalid, Error, Result};
use crate::ode::OdeSystem;

/// Semi-discrete 1D model: grid, material, end conditions and forcing.
///
/// The packed unknown vector is `[u, v, theta]` (plus `theta_dot` when
/// `tau0 > 0`), each block holding `nx + 1` nodal values.
#[derive(Debug, Clone)]
pub struct Model1D {
    pub grid: Grid1D,
    pub params: MaterialParams1D,
    pub bcs: BoundarySpec,
    pub forcing: Forcing,
    /// `+1` adds `gamma u_xxxx` to the momentum balance; `-1` subtracts it.
    pub ginsburg_sign: f64,
}

/// Time derivatives of the nodal fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_dot: Option<Vec<f64>>,
}

/// Quantities at the midpoints and nodes shared by the rhs and the stress.
struct Kinematics {
    eps: Vec<f64>,
    eps_dot: Vec<f64>,
    theta_rate: Vec<f64>,
    stress: Vec<f64>,
}

impl Model1D {
    pub fn new(grid: Grid1D, params: MaterialParams1D, bcs: BoundarySpec, forcing: Forcing) -> Result<Self> {
        params.validate()?;
        bcs.validate()?;
        if params.gamma != 0.0 && grid.nx < 6 {
            return Err(invalid(
                "grid.nx",
                "the fourth-difference closure needs at least 6 cells",
            ));
        }
        Ok(Self {
            grid,
            params,
            bcs,
            forcing,
            ginsburg_sign: 1.0,
        })
    }

    pub fn with_negated_ginsburg(mut self, negate: bool) -> Self {
        self.ginsburg_sign = if negate { -1.0 } else { 1.0 };
        self
    }

    /// Whether the thermal relaxation time is active (second order in time).
    pub fn relaxing(&self) -> bool {
        self.params.tau0 > 0.0
    }

    fn blocks(&self) -> usize {
        if self.relaxing() {
            4
        } else {
            3
        }
    }

    pub fn pack(&self, state: &FieldState) -> Result<Vec<f64>> {
        state.validate(&self.grid)?;
        let mut y = Vec::with_capacity(self.dim());
        y.extend_from_slice(&state.u);
        y.extend_from_slice(&state.v);
        y.extend_from_slice(&state.theta);
        if self.relaxing() {
            match &state.theta_dot {
                Some(w) => y.extend_from_slice(w),
                None => y.extend(std::iter::repeat_n(0.0, self.grid.num_nodes())),
            }
        }
        Ok(y)
    }

    /// Rebuilds the field state from a packed vector, recomputing the stress.
    pub fn unpack(&self, t: f64, y: &[f64]) -> Result<FieldState> {
        let n = self.grid.num_nodes();
        let kin = self.kinematics(t, y)?;
        Ok(FieldState {
            u: y[..n].to_vec(),
            v: y[n..2 * n].to_vec(),
            theta: y[2 * n..3 * n].to_vec(),
            theta_dot: self.relaxing().then(|| y[3 * n..4 * n].to_vec()),
            s: kin.stress,
        })
    }

    /// Time derivatives of every nodal field at time `t`.
    pub fn rhs(&self, state: &FieldState, t: f64) -> Result<Derivatives> {
        let y = self.pack(state)?;
        let mut dy = vec![0.0; y.len()];
        self.evaluate(t, &y, &mut dy)?;
        let n = self.grid.num_nodes();
        Ok(Derivatives {
            u: dy[..n].to_vec(),
            v: dy[n..2 * n].to_vec(),
            theta: dy[2 * n..3 * n].to_vec(),
            theta_dot: self.relaxing().then(|| dy[3 * n..].to_vec()),
        })
    }

    /// Total stress at the midpoints, including the rate terms when enabled.
    pub fn compute_stress(&self, state: &FieldState, t: f64) -> Result<Vec<f64>> {
        let y = self.pack(state)?;
        Ok(self.kinematics(t, &y)?.stress)
    }

    /// Total energy: kinetic part by the trapezoidal rule on the nodes,
    /// internal energy on the cells (temperature averaged to the midpoint,
    /// which is the trapezoidal rule for the thermal part).
    pub fn energy_budget(&self, state: &FieldState) -> f64 {
        let p = &self.params;
        let dx = self.grid.dx();
        let n = self.grid.nx;
        let kinetic: f64 = state
            .v
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * 0.5 * p.rho * v * v
            })
            .sum::<f64>()
            * dx;
        let internal: f64 = (0..n)
            .map(|j| {
                let eps = (state.u[j + 1] - state.u[j]) / dx;
                let theta = 0.5 * (state.theta[j] + state.theta[j + 1]);
                p.rho * p.internal_energy(theta, eps)
            })
            .sum::<f64>()
            * dx;
        kinetic + internal
    }

    /// Pointwise conduction entropy production `k theta_x^2 / theta` at the
    /// nodes (Fourier regime only).
    pub fn conduction_entropy_production(&self, state: &FieldState) -> Result<Vec<f64>> {
        if self.relaxing() {
            return Err(invalid(
                "tau0",
                "conduction entropy production needs the Fourier regime (tau0 = 0)",
            ));
        }
        state.validate(&self.grid)?;
        let th = &state.theta;
        let n = self.grid.nx;
        let dx = self.grid.dx();
        Ok((0..=n)
            .map(|i| {
                let grad = match i {
                    0 => (-3.0 * th[0] + 4.0 * th[1] - th[2]) / (2.0 * dx),
                    i if i == n => (3.0 * th[n] - 4.0 * th[n - 1] + th[n - 2]) / (2.0 * dx),
                    i => (th[i + 1] - th[i - 1]) / (2.0 * dx),
                };
                self.params.conductivity(th[i]) * grad * grad / th[i]
            })
            .collect())
    }

    /// Largest step for which explicit RK4 is linearly stable about `state`.
    ///
    /// With wave speed `c = sqrt(max|ds/deps| / rho)`, diffusivity
    /// `D = max k / C_v` and viscous diffusivity `mu / rho`, the bound is
    /// `0.9 * min(sqrt(2) dx / c, 0.696 dx^2 / D, 0.696 dx^2 rho / mu)`;
    /// `2 sqrt(2)` and `2.785` are the RK4 stability limits on the imaginary
    /// and negative real axes.
    pub fn stable_dt(&self, state: &FieldState) -> f64 {
        let p = &self.params;
        let dx = self.grid.dx();
        let eps = state.strain(&self.grid);
        let mut stiffness: f64 = 0.0;
        let mut k_max: f64 = 0.0;
        for (e, th) in eps.iter().zip(state.theta.windows(2)) {
            let theta = 0.5 * (th[0] + th[1]);
            stiffness = stiffness.max(p.tangent_stiffness(theta, *e).abs());
            k_max = k_max.max(p.conductivity(theta).abs());
        }
        // Fourth-difference operator adds gamma*16/dx^4 to the squared frequency.
        let omega2 = 4.0 * stiffness / (p.rho * dx * dx) + p.gamma.abs() * 16.0 / (p.rho * dx.powi(4));
        let mut bound = f64::INFINITY;
        if omega2 > 0.0 {
            bound = bound.min(2.0 * 2f64.sqrt() / omega2.sqrt());
        }
        if k_max > 0.0 {
            bound = bound.min(2.785 * p.cv * dx * dx / (4.0 * k_max));
        }
        if p.mu > 0.0 {
            bound = bound.min(2.785 * p.rho * dx * dx / (4.0 * p.mu));
        }
        0.9 * bound
    }

    fn check_temperatures(&self, t: f64, theta: &[f64]) -> Result<()> {
        match theta.iter().position(|th| !(*th > 0.0)) {
            Some(i) => Err(Error::IntegrationAbort {
                time: t,
                reason: format!("non-positive temperature {} K at node {i}", theta[i]),
            }),
            None => Ok(()),
        }
    }

    /// Discrete `d/dx (k theta_x)` at the nodes with the thermal end closures.
    fn conduction(&self, t: f64, theta: &[f64]) -> Vec<f64> {
        let n = self.grid.nx;
        let dx = self.grid.dx();
        // Heat flux q = -k theta_x at the midpoints.
        let flux: Vec<f64> = (0..n)
            .map(|j| {
                let k = self.params.conductivity(0.5 * (theta[j] + theta[j + 1]));
                -k * (theta[j + 1] - theta[j]) / dx
            })
            .collect();
        let right_flux = match &self.bcs.thermal {
            ThermalBc::ControlledFlux { beta, ambient } => beta * (theta[n] - ambient.eval(t)),
            _ => 0.0,
        };
        let mut out = vec![0.0; n + 1];
        out[0] = -2.0 * flux[0] / dx;
        for i in 1..n {
            out[i] = -(flux[i] - flux[i - 1]) / dx;
        }
        out[n] = -2.0 * (right_flux - flux[n - 1]) / dx;
        if matches!(self.bcs.thermal, ThermalBc::FixedTheta { .. }) {
            out[0] = 0.0;
            out[n] = 0.0;
        }
        out
    }

    /// Fourth difference of `u` at the nodes: five-point centred stencil in
    /// the interior, six-point one-sided second-order closures next to and at
    /// the ends.
    fn fourth_difference(&self, u: &[f64]) -> Vec<f64> {
        const EDGE: [f64; 6] = [3.0, -14.0, 26.0, -24.0, 11.0, -2.0];
        const NEAR_EDGE: [f64; 6] = [2.0, -9.0, 16.0, -14.0, 6.0, -1.0];
        let n = self.grid.nx;
        let h4 = self.grid.dx().powi(4);
        let one_sided = |coeffs: &[f64; 6], from_left: bool| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * if from_left { u[k] } else { u[n - k] })
                .sum::<f64>()
                / h4
        };
        let mut out = vec![0.0; n + 1];
        out[0] = one_sided(&EDGE, true);
        out[1] = one_sided(&NEAR_EDGE, true);
        for i in 2..n - 1 {
            out[i] = (u[i - 2] - 4.0 * u[i - 1] + 6.0 * u[i] - 4.0 * u[i + 1] + u[i + 2]) / h4;
        }
        out[n - 1] = one_sided(&NEAR_EDGE, false);
        out[n] = one_sided(&EDGE, false);
        out
    }

    /// Strain, strain rate, temperature rate and total stress. With `tau0 = 0`
    /// the temperature rate solves the energy balance pointwise:
    /// `theta_t (C_v - nu eps_t) = G + (k theta_x)_x + k1 theta eps eps_t + mu eps_t^2`.
    fn kinematics(&self, t: f64, y: &[f64]) -> Result<Kinematics> {
        let p = &self.params;
        let n = self.grid.nx;
        let nn = n + 1;
        let dx = self.grid.dx();
        let (u, rest) = y.split_at(nn);
        let (v, rest) = rest.split_at(nn);
        let theta = &rest[..nn];
        self.check_temperatures(t, theta)?;

        let eps: Vec<f64> = (0..n).map(|j| (u[j + 1] - u[j]) / dx).collect();
        let eps_dot: Vec<f64> = (0..n).map(|j| (v[j + 1] - v[j]) / dx).collect();

        let theta_rate = if self.relaxing() {
            rest[nn..2 * nn].to_vec()
        } else {
            let cond = self.conduction(t, theta);
            let fixed = matches!(self.bcs.thermal, ThermalBc::FixedTheta { .. });
            let mut rate = vec![0.0; nn];
            for i in 0..nn {
                if fixed && (i == 0 || i == n) {
                    continue;
                }
                let x = self.grid.node(i);
                let coupling = node_average(i, n, |j| eps[j] * eps_dot[j]);
                let viscous = node_average(i, n, |j| eps_dot[j] * eps_dot[j]);
                let mean_rate = node_average(i, n, |j| eps_dot[j]);
                let capacity = p.cv - p.nu * mean_rate;
                if !(capacity > 0.0) {
                    return Err(Error::IntegrationAbort {
                        time: t,
                        reason: format!("effective heat capacity C_v - nu*eps_t is non-positive at node {i}"),
                    });
                }
                rate[i] =
                    (self.forcing.heat.eval(x, t) + cond[i] + p.k1 * theta[i] * coupling + p.mu * viscous) / capacity;
            }
            rate
        };

        let stress: Vec<f64> = (0..n)
            .map(|j| {
                let th = 0.5 * (theta[j] + theta[j + 1]);
                let th_rate = 0.5 * (theta_rate[j] + theta_rate[j + 1]);
                p.equilibrium_stress(th, eps[j]) + p.mu * eps_dot[j] + p.nu * th_rate
            })
            .collect();

        Ok(Kinematics {
            eps,
            eps_dot,
            theta_rate,
            stress,
        })
    }

    fn evaluate(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let p = &self.params;
        let n = self.grid.nx;
        let nn = n + 1;
        let dx = self.grid.dx();
        let kin = self.kinematics(t, y)?;
        let u = &y[..nn];
        let v = &y[nn..2 * nn];
        let theta = &y[2 * nn..3 * nn];
        let s = &kin.stress;

        let ginsburg = (p.gamma != 0.0).then(|| self.fourth_difference(u));
        let left_free = self.bcs.mechanical.left_free();
        let right_free = self.bcs.mechanical.right_free();

        let (du, rest) = dydt.split_at_mut(nn);
        let (dv, rest) = rest.split_at_mut(nn);
        let (dtheta, rest) = rest.split_at_mut(nn);

        for i in 0..nn {
            let held = (i == 0 && !left_free) || (i == n && !right_free);
            if held {
                du[i] = 0.0;
                dv[i] = 0.0;
                continue;
            }
            du[i] = v[i];
            let divergence = match i {
                0 => 2.0 * s[0] / dx,
                i if i == n => -2.0 * s[n - 1] / dx,
                i => (s[i] - s[i - 1]) / dx,
            };
            let mut force = divergence + self.forcing.body.eval(self.grid.node(i), t);
            if let Some(g4) = &ginsburg {
                force += self.ginsburg_sign * p.gamma * g4[i];
            }
            dv[i] = force / p.rho;
        }

        dtheta.copy_from_slice(&kin.theta_rate);

        if self.relaxing() {
            let w = &kin.theta_rate;
            let dw = &mut rest[..nn];
            let eps = &kin.eps;
            let eps_dot = &kin.eps_dot;
            let eps_ddot: Vec<f64> = (0..n).map(|j| (dv[j + 1] - dv[j]) / dx).collect();
            let cond = self.conduction(t, theta);
            let fixed = matches!(self.bcs.thermal, ThermalBc::FixedTheta { .. });
            let tau0 = p.tau0;
            for i in 0..nn {
                if fixed && (i == 0 || i == n) {
                    dw[i] = 0.0;
                    continue;
                }
                let avg = |f: &dyn Fn(usize) -> f64| node_average(i, n, f);
                let e_ed = avg(&|j| eps[j] * eps_dot[j]);
                let ed_ed = avg(&|j| eps_dot[j] * eps_dot[j]);
                let e_edd = avg(&|j| eps[j] * eps_ddot[j]);
                let ed_edd = avg(&|j| eps_dot[j] * eps_ddot[j]);
                let ed = avg(&|j| eps_dot[j]);
                let edd = avg(&|j| eps_ddot[j]);
                let heat = self.forcing.heat.eval(self.grid.node(i), t);
                let thermoelastic = p.k1 * (theta[i] * e_ed + tau0 * (w[i] * e_ed + theta[i] * (ed_ed + e_edd)));
                let viscous = p.mu * (ed_ed + 2.0 * tau0 * ed_edd);
                let rate_coupling = p.nu * (w[i] * ed + tau0 * w[i] * edd);
                let capacity = tau0 * (p.cv - p.nu * ed);
                if !(capacity > 0.0) {
                    return Err(Error::IntegrationAbort {
                        time: t,
                        reason: format!("effective heat capacity C_v - nu*eps_t is non-positive at node {i}"),
                    });
                }
                dw[i] = (heat + cond[i] + thermoelastic + viscous + rate_coupling - p.cv * w[i]) / capacity;
            }
        }
        Ok(())
    }

    /// Imposes held displacements and temperatures on a packed vector.
    pub fn apply_constraints(&self, y: &mut [f64]) {
        let n = self.grid.nx;
        let nn = n + 1;
        if !self.bcs.mechanical.left_free() {
            y[0] = 0.0;
            y[nn] = 0.0;
        }
        if !self.bcs.mechanical.right_free() {
            y[n] = 0.0;
            y[nn + n] = 0.0;
        }
        if let ThermalBc::FixedTheta { value } = self.bcs.thermal {
            y[2 * nn] = value;
            y[2 * nn + n] = value;
            if self.relaxing() {
                y[3 * nn] = 0.0;
                y[3 * nn + n] = 0.0;
            }
        }
    }
}

/// Average of a midpoint quantity onto node `i`; end nodes use their single
/// neighbouring cell. Paired with trapezoidal weights this makes the discrete
/// thermoelastic exchange cancel the mechanical work exactly.
fn node_average(i: usize, n: usize, f: impl Fn(usize) -> f64) -> f64 {
    match i {
        0 => f(0),
        i if i == n => f(n - 1),
        i => 0.5 * (f(i - 1) + f(i)),
    }
}

impl OdeSystem for Model1D {
    fn dim(&self) -> usize {
        self.blocks() * self.grid.num_nodes()
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        self.evaluate(t, y, dydt)
    }

    fn constrain(&self, _t: f64, y: &mut [f64]) {
        self.apply_constraints(y);
    }

    fn component_scales(&self) -> Vec<f64> {
        let nn = self.grid.num_nodes();
        let mut scales = Vec::with_capacity(self.dim());
        scales.extend(std::iter::repeat_n(1e-2 * self.grid.length, nn));
        scales.extend(std::iter::repeat_n(1.0, nn));
        scales.extend(std::iter::repeat_n(100.0, nn));
        if self.relaxing() {
            scales.extend(std::iter::repeat_n(10.0, nn));
        }
        scales
    }
}
