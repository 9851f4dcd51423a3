//! Reduced model of a thin slab: longitudinal waves with a quintic
//! temperature-dependent stress-strain law, the beam equation for bending,
//! and a mean-temperature equation, all in terms of cross-slab averages
//! `U1, U2, V1, V2, Theta'` (with `Theta' = theta - 300`).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ode::{Integrator, OdeSystem, Stepper};

/// Reference temperature of the reduced model, K.
pub const THETA_REF: f64 = 300.0;

/// Coefficient table of the reduced slab model (cgs-ms-K units). Names give
/// the term each constant multiplies; signs are folded into the values.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabCoefficients {
    // Longitudinal momentum, rho V1_t = ...
    /// `U1xx` (linear wave stiffness).
    pub wave: f64,
    /// `b^2 U1xxxx` (dispersion).
    pub dispersion: f64,
    /// `Theta' U1x` inside the stress flux.
    pub flux_theta_u: f64,
    /// `Theta'^2 U1x` inside the stress flux.
    pub flux_theta2_u: f64,
    /// `U1x^3` inside the stress flux.
    pub flux_u3: f64,
    /// `Theta' U1x^3` inside the stress flux.
    pub flux_theta_u3: f64,
    /// `U1x^5` inside the stress flux.
    pub flux_u5: f64,
    /// `b^2 V1x^2 U1x` inside the stress flux.
    pub flux_v2_u: f64,
    /// `b^2 Theta' V1x^2 U1x` inside the stress flux.
    pub flux_theta_v2_u: f64,
    /// `b^4 V1x^4 U1x` inside the stress flux.
    pub flux_v4_u: f64,
    /// `b^2 V1x^2 U1x^3` inside the stress flux.
    pub flux_v2_u3: f64,
    // Bending, rho V2_t = ...
    /// `b^2 U2xxxx`.
    pub bending: f64,
    // Mean temperature, C_v Theta'_t = kappa Theta'_xx + ...
    /// `U1x V1x`.
    pub heat_uv: f64,
    /// `Theta' U1x V1x`.
    pub heat_theta_uv: f64,
    /// `Theta'^2 U1x V1x`.
    pub heat_theta2_uv: f64,
    /// `V1x U1x^3`.
    pub heat_v_u3: f64,
    /// `Theta' V1x U1x^3`.
    pub heat_theta_v_u3: f64,
    /// `b^2 V1x^3 U1x`.
    pub heat_v3_u: f64,
    /// `b^2 Theta' V1x^3 U1x`.
    pub heat_theta_v3_u: f64,
    /// `V1x U1x^5`.
    pub heat_v_u5: f64,
    /// `b^2 V1x^3 U1x^3`.
    pub heat_v3_u3: f64,
    /// `b^4 V1x^5 U1x`.
    pub heat_v5_u: f64,
    /// `b^2 U1xx V1xx`.
    pub heat_uxx_vxx: f64,
    /// `b^2 U2xx V2xx`.
    pub heat_bending: f64,
    /// `b^2 d^2/dx^2 (U1x V1x)`.
    pub heat_curvature: f64,
    // Cross-slab reconstruction.
    /// `Y b U1x` in `u2` (Poisson contraction).
    pub poisson: f64,
    /// `Theta' Y b U1x` in `u2`.
    pub poisson_theta: f64,
    /// `(3Y^2 - 1) b^2 U_xx` in `u1` and `u2`.
    pub warp: f64,
    /// `Y b U1x^3` in `u2`.
    pub contraction_u3: f64,
    /// `(3Y - Y^3) b^3 V1x^2 U1x` in `u2`.
    pub contraction_v2_u: f64,
    /// `(3Y - Y^3) b^3 (V1x U2xx + U1x V2xx)` in `theta`.
    pub theta_bending: f64,
    /// `(7 - 30Y^2 + 15Y^4) V1x^3 U1x` in `theta`.
    pub theta_v3_u: f64,
}

impl SlabCoefficients {
    /// The Cu-based coefficient table.
    pub fn cu_based() -> Self {
        Self {
            wave: 2.97e6,
            dispersion: 8.03e5,
            flux_theta_u: 922.0,
            flux_theta2_u: -0.0145,
            flux_u3: -4.28e9,
            flux_theta_u3: 1.31e7,
            flux_u5: 7.12e11,
            flux_v2_u: 2820.0,
            flux_theta_v2_u: -8.80,
            flux_v4_u: 1.24,
            flux_v2_u3: -5.42e4,
            bending: -9.91e5,
            heat_uv: 2.77e5,
            heat_theta_uv: 914.0,
            heat_theta2_uv: -9.25,
            heat_v_u3: 3.94e9,
            heat_theta_v_u3: 1.26e7,
            heat_v3_u: -57.3,
            heat_theta_v3_u: -0.0117,
            heat_v_u5: 1.68e12,
            heat_v3_u3: -1.58e6,
            heat_v5_u: -0.0203,
            heat_uxx_vxx: 1.63e4,
            heat_bending: 9.22e4,
            heat_curvature: -8151.0,
            poisson: -0.9,
            poisson_theta: 3.05e-5,
            warp: 0.15,
            contraction_u3: -141.0,
            contraction_v2_u: 1.00e-4,
            theta_bending: -2.43e6,
            theta_v3_u: -25.1,
        }
    }

    fn all(&self) -> [f64; 32] {
        [
            self.wave,
            self.dispersion,
            self.flux_theta_u,
            self.flux_theta2_u,
            self.flux_u3,
            self.flux_theta_u3,
            self.flux_u5,
            self.flux_v2_u,
            self.flux_theta_v2_u,
            self.flux_v4_u,
            self.flux_v2_u3,
            self.bending,
            self.heat_uv,
            self.heat_theta_uv,
            self.heat_theta2_uv,
            self.heat_v_u3,
            self.heat_theta_v_u3,
            self.heat_v3_u,
            self.heat_theta_v3_u,
            self.heat_v_u5,
            self.heat_v3_u3,
            self.heat_v5_u,
            self.heat_uxx_vxx,
            self.heat_bending,
            self.heat_curvature,
            self.poisson,
            self.poisson_theta,
            self.warp,
            self.contraction_u3,
            self.contraction_v2_u,
            self.theta_bending,
            self.theta_v3_u,
        ]
    }
}

impl Default for SlabCoefficients {
    fn default() -> Self {
        Self::cu_based()
    }
}

/// Slab geometry and material.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabParams {
    /// Half-thickness, cm.
    pub b: f64,
    /// Density, g/cm^3.
    pub rho: f64,
    /// Specific heat per unit volume, g/(ms^2 cm K).
    pub cv: f64,
    /// Thermal conductivity, g cm/(ms^3 K).
    pub kappa: f64,
    pub coeffs: SlabCoefficients,
}

impl SlabParams {
    pub fn cu_based(b: f64) -> Self {
        Self {
            b,
            rho: 11.1,
            cv: 29.0,
            kappa: 1.9e-2,
            coeffs: SlabCoefficients::cu_based(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("slab.b", self.b), ("slab.rho", self.rho), ("slab.cv", self.cv)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {value}")));
            }
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(invalid(
                "slab.kappa",
                format!("must be non-negative, got {}", self.kappa),
            ));
        }
        if self.coeffs.all().iter().any(|c| !c.is_finite() || *c == 0.0) {
            return Err(invalid("slab.coeffs", "every coefficient must be finite and non-zero"));
        }
        Ok(())
    }

    /// Smallest grid spacing for which the discrete linear longitudinal
    /// operator is non-negative. The dispersion term is anti-diffusive, so
    /// finer grids resolve wavenumbers where the truncated model is unstable.
    pub fn min_dx(&self) -> f64 {
        2.0 * self.b * (self.coeffs.dispersion / self.coeffs.wave).sqrt()
    }
}

/// End conditions along the slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlabEnds {
    Periodic,
    /// `U = V = 0` with odd reflection of the displacements, even reflection
    /// (zero flux) of the temperature.
    PinnedInsulated,
}

/// Uniform grid along the slab. Periodic domains store `cells` nodes
/// (the node at `x = length` is node 0); pinned domains store `cells + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabDomain {
    pub length: f64,
    pub cells: usize,
    pub ends: SlabEnds,
}

impl SlabDomain {
    pub fn new(length: f64, cells: usize, ends: SlabEnds) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("grid.length", format!("must be positive, got {length}")));
        }
        if cells < 4 {
            return Err(invalid("grid.nx", format!("need at least 4 cells, got {cells}")));
        }
        Ok(Self { length, cells, ends })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn num_nodes(&self) -> usize {
        match self.ends {
            SlabEnds::Periodic => self.cells,
            SlabEnds::PinnedInsulated => self.cells + 1,
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_nodes()).map(move |i| self.node(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlabState {
    /// Mean longitudinal displacement, cm.
    pub u1: Vec<f64>,
    /// Mean transverse displacement, cm.
    pub u2: Vec<f64>,
    /// Mean longitudinal velocity, cm/ms.
    pub v1: Vec<f64>,
    /// Mean transverse velocity, cm/ms.
    pub v2: Vec<f64>,
    /// Mean temperature minus 300 K.
    pub theta: Vec<f64>,
}

impl SlabState {
    pub fn uniform(domain: &SlabDomain, u1: f64, u2: f64, theta: f64) -> Self {
        let n = domain.num_nodes();
        Self {
            u1: vec![u1; n],
            u2: vec![u2; n],
            v1: vec![0.0; n],
            v2: vec![0.0; n],
            theta: vec![theta; n],
        }
    }

    pub fn validate(&self, domain: &SlabDomain) -> Result<()> {
        let n = domain.num_nodes();
        if [&self.u1, &self.u2, &self.v1, &self.v2, &self.theta]
            .iter()
            .any(|f| f.len() != n)
        {
            return Err(invalid("state", format!("slab fields must have {n} entries")));
        }
        if let Some(bad) = self.theta.iter().find(|t| !(**t > -THETA_REF)) {
            return Err(invalid(
                "state.theta",
                format!("Theta' must exceed -300 K, found {bad}"),
            ));
        }
        Ok(())
    }

    fn pack(&self) -> Vec<f64> {
        [&self.u1, &self.u2, &self.v1, &self.v2, &self.theta]
            .iter()
            .flat_map(|f| f.iter().copied())
            .collect()
    }

    fn unpack(y: &[f64], n: usize) -> Self {
        Self {
            u1: y[..n].to_vec(),
            u2: y[n..2 * n].to_vec(),
            v1: y[2 * n..3 * n].to_vec(),
            v2: y[3 * n..4 * n].to_vec(),
            theta: y[4 * n..5 * n].to_vec(),
        }
    }
}

/// Time derivatives `(U1_t, U2_t, V1_t, V2_t, Theta'_t)`.
pub type SlabDerivatives = SlabState;

#[derive(Clone, Copy)]
enum Parity {
    Odd,
    Even,
}

/// Field view with ghost values supplied by the end conditions.
struct Ghosted<'a> {
    values: &'a [f64],
    domain: &'a SlabDomain,
    parity: Parity,
}

impl Ghosted<'_> {
    fn at(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        match self.domain.ends {
            SlabEnds::Periodic => self.values[i.rem_euclid(n) as usize],
            SlabEnds::PinnedInsulated => {
                let last = n - 1;
                let (j, flipped) = if i < 0 {
                    (-i, true)
                } else if i > last {
                    (2 * last - i, true)
                } else {
                    (i, false)
                };
                let v = self.values[j as usize];
                match (flipped, self.parity) {
                    (true, Parity::Odd) => -v,
                    _ => v,
                }
            }
        }
    }

    fn d1(&self, i: isize, dx: f64) -> f64 {
        (self.at(i + 1) - self.at(i - 1)) / (2.0 * dx)
    }

    fn d2(&self, i: isize, dx: f64) -> f64 {
        ((self.at(i + 1) - self.at(i)) - (self.at(i) - self.at(i - 1))) / (dx * dx)
    }

    fn d4(&self, i: isize, dx: f64) -> f64 {
        // Written in differences so constant fields give exactly zero.
        let step = |k: isize| self.at(k) - self.at(k + 1);
        (step(i - 2) - 3.0 * step(i - 1) + 3.0 * step(i) - step(i + 1)) / dx.powi(4)
    }
}

struct Fields<'a> {
    u1: Ghosted<'a>,
    u2: Ghosted<'a>,
    v1: Ghosted<'a>,
    v2: Ghosted<'a>,
    theta: Ghosted<'a>,
}

impl<'a> Fields<'a> {
    fn new(state: &'a SlabState, domain: &'a SlabDomain) -> Self {
        let g = |values: &'a [f64], parity| Ghosted { values, domain, parity };
        Self {
            u1: g(&state.u1, Parity::Odd),
            u2: g(&state.u2, Parity::Odd),
            v1: g(&state.v1, Parity::Odd),
            v2: g(&state.v2, Parity::Odd),
            theta: g(&state.theta, Parity::Even),
        }
    }
}

/// Longitudinal stress flux (everything under the x-derivative, including
/// the linear wave term) at the midpoint between nodes `j` and `j + 1`.
fn longitudinal_flux(p: &SlabParams, f: &Fields, j: isize, dx: f64) -> f64 {
    let c = &p.coeffs;
    let b2 = p.b * p.b;
    let ux = (f.u1.at(j + 1) - f.u1.at(j)) / dx;
    let vx = (f.v1.at(j + 1) - f.v1.at(j)) / dx;
    let th = 0.5 * (f.theta.at(j) + f.theta.at(j + 1));
    let (ux2, vx2) = (ux * ux, vx * vx);
    c.wave * ux
        + (c.flux_theta_u * th + c.flux_theta2_u * th * th) * ux
        + (c.flux_u3 + c.flux_theta_u3 * th) * ux2 * ux
        + c.flux_u5 * ux2 * ux2 * ux
        + (c.flux_v2_u + c.flux_theta_v2_u * th) * b2 * vx2 * ux
        + c.flux_v4_u * b2 * b2 * vx2 * vx2 * ux
        + c.flux_v2_u3 * b2 * vx2 * ux2 * ux
}

/// Right-hand side of the reduced slab model at every stored node.
pub fn slab_rhs(params: &SlabParams, domain: &SlabDomain, state: &SlabState) -> Result<SlabDerivatives> {
    let n = domain.num_nodes();
    let dx = domain.dx();
    let c = &params.coeffs;
    let (b2, b4) = (params.b * params.b, params.b.powi(4));
    let f = Fields::new(state, domain);
    let mut d = SlabState {
        u1: state.v1.clone(),
        u2: state.v2.clone(),
        v1: vec![0.0; n],
        v2: vec![0.0; n],
        theta: vec![0.0; n],
    };
    let product = |i: isize| f.u1.d1(i, dx) * f.v1.d1(i, dx);
    for i in 0..n {
        let k = i as isize;
        let flux_div = (longitudinal_flux(params, &f, k, dx) - longitudinal_flux(params, &f, k - 1, dx)) / dx;
        d.v1[i] = (flux_div + c.dispersion * b2 * f.u1.d4(k, dx)) / params.rho;
        d.v2[i] = c.bending * b2 * f.u2.d4(k, dx) / params.rho;

        let th = f.theta.at(k);
        let ux = f.u1.d1(k, dx);
        let vx = f.v1.d1(k, dx);
        let (ux2, vx2) = (ux * ux, vx * vx);
        let source = (c.heat_uv + c.heat_theta_uv * th + c.heat_theta2_uv * th * th) * ux * vx
            + (c.heat_v_u3 + c.heat_theta_v_u3 * th) * vx * ux2 * ux
            + (c.heat_v3_u + c.heat_theta_v3_u * th) * b2 * vx2 * vx * ux
            + c.heat_v_u5 * vx * ux2 * ux2 * ux
            + c.heat_v3_u3 * b2 * vx2 * vx * ux2 * ux
            + c.heat_v5_u * b4 * vx2 * vx2 * vx * ux
            + c.heat_uxx_vxx * b2 * f.u1.d2(k, dx) * f.v1.d2(k, dx)
            + c.heat_bending * b2 * f.u2.d2(k, dx) * f.v2.d2(k, dx)
            + c.heat_curvature * b2 * (product(k + 1) - 2.0 * product(k) + product(k - 1)) / (dx * dx);
        d.theta[i] = (params.kappa * f.theta.d2(k, dx) + source) / params.cv;
    }
    if domain.ends == SlabEnds::PinnedInsulated {
        for i in [0, n - 1] {
            d.u1[i] = 0.0;
            d.u2[i] = 0.0;
            d.v1[i] = 0.0;
            d.v2[i] = 0.0;
        }
    }
    let all = [&d.u1, &d.u2, &d.v1, &d.v2, &d.theta];
    if all.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
        return Err(Error::IntegrationAbort {
            time: f64::NAN,
            reason: "non-finite slab derivative".into(),
        });
    }
    Ok(d)
}

/// Cross-slab fields at scaled transverse coordinate `Y = y/b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabSlice {
    pub y: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// Absolute temperature, K.
    pub theta: Vec<f64>,
}

pub fn reconstruct_fields(params: &SlabParams, domain: &SlabDomain, state: &SlabState, y: f64) -> Result<SlabSlice> {
    if !(y.abs() <= 1.0) {
        return Err(invalid(
            "Y",
            format!("transverse coordinate must lie in [-1, 1], got {y}"),
        ));
    }
    state.validate(domain)?;
    let c = &params.coeffs;
    let b = params.b;
    let dx = domain.dx();
    let f = Fields::new(state, domain);
    let warp = c.warp * (3.0 * y * y - 1.0) * b * b;
    let odd = (3.0 * y - y.powi(3)) * b.powi(3);
    let quartic = 7.0 - 30.0 * y * y + 15.0 * y.powi(4);
    let n = domain.num_nodes();
    let mut slice = SlabSlice {
        y,
        u1: Vec::with_capacity(n),
        u2: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
    };
    for i in 0..n as isize {
        let th = f.theta.at(i);
        let (u1x, v1x) = (f.u1.d1(i, dx), f.v1.d1(i, dx));
        let (u1xx, u2xx, v2xx) = (f.u1.d2(i, dx), f.u2.d2(i, dx), f.v2.d2(i, dx));
        slice.u1.push(f.u1.at(i) - y * b * f.u2.d1(i, dx) + warp * u1xx);
        slice.u2.push(
            f.u2.at(i)
                + (c.poisson + c.poisson_theta * th) * y * b * u1x
                + warp * u2xx
                + c.contraction_u3 * y * b * u1x.powi(3)
                + c.contraction_v2_u * odd * v1x * v1x * u1x,
        );
        slice.theta.push(
            THETA_REF
                + th
                + c.theta_bending * odd * (v1x * u2xx + u1x * v2xx)
                + c.theta_v3_u * quartic * v1x.powi(3) * u1x,
        );
    }
    Ok(slice)
}

/// Largest stable explicit RK4 step for the linear part of the model.
pub fn slab_stable_dt(params: &SlabParams, domain: &SlabDomain) -> f64 {
    let dx = domain.dx();
    let c = &params.coeffs;
    let b2 = params.b * params.b;
    // Worst-case symbols of the second and fourth differences: 4/dx^2, 16/dx^4.
    let longitudinal = (4.0 * c.wave / (dx * dx)).max(0.0) / params.rho;
    let bending = 16.0 * c.bending.abs() * b2 / dx.powi(4) / params.rho;
    let omega = longitudinal.max(bending).sqrt();
    let mut bound = 2.0 * 2f64.sqrt() / omega;
    if params.kappa > 0.0 {
        bound = bound.min(2.785 * params.cv * dx * dx / (4.0 * params.kappa));
    }
    0.9 * bound
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlabSnapshot {
    pub t: f64,
    pub state: SlabState,
}

#[derive(Debug, Clone)]
pub struct SlabTrajectory {
    pub snapshots: Vec<SlabSnapshot>,
    pub failure: Option<Error>,
    pub steps: usize,
}

impl SlabTrajectory {
    pub fn last(&self) -> &SlabSnapshot {
        self.snapshots
            .last()
            .expect("a trajectory always holds the initial snapshot")
    }
}

struct SlabSystem<'a> {
    params: &'a SlabParams,
    domain: &'a SlabDomain,
}

impl OdeSystem for SlabSystem<'_> {
    fn dim(&self) -> usize {
        5 * self.domain.num_nodes()
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let n = self.domain.num_nodes();
        let state = SlabState::unpack(y, n);
        if let Some(bad) = state.theta.iter().find(|t| !(**t > -THETA_REF)) {
            return Err(Error::IntegrationAbort {
                time: t,
                reason: format!("non-positive temperature (Theta' = {bad})"),
            });
        }
        let d = slab_rhs(self.params, self.domain, &state).map_err(|e| match e {
            Error::IntegrationAbort { reason, .. } => Error::IntegrationAbort { time: t, reason },
            other => other,
        })?;
        dydt.copy_from_slice(&d.pack());
        Ok(())
    }

    fn constrain(&self, _t: f64, y: &mut [f64]) {
        if self.domain.ends == SlabEnds::PinnedInsulated {
            let n = self.domain.num_nodes();
            for block in 0..4 {
                y[block * n] = 0.0;
                y[block * n + n - 1] = 0.0;
            }
        }
    }
}

/// Integrates the slab model with explicit RK4 from `t = 0`.
pub fn slab_simulate(
    params: &SlabParams,
    domain: &SlabDomain,
    initial: &SlabState,
    dt: f64,
    t_end: f64,
    output_interval: f64,
) -> Result<SlabTrajectory> {
    params.validate()?;
    initial.validate(domain)?;
    for (name, value) in [
        ("time.dt", dt),
        ("time.t_end", t_end),
        ("time.output_interval", output_interval),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(invalid(name, format!("must be positive, got {value}")));
        }
    }
    if domain.dx() <= params.min_dx() {
        return Err(invalid(
            "grid.nx",
            format!(
                "slab grid spacing {:.4e} cm must exceed {:.4e} cm (2 b sqrt(dispersion / wave)); use fewer cells",
                domain.dx(),
                params.min_dx()
            ),
        ));
    }
    let bound = slab_stable_dt(params, domain);
    if dt > bound {
        return Err(invalid(
            "time.dt",
            format!("{dt} exceeds the explicit RK4 stability bound {bound:.3e} ms"),
        ));
    }
    let system = SlabSystem { params, domain };
    let mut y = initial.pack();
    system.constrain(0.0, &mut y);
    let n = domain.num_nodes();
    let mut traj = SlabTrajectory {
        snapshots: vec![SlabSnapshot {
            t: 0.0,
            state: SlabState::unpack(&y, n),
        }],
        failure: None,
        steps: 0,
    };
    let n_steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let n_snapshots = (t_end / output_interval + 1e-9).floor() as usize + 1;
    let mut stepper = Stepper::new(Integrator::Rk4, &system);
    let mut next_output = 1;
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let t_next = if k + 1 == n_steps { t_end } else { (k + 1) as f64 * dt };
        if let Err(e) = stepper.step(&system, t, &mut y, t_next - t) {
            traj.failure = Some(e);
            break;
        }
        traj.steps += 1;
        let due = t_next >= next_output as f64 * output_interval - 1e-9 * dt;
        if next_output < n_snapshots && (due || k + 1 == n_steps) {
            traj.snapshots.push(SlabSnapshot {
                t: t_next,
                state: SlabState::unpack(&y, n),
            });
            next_output += 1;
        }
    }
    Ok(traj)
}
