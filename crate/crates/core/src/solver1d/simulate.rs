use super::model::Model1D;
use super::state::FieldState;
use crate::error::{invalid, Error, Result};
use crate::ode::{Integrator, Stepper};

/// Time-stepping controls, all in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub t_end: f64,
    pub output_interval: f64,
    pub integrator: Integrator,
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("time.dt", self.dt),
            ("time.t_end", self.t_end),
            ("time.output_interval", self.output_interval),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened to land on `t_end`.
    pub fn num_steps(&self) -> usize {
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn num_snapshots(&self) -> usize {
        (self.t_end / self.output_interval + 1e-9).floor() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: FieldState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub total_energy: f64,
    pub max_abs_strain: f64,
    pub min_theta: f64,
    pub max_theta: f64,
}

impl Diagnostics {
    pub fn of(model: &Model1D, t: f64, state: &FieldState) -> Self {
        let (min_theta, max_theta) = state
            .theta
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), th| {
                (lo.min(*th), hi.max(*th))
            });
        Self {
            t,
            total_energy: model.energy_budget(state),
            max_abs_strain: state.max_abs_strain(&model.grid),
            min_theta,
            max_theta,
        }
    }
}

/// Output of a run. When `failure` is set the snapshots stop at the last
/// output time reached before the abort.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
    pub failure: Option<Error>,
    pub steps: usize,
    pub jacobian_evaluations: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("a trajectory always holds the initial snapshot")
    }
}

/// Integrates `model` from `initial` at `t = 0` to `settings.t_end`.
///
/// Setup problems (bad settings, an RK4 step above the stability bound of the
/// initial state) are returned as errors; aborts during the run are recorded
/// in [`Trajectory::failure`].
pub fn simulate(model: &Model1D, initial: &FieldState, settings: &RunSettings) -> Result<Trajectory> {
    settings.validate()?;
    let mut y = model.pack(initial)?;
    crate::ode::OdeSystem::constrain(model, 0.0, &mut y);
    let start = model.unpack(0.0, &y)?;

    if settings.integrator == Integrator::Rk4 {
        let bound = model.stable_dt(&start);
        if settings.dt > bound {
            return Err(invalid(
                "time.dt",
                format!(
                    "{} exceeds the explicit RK4 stability bound {bound:.3e} ms; reduce dt or use integrator = \"bdf2\"",
                    settings.dt
                ),
            ));
        }
    }

    let mut traj = Trajectory {
        diagnostics: vec![Diagnostics::of(model, 0.0, &start)],
        snapshots: vec![Snapshot { t: 0.0, state: start }],
        failure: None,
        steps: 0,
        jacobian_evaluations: 0,
    };
    let n_steps = settings.num_steps();
    let n_snapshots = settings.num_snapshots();
    let mut stepper = Stepper::new(settings.integrator, model);
    let mut next_output = 1;

    for k in 0..n_steps {
        let t = k as f64 * settings.dt;
        let t_next = if k + 1 == n_steps {
            settings.t_end
        } else {
            (k + 1) as f64 * settings.dt
        };
        if let Err(e) = stepper.step(model, t, &mut y, t_next - t) {
            traj.failure = Some(e);
            break;
        }
        traj.steps += 1;
        let due =
            next_output < n_snapshots && t_next >= next_output as f64 * settings.output_interval - 1e-9 * settings.dt;
        if due || k + 1 == n_steps && next_output < n_snapshots {
            match model.unpack(t_next, &y) {
                Ok(state) => {
                    traj.diagnostics.push(Diagnostics::of(model, t_next, &state));
                    traj.snapshots.push(Snapshot { t: t_next, state });
                    next_output += 1;
                }
                Err(e) => {
                    traj.failure = Some(e);
                    break;
                }
            }
        }
    }
    traj.jacobian_evaluations = stepper.jacobian_evaluations;
    Ok(traj)
}
