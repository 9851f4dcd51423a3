//! Run configuration: a TOML schema, named presets, dotted-key overrides.
//!
//! A file may start from a preset (`preset = "experiment1"`) and override any
//! key. Unknown keys are rejected. Units follow the cgs-ms-K system
//! (cm, g, ms, K); see the README for the per-key table.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::constitutive::MaterialParams1D;
use crate::error::{invalid, Error, Result};
use crate::ode::Integrator;
use crate::slab::{SlabDomain, SlabEnds, SlabParams, SlabState};
use crate::solver1d::mms::ManufacturedSolution;
use crate::solver1d::{
    BoundarySpec, FieldState, Forcing, Grid1D, MechanicalBc, Model1D, RunSettings, SourceSpec, ThermalBc,
};

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["experiment1", "experiment2", "conservation", "mms", "slab"];

/// Strain of the martensite wells at 200 K used by the experiment-1 initial profile.
const WELL_STRAIN_200K: f64 = 0.11809;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SimConfig {
    /// The full 1D thermomechanical bar.
    #[serde(rename = "full_1d")]
    Full1d(Full1dConfig),
    /// The reduced thin-slab model.
    Slab(SlabConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Full1dConfig {
    pub material: MaterialSection,
    #[serde(default)]
    pub toggles: Toggles,
    pub grid: GridSection,
    pub time: TimeSection,
    pub boundary: BoundarySpec,
    /// Absent when `manufactured` supplies the forcing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<ForcingSection>,
    /// Absent when `manufactured` supplies the initial state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
    #[serde(default)]
    pub phase: PhaseThresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manufactured: Option<ManufacturedSection>,
}

/// Constitutive constants (toggled terms live in [`Toggles`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    /// g/cm^3
    pub rho: f64,
    /// g/(ms^2 cm K)
    pub cv: f64,
    /// cm g/(ms^3 K)
    pub k0: f64,
    /// K
    pub theta1: f64,
    /// g/(ms^2 cm K)
    pub k1: f64,
    /// g/(ms^2 cm)
    pub k2: f64,
    /// g/(ms^2 cm)
    pub k3: f64,
    /// cm^2/ms^2
    #[serde(default)]
    pub alpha0: f64,
}

impl MaterialSection {
    pub fn cu_based() -> Self {
        let p = MaterialParams1D::cu_based();
        Self {
            rho: p.rho,
            cv: p.cv,
            k0: p.k0,
            theta1: p.theta1,
            k1: p.k1,
            k2: p.k2,
            k3: p.k3,
            alpha0: p.alpha0,
        }
    }
}

/// Optional terms, all off by default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Toggles {
    /// Thermal relaxation time, ms.
    pub tau0: f64,
    /// Viscosity, g/(cm ms).
    pub mu: f64,
    /// Thermomechanical rate coupling, g/(cm ms K).
    pub nu: f64,
    /// Ginsburg coefficient, g cm/ms^2.
    pub gamma: f64,
    /// Conductivity temperature slope, 1/K.
    pub beta_tilde: f64,
    /// Subtract instead of add the `gamma u_xxxx` momentum term.
    pub negate_ginsburg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// cm
    pub length: f64,
    /// Number of cells.
    pub nx: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// ms
    pub dt: f64,
    /// ms
    pub t_end: f64,
    /// ms
    pub output_interval: f64,
    #[serde(default)]
    pub integrator: Integrator,
}

impl TimeSection {
    pub fn settings(&self) -> RunSettings {
        RunSettings {
            dt: self.dt,
            t_end: self.t_end,
            output_interval: self.output_interval,
            integrator: self.integrator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    /// Body force density, g/(ms^2 cm^2).
    pub body: SourceSpec,
    /// Heat supply density, g/(ms^3 cm).
    pub heat: SourceSpec,
}

/// Spatial profile of an initial field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    Const {
        value: f64,
    },
    /// Linear interpolation between `[x, value]` pairs covering the domain.
    PiecewiseLinear {
        breakpoints: Vec<[f64; 2]>,
    },
    /// `offset + amplitude sin(wavenumber x + phase)`.
    Sine {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Const { value } => *value,
            Profile::PiecewiseLinear { breakpoints } => {
                let k = breakpoints
                    .partition_point(|p| p[0] <= x)
                    .clamp(1, breakpoints.len() - 1);
                let ([x0, y0], [x1, y1]) = (breakpoints[k - 1], breakpoints[k]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
            Profile::Sine {
                amplitude,
                wavenumber,
                phase,
                offset,
            } => offset + amplitude * (wavenumber * x + phase).sin(),
        }
    }

    fn validate(&self, name: &'static str, length: f64) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        let ok = match self {
            Profile::Zero => true,
            Profile::Const { value } => finite(*value),
            Profile::Sine {
                amplitude,
                wavenumber,
                phase,
                offset,
            } => [*amplitude, *wavenumber, *phase, *offset].into_iter().all(finite),
            Profile::PiecewiseLinear { breakpoints } => {
                if breakpoints.len() < 2 {
                    return Err(invalid(name, "piecewise_linear needs at least two breakpoints"));
                }
                if breakpoints.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(invalid(name, "breakpoint positions must be strictly increasing"));
                }
                let (first, last) = (breakpoints[0][0], breakpoints[breakpoints.len() - 1][0]);
                let tol = 1e-12 * length;
                if first > tol || last < length - tol {
                    return Err(invalid(
                        name,
                        format!("breakpoints must cover [0, {length}], got [{first}, {last}]"),
                    ));
                }
                breakpoints.iter().flatten().all(|v| finite(*v))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(name, "profile parameters must be finite"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// cm
    pub displacement: Profile,
    /// cm/ms
    pub velocity: Profile,
    /// K
    pub temperature: Profile,
    /// K/ms; used only with `tau0 > 0`.
    #[serde(default = "zero_profile", skip_serializing_if = "is_zero_profile")]
    pub theta_rate: Profile,
}

fn zero_profile() -> Profile {
    Profile::Zero
}

fn is_zero_profile(p: &Profile) -> bool {
    *p == Profile::Zero
}

/// Strain thresholds used to label cells in the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseThresholds {
    /// Cells with `|eps|` below this are austenite.
    pub austenite: f64,
    /// Cells with `|eps|` above this count as fully formed martensite.
    pub martensite: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self {
            austenite: 0.02,
            martensite: 0.08,
        }
    }
}

/// Smooth manufactured solution; replaces `forcing` and `initial`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManufacturedSection {
    /// cm
    pub amplitude: f64,
    /// rad/ms
    pub omega: f64,
    /// K
    pub theta_mean: f64,
    /// K
    pub theta_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabConfig {
    pub grid: GridSection,
    pub time: TimeSection,
    pub slab: SlabSection,
    pub initial: SlabInitial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabSection {
    /// Half-thickness, cm.
    pub b: f64,
    /// g/cm^3
    pub rho: f64,
    /// g/(ms^2 cm K)
    pub cv: f64,
    /// cm g/(ms^3 K)
    pub kappa: f64,
    pub ends: SlabEnds,
    /// Transverse coordinates `Y = y/b` at which to write reconstructed slices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reconstruct: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabInitial {
    pub u1: Profile,
    pub u2: Profile,
    pub v1: Profile,
    pub v2: Profile,
    /// Temperature minus 300 K.
    pub theta: Profile,
}

/// Everything needed to run the 1D bar.
pub struct Full1dSetup {
    pub model: Model1D,
    pub initial: FieldState,
    pub settings: RunSettings,
}

/// Everything needed to run the slab model.
pub struct SlabSetup {
    pub params: SlabParams,
    pub domain: SlabDomain,
    pub initial: SlabState,
}

impl Full1dConfig {
    pub fn material_params(&self) -> MaterialParams1D {
        let (m, t) = (&self.material, &self.toggles);
        MaterialParams1D {
            rho: m.rho,
            cv: m.cv,
            k0: m.k0,
            beta_tilde: t.beta_tilde,
            theta1: m.theta1,
            k1: m.k1,
            k2: m.k2,
            k3: m.k3,
            mu: t.mu,
            nu: t.nu,
            tau0: t.tau0,
            gamma: t.gamma,
            alpha0: m.alpha0,
        }
    }

    pub fn manufactured_solution(&self) -> Option<ManufacturedSolution> {
        self.manufactured.as_ref().map(|m| ManufacturedSolution {
            amplitude: m.amplitude,
            omega: m.omega,
            theta_mean: m.theta_mean,
            theta_amplitude: m.theta_amplitude,
            length: self.grid.length,
        })
    }

    /// Validates the configuration and builds the model, initial state and
    /// step controls.
    pub fn build(&self) -> Result<Full1dSetup> {
        let settings = self.time.settings();
        settings.validate()?;
        let grid = Grid1D::new(self.grid.length, self.grid.nx)?;
        let params = self.material_params();
        let sign = if self.toggles.negate_ginsburg { -1.0 } else { 1.0 };
        let th = &self.phase;
        if !(th.austenite > 0.0 && th.martensite >= th.austenite) {
            return Err(invalid("phase", "need 0 < austenite <= martensite"));
        }
        let relaxing = params.tau0 > 0.0;
        let (forcing, initial) = match (self.manufactured_solution(), &self.forcing, &self.initial) {
            (Some(ms), None, None) => {
                if self.boundary != BoundarySpec::pinned_insulated() {
                    return Err(invalid(
                        "boundary",
                        "the manufactured solution needs pinned, insulated ends",
                    ));
                }
                if !(ms.theta_mean - ms.theta_amplitude.abs() > 0.0) {
                    return Err(invalid(
                        "manufactured.theta_amplitude",
                        "temperature must stay positive",
                    ));
                }
                (ms.forcing(&params, sign), ms.state(&grid, 0.0, relaxing))
            }
            (Some(_), _, _) => {
                return Err(Error::Config(
                    "`manufactured` replaces the `forcing` and `initial` sections; remove them".into(),
                ))
            }
            (None, Some(f), Some(init)) => {
                for (name, p) in [
                    ("initial.displacement", &init.displacement),
                    ("initial.velocity", &init.velocity),
                    ("initial.temperature", &init.temperature),
                    ("initial.theta_rate", &init.theta_rate),
                ] {
                    p.validate(name, grid.length)?;
                }
                let mut st = FieldState::at_rest(&grid, 1.0, relaxing);
                for (i, x) in grid.nodes().enumerate() {
                    st.u[i] = init.displacement.eval(x);
                    st.v[i] = init.velocity.eval(x);
                    st.theta[i] = init.temperature.eval(x);
                    if let Some(w) = st.theta_dot.as_mut() {
                        w[i] = init.theta_rate.eval(x);
                    }
                }
                let forcing = Forcing {
                    body: f.body.into(),
                    heat: f.heat.into(),
                };
                (forcing, st)
            }
            _ => {
                return Err(Error::Config(
                    "`forcing` and `initial` are required unless `manufactured` is given".into(),
                ))
            }
        };
        let model = Model1D::new(grid, params, self.boundary.clone(), forcing)?
            .with_negated_ginsburg(self.toggles.negate_ginsburg);
        initial.validate(&grid)?;
        Ok(Full1dSetup {
            model,
            initial,
            settings,
        })
    }
}

impl SlabConfig {
    pub fn build(&self) -> Result<SlabSetup> {
        self.time.settings().validate()?;
        if self.time.integrator != Integrator::Rk4 {
            return Err(invalid("time.integrator", "the slab model is integrated with rk4"));
        }
        let s = &self.slab;
        let params = SlabParams {
            b: s.b,
            rho: s.rho,
            cv: s.cv,
            kappa: s.kappa,
            ..SlabParams::cu_based(s.b)
        };
        params.validate()?;
        if s.reconstruct.iter().any(|y| !(y.abs() <= 1.0)) {
            return Err(invalid("slab.reconstruct", "Y values must lie in [-1, 1]"));
        }
        let domain = SlabDomain::new(self.grid.length, self.grid.nx, s.ends)?;
        let init = &self.initial;
        let mut st = SlabState::uniform(&domain, 0.0, 0.0, 0.0);
        for (name, p, field) in [
            ("initial.u1", &init.u1, &mut st.u1),
            ("initial.u2", &init.u2, &mut st.u2),
            ("initial.v1", &init.v1, &mut st.v1),
            ("initial.v2", &init.v2, &mut st.v2),
            ("initial.theta", &init.theta, &mut st.theta),
        ] {
            p.validate(name, domain.length)?;
            for (i, x) in domain.nodes().enumerate() {
                field[i] = p.eval(x);
            }
        }
        st.validate(&domain)?;
        Ok(SlabSetup {
            params,
            domain,
            initial: st,
        })
    }
}

impl SimConfig {
    pub fn time(&self) -> &TimeSection {
        match self {
            SimConfig::Full1d(c) => &c.time,
            SimConfig::Slab(c) => &c.time,
        }
    }

    /// Full validation (builds and discards the model).
    pub fn validate(&self) -> Result<()> {
        match self {
            SimConfig::Full1d(c) => c.build().map(|_| ()),
            SimConfig::Slab(c) => c.build().map(|_| ()),
        }
    }

    /// TOML text that [`parse_config`] reads back to an identical config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }
}

/// Keys that must be present (after preset merging) for each model.
fn required_keys(model: Option<&str>, table: &Table) -> Vec<&'static str> {
    let common = [
        "grid.length",
        "grid.nx",
        "time.dt",
        "time.t_end",
        "time.output_interval",
    ];
    let full = [
        "material.rho",
        "material.cv",
        "material.k0",
        "material.theta1",
        "material.k1",
        "material.k2",
        "material.k3",
        "boundary.mechanical",
        "boundary.thermal",
    ];
    let driven = [
        "forcing.body",
        "forcing.heat",
        "initial.displacement",
        "initial.velocity",
        "initial.temperature",
    ];
    let slab = [
        "slab.b",
        "slab.rho",
        "slab.cv",
        "slab.kappa",
        "slab.ends",
        "initial.u1",
        "initial.u2",
        "initial.v1",
        "initial.v2",
        "initial.theta",
    ];
    let mut keys: Vec<&'static str> = vec!["model"];
    keys.extend(common);
    match model {
        Some("slab") => keys.extend(slab),
        _ => {
            keys.extend(full);
            if !table.contains_key("manufactured") {
                keys.extend(driven);
            }
        }
    }
    keys
}

fn lookup<'a>(table: &'a Table, path: &str) -> Option<&'a Value> {
    let mut parts = path.split('.');
    let mut current = table.get(parts.next()?)?;
    for part in parts {
        current = current.as_table()?.get(part)?;
    }
    Some(current)
}

/// Recursively overlays `top` onto `base`. A table whose `kind` differs from
/// the base replaces it wholesale so stale variant fields do not linger.
fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) if b.get("kind") == t.get("kind") || !t.contains_key("kind") => {
                merge(b, t)
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// Sets `path` (dot separated) to the TOML literal `raw`; bare words that do
/// not parse as TOML are taken as strings.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` must have the form key.path=value")))?;
    let (path, raw) = (path.trim(), raw.trim());
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override `{assignment}` has an empty key")));
    }
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key present"),
        Err(_) => Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().expect("non-empty path");
    let mut current = table;
    for part in parts {
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        current = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{path}`: `{part}` is not a table")))?;
    }
    current.insert(leaf.to_string(), value);
    Ok(())
}

/// Resolves preset inheritance and overrides, checks required keys, then
/// deserializes and validates.
pub fn resolve(mut table: Table, overrides: &[String], source: Option<&str>) -> Result<SimConfig> {
    match table.remove("preset") {
        Some(Value::String(name)) => {
            let Value::Table(mut base) = Value::try_from(preset(&name)?).expect("presets serialize") else {
                unreachable!("configs serialize to tables")
            };
            merge(&mut base, table);
            table = base;
        }
        Some(other) => return Err(Error::Config(format!("`preset` must be a string, got {other}"))),
        None => {}
    }
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let model = table.get("model").and_then(Value::as_str).map(str::to_owned);
    let missing: Vec<&str> = required_keys(model.as_deref(), &table)
        .into_iter()
        .filter(|k| lookup(&table, k).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!("missing required keys: {}", missing.join(", "))));
    }
    let config = SimConfig::deserialize(Value::Table(table)).map_err(|e| {
        let msg = e.to_string();
        let line = source
            .zip(offending_key(&msg))
            .and_then(|(text, key)| key_line(text, key));
        Error::Config(match line {
            Some(n) => format!("line {n}: {}", msg.trim_end()),
            None => msg.trim_end().to_string(),
        })
    })?;
    config.validate()?;
    Ok(config)
}

/// The key named in a serde "unknown field" / "unknown variant" message.
fn offending_key(msg: &str) -> Option<&str> {
    let rest = msg
        .split_once("unknown field `")
        .or_else(|| msg.split_once("unknown variant `"))?
        .1;
    rest.split_once('`').map(|(key, _)| key)
}

/// First line (1-based) mentioning `key` as a key, table header segment or
/// string value.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|line| {
            let line = line.trim();
            let as_key = line
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='));
            let in_header = line.starts_with('[')
                && line
                    .trim_matches(|c| c == '[' || c == ']')
                    .split('.')
                    .any(|seg| seg.trim() == key);
            let as_value = line.contains(&format!("\"{key}\""));
            as_key || in_header || as_value
        })
        .map(|i| i + 1)
}

/// Parses configuration text (see [`resolve`]).
pub fn parse_config(text: &str, overrides: &[String]) -> Result<SimConfig> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    resolve(table, overrides, Some(text))
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
    parse_config(&text, overrides).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Loads a named preset with overrides applied.
pub fn load_preset(name: &str, overrides: &[String]) -> Result<SimConfig> {
    let mut table = Table::new();
    table.insert("preset".into(), Value::String(name.into()));
    resolve(table, overrides, None)
}

fn pinned_flux(ambient: f64) -> BoundarySpec {
    BoundarySpec {
        mechanical: MechanicalBc::Pinned,
        thermal: ThermalBc::ControlledFlux {
            beta: 0.0,
            ambient: SourceSpec::Const { value: ambient },
        },
    }
}

/// Built-in configurations.
pub fn preset(name: &str) -> Result<SimConfig> {
    let full = |grid, time, boundary, forcing, initial| Full1dConfig {
        material: MaterialSection::cu_based(),
        toggles: Toggles::default(),
        grid,
        time,
        boundary,
        forcing: Some(forcing),
        initial: Some(initial),
        phase: PhaseThresholds::default(),
        manufactured: None,
    };
    let config = match name {
        // Thermally driven: four martensite variants heated through the
        // transformation and cooled back.
        "experiment1" => {
            let e = WELL_STRAIN_200K;
            SimConfig::Full1d(full(
                GridSection { length: 1.0, nx: 24 },
                TimeSection {
                    dt: 7e-4,
                    t_end: 12.0,
                    output_interval: 0.1,
                    integrator: Integrator::Bdf2,
                },
                pinned_flux(200.0),
                ForcingSection {
                    body: SourceSpec::Const { value: 500.0 },
                    heat: SourceSpec::SinCubed {
                        amplitude: 375.0 * PI,
                        angular_rate: PI / 6.0,
                    },
                },
                InitialSection {
                    displacement: Profile::PiecewiseLinear {
                        breakpoints: vec![
                            [0.0, 0.0],
                            [1.0 / 6.0, -e / 6.0],
                            [0.5, e / 6.0],
                            [5.0 / 6.0, -e / 6.0],
                            [1.0, 0.0],
                        ],
                    },
                    velocity: Profile::Zero,
                    temperature: Profile::Const { value: 200.0 },
                    theta_rate: Profile::Zero,
                },
            ))
        }
        // Mechanically driven from austenite at 255 K.
        "experiment2" => SimConfig::Full1d(full(
            GridSection { length: 1.0, nx: 16 },
            TimeSection {
                dt: 8e-4,
                t_end: 8.0,
                output_interval: 0.05,
                integrator: Integrator::Rk4,
            },
            pinned_flux(255.0),
            ForcingSection {
                body: SourceSpec::SinCubed {
                    amplitude: 7000.0,
                    angular_rate: PI / 2.0,
                },
                heat: SourceSpec::Zero,
            },
            InitialSection {
                displacement: Profile::Zero,
                velocity: Profile::Zero,
                temperature: Profile::Const { value: 255.0 },
                theta_rate: Profile::Zero,
            },
        )),
        // Unforced wave in a pinned, insulated bar: total energy is conserved.
        "conservation" => SimConfig::Full1d(full(
            GridSection { length: 1.0, nx: 48 },
            TimeSection {
                dt: 1e-4,
                t_end: 1.0,
                output_interval: 0.05,
                integrator: Integrator::Rk4,
            },
            BoundarySpec::pinned_insulated(),
            ForcingSection {
                body: SourceSpec::Zero,
                heat: SourceSpec::Zero,
            },
            InitialSection {
                displacement: Profile::Sine {
                    amplitude: 0.01,
                    wavenumber: PI,
                    phase: 0.0,
                    offset: 0.0,
                },
                velocity: Profile::Zero,
                temperature: Profile::Const { value: 260.0 },
                theta_rate: Profile::Zero,
            },
        )),
        "mms" => SimConfig::Full1d(Full1dConfig {
            material: MaterialSection::cu_based(),
            toggles: Toggles::default(),
            grid: GridSection { length: 1.0, nx: 64 },
            time: TimeSection {
                dt: 1.5e-4,
                t_end: 0.3,
                output_interval: 0.05,
                integrator: Integrator::Rk4,
            },
            boundary: BoundarySpec::pinned_insulated(),
            forcing: None,
            initial: None,
            phase: PhaseThresholds::default(),
            manufactured: Some(ManufacturedSection {
                amplitude: 0.005,
                omega: 50.0,
                theta_mean: 300.0,
                theta_amplitude: 5.0,
            }),
        }),
        // Small longitudinal travelling wave in a thin periodic slab.
        "slab" => {
            let b = 0.01;
            let k = 5.0;
            let amplitude = 2e-6;
            let speed = (2.97e6f64 / 11.1).sqrt();
            SimConfig::Slab(SlabConfig {
                grid: GridSection {
                    length: 2.0 * PI / k,
                    nx: 64,
                },
                time: TimeSection {
                    dt: 1e-5,
                    t_end: 0.01,
                    output_interval: 5e-4,
                    integrator: Integrator::Rk4,
                },
                slab: SlabSection {
                    b,
                    rho: 11.1,
                    cv: 29.0,
                    kappa: 1.9e-2,
                    ends: SlabEnds::Periodic,
                    reconstruct: vec![-1.0, 0.0, 1.0],
                },
                initial: SlabInitial {
                    u1: Profile::Sine {
                        amplitude,
                        wavenumber: k,
                        phase: 0.0,
                        offset: 0.0,
                    },
                    u2: Profile::Zero,
                    v1: Profile::Sine {
                        amplitude: -amplitude * k * speed,
                        wavenumber: k,
                        phase: PI / 2.0,
                        offset: 0.0,
                    },
                    v2: Profile::Zero,
                    theta: Profile::Zero,
                },
            })
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (expected one of: {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(c: &SimConfig) -> &Full1dConfig {
        match c {
            SimConfig::Full1d(f) => f,
            SimConfig::Slab(_) => panic!("expected a full_1d config"),
        }
    }

    #[test]
    fn experiment1_preset_values() {
        let c = preset("experiment1").unwrap();
        let f = full(&c);
        let forcing = f.forcing.as_ref().unwrap();
        assert_eq!(forcing.body, SourceSpec::Const { value: 500.0 });
        assert_eq!(
            forcing.heat,
            SourceSpec::SinCubed {
                amplitude: 375.0 * PI,
                angular_rate: PI / 6.0
            }
        );
        assert_eq!((f.grid.nx, f.time.dt), (24, 7e-4));
        let init = f.initial.as_ref().unwrap();
        assert_eq!(init.temperature, Profile::Const { value: 200.0 });
        assert!(init.displacement.eval(1.0 / 3.0).abs() < 1e-15);
        assert!((init.displacement.eval(1.0 / 6.0) + 0.019682).abs() < 1e-6);
        // Slopes are the well strains +-0.11809.
        let d = |x: f64| (init.displacement.eval(x + 1e-6) - init.displacement.eval(x - 1e-6)) / 2e-6;
        for (x, s) in [(0.1, -1.0), (0.3, 1.0), (0.7, -1.0), (0.9, 1.0)] {
            assert!((d(x) - s * 0.11809).abs() < 1e-9);
        }
        let p = f.material_params();
        assert_eq!((p.tau0, p.mu, p.nu), (0.0, 0.0, 0.0));
    }

    #[test]
    fn experiment2_preset_starts_in_austenite() {
        let c = preset("experiment2").unwrap();
        let setup = full(&c).build().unwrap();
        assert_eq!(setup.initial.max_abs_strain(&setup.model.grid), 0.0);
        assert!(setup.initial.theta.iter().all(|t| *t == 255.0));
        assert_eq!((setup.model.grid.nx, setup.settings.dt), (16, 8e-4));
        assert_eq!(setup.model.forcing.body.eval(0.3, 1.0), 7000.0);
    }

    #[test]
    fn every_preset_validates_and_round_trips() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            c.validate().unwrap();
            let text = c.to_toml();
            assert_eq!(parse_config(&text, &[]).unwrap(), c, "{name}:\n{text}");
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn empty_file_lists_required_keys() {
        let err = parse_config("", &[]).unwrap_err().to_string();
        for key in [
            "model",
            "grid.nx",
            "time.dt",
            "material.k1",
            "boundary.thermal",
            "initial.temperature",
        ] {
            assert!(err.contains(key), "{err}");
        }
    }

    #[test]
    fn negative_dt_is_rejected() {
        let err = parse_config("preset = \"experiment2\"\n[time]\ndt = -1e-3\n", &[]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "time.dt", .. }), "{err}");
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let mut text = preset("experiment2").unwrap().to_toml();
        text.push_str("\n[grid2]\nfoo = 1\n");
        let err = parse_config(&text, &[]).unwrap_err().to_string();
        assert!(err.contains("grid2") && err.contains("line"), "{err}");
        let mut text = preset("experiment2").unwrap().to_toml();
        text = text.replace("[grid]\n", "[grid]\nspacing = 3\n");
        let err = parse_config(&text, &[]).unwrap_err().to_string();
        assert!(err.contains("spacing") && err.contains("line"), "{err}");
    }

    #[test]
    fn syntax_errors_report_their_line() {
        let err = parse_config("model = \"full_1d\"\n[grid\n", &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn overrides_apply_before_validation() {
        let c = load_preset("experiment1", &["toggles.gamma=1e-10".into(), "grid.nx=30".into()]).unwrap();
        let f = full(&c);
        assert_eq!(f.toggles.gamma, 1e-10);
        assert_eq!(f.grid.nx, 30);
        let c = load_preset("experiment1", &["time.integrator=rk4".into()]).unwrap();
        assert_eq!(c.time().integrator, Integrator::Rk4);
        assert!(load_preset("experiment1", &["time.dt=0".into()]).is_err());
        assert!(load_preset("experiment1", &["nonsense".into()]).is_err());
    }

    #[test]
    fn preset_files_can_switch_variants() {
        let text = "preset = \"experiment1\"\n[boundary.thermal]\nkind = \"fixed_theta\"\nvalue = 250.0\n";
        let c = parse_config(text, &[]).unwrap();
        assert_eq!(full(&c).boundary.thermal, ThermalBc::FixedTheta { value: 250.0 });
    }

    #[test]
    fn manufactured_config_rejects_explicit_forcing() {
        let text = "preset = \"mms\"\n[forcing]\nbody = { kind = \"zero\" }\nheat = { kind = \"zero\" }\n";
        assert!(parse_config(text, &[]).is_err());
        let c = load_preset("mms", &["boundary.mechanical=\"stress_free\"".into()]);
        assert!(c.is_err());
    }

    #[test]
    fn piecewise_profile_must_cover_domain() {
        let p = Profile::PiecewiseLinear {
            breakpoints: vec![[0.0, 0.0], [0.5, 1.0]],
        };
        assert!(p.validate("initial.displacement", 1.0).is_err());
        let p = Profile::PiecewiseLinear {
            breakpoints: vec![[0.0, 0.0], [0.5, 1.0], [1.0, 0.0]],
        };
        assert!(p.validate("initial.displacement", 1.0).is_ok());
        assert_eq!(p.eval(0.25), 0.5);
        assert_eq!(p.eval(1.0), 0.0);
    }

    #[test]
    fn slab_config_builds() {
        let c = preset("slab").unwrap();
        let SimConfig::Slab(s) = &c else { panic!() };
        let setup = s.build().unwrap();
        assert_eq!(setup.domain.num_nodes(), 64);
        assert!(setup.domain.dx() > setup.params.min_dx());
        assert!(load_preset("slab", &["time.integrator=bdf2".into()]).is_err());
    }
}
