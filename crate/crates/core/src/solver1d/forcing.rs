use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Named analytic time profile usable in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Zero,
    Const {
        value: f64,
    },
    /// `amplitude * sin^3(angular_rate * t)`.
    SinCubed {
        amplitude: f64,
        angular_rate: f64,
    },
}

impl SourceSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SourceSpec::Zero => 0.0,
            SourceSpec::Const { value } => value,
            SourceSpec::SinCubed {
                amplitude,
                angular_rate,
            } => amplitude * (angular_rate * t).sin().powi(3),
        }
    }
}

/// A space-time field `(x, t) -> value`.
#[derive(Clone)]
pub enum Source {
    Profile(SourceSpec),
    Field(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Source {
    pub fn field(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Source::Field(Arc::new(f))
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Source::Profile(spec) => spec.eval(t),
            Source::Field(f) => f(x, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Profile(SourceSpec::Zero))
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Profile(spec) => write!(f, "{spec:?}"),
            Source::Field(_) => write!(f, "Field(..)"),
        }
    }
}

impl From<SourceSpec> for Source {
    fn from(spec: SourceSpec) -> Self {
        Source::Profile(spec)
    }
}

/// Right-hand sides of the momentum and energy equations.
#[derive(Debug, Clone)]
pub struct Forcing {
    /// Body force density `F`, g/(ms^2 cm^2).
    pub body: Source,
    /// Heat supply density `G`, g/(ms^3 cm).
    pub heat: Source,
}

impl Forcing {
    pub fn none() -> Self {
        Self {
            body: SourceSpec::Zero.into(),
            heat: SourceSpec::Zero.into(),
        }
    }
}
