//! Shared geometry, angle, mask, and state-set types.
//!
//! Everything here is immutable after construction and cheap to clone or
//! share across threads. Constructors validate their inputs; once a value
//! exists it satisfies its invariants.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor argument violated a type invariant.
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },
    /// Two values refer to different array geometries.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    /// The problem instance is too large for exhaustive enumeration.
    #[error("instance too large: {0}")]
    TooLarge(String),
    /// The requested operation is not supported for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn require_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Validation { field, message: format!("must be finite, got {value}") })
    }
}

fn require_positive(field: &'static str, value: f64) -> Result<f64> {
    let value = require_finite(field, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Validation { field, message: format!("must be > 0, got {value}") })
    }
}

/// Planar array geometry: cell counts, cell pitch, and carrier wavelength.
///
/// Cells are indexed by `(n_x, n_y)` with `n_x` the fast axis and
/// `(0, 0)` a corner cell; a global phase offset from corner-referencing
/// does not affect reflection magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGeometry {
    q_x: usize,
    q_y: usize,
    d_x: f64,
    d_y: f64,
    wavelength: f64,
}

impl RisGeometry {
    pub fn new(q_x: usize, q_y: usize, d_x: f64, d_y: f64, wavelength: f64) -> Result<Self> {
        if q_x == 0 {
            return Err(Error::Validation { field: "q_x", message: "must be >= 1".into() });
        }
        if q_y == 0 {
            return Err(Error::Validation { field: "q_y", message: "must be >= 1".into() });
        }
        let d_x = require_positive("d_x", d_x)?;
        let d_y = require_positive("d_y", d_y)?;
        let wavelength = require_positive("wavelength", wavelength)?;
        Ok(Self { q_x, q_y, d_x, d_y, wavelength })
    }

    pub fn q_x(&self) -> usize {
        self.q_x
    }

    pub fn q_y(&self) -> usize {
        self.q_y
    }

    pub fn d_x(&self) -> f64 {
        self.d_x
    }

    pub fn d_y(&self) -> f64 {
        self.d_y
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Wavenumber, 2π divided by the wavelength.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    /// Total number of unit cells.
    pub fn cells(&self) -> usize {
        self.q_x * self.q_y
    }

    /// Flat index of cell `(n_x, n_y)`, row-major with `n_x` fast.
    pub fn index(&self, n_x: usize, n_y: usize) -> usize {
        debug_assert!(n_x < self.q_x && n_y < self.q_y);
        n_y * self.q_x + n_x
    }
}

/// A propagation direction as elevation from the surface normal and azimuth
/// in the surface plane, both stored in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Builds a direction from radians. `theta` must lie in `[0, π/2]`;
    /// `phi` is normalized into `[0, 2π)`.
    pub fn from_radians(theta: f64, phi: f64) -> Result<Self> {
        let theta = require_finite("theta", theta)?;
        let phi = require_finite("phi", phi)?;
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::Validation {
                field: "theta",
                message: format!("must be within [0, pi/2], got {theta}"),
            });
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    /// Builds a direction from degrees; `theta_deg` must lie in `[0, 90]`.
    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        let theta_deg = require_finite("theta_deg", theta_deg)?;
        if !(0.0..=90.0).contains(&theta_deg) {
            return Err(Error::Validation {
                field: "theta_deg",
                message: format!("must be within [0, 90], got {theta_deg}"),
            });
        }
        Self::from_radians(theta_deg.to_radians(), require_finite("phi_deg", phi_deg)?.to_radians())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi.to_degrees()
    }
}

/// Per-cell continuous phase values in radians over an array geometry.
///
/// Values are stored unwrapped; wrapping happens only inside quantization
/// and phasor evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    geometry: RisGeometry,
    values: Vec<f64>,
}

impl PhaseField {
    pub fn new(geometry: RisGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.cells() {
            return Err(Error::Validation {
                field: "values",
                message: format!("expected {} values, got {}", geometry.cells(), values.len()),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation {
                field: "values",
                message: format!("all phases must be finite, found {bad}"),
            });
        }
        Ok(Self { geometry, values })
    }

    pub fn zeros(geometry: RisGeometry) -> Self {
        let values = vec![0.0; geometry.cells()];
        Self { geometry, values }
    }

    pub fn geometry(&self) -> &RisGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n_x: usize, n_y: usize) -> f64 {
        self.values[self.geometry.index(n_x, n_y)]
    }

    /// Returns a copy with `offset` added to every phase.
    pub fn with_offset(&self, offset: f64) -> Result<Self> {
        let offset = require_finite("offset", offset)?;
        let values = self.values.iter().map(|v| v + offset).collect();
        Self::new(self.geometry, values)
    }
}

/// The ordered set of complex reflection coefficients a cell can realize.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    coefficients: Vec<Complex64>,
}

impl StateSet {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::Validation {
                field: "coefficients",
                message: format!("need at least 2 states, got {}", coefficients.len()),
            });
        }
        for (k, c) in coefficients.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Validation {
                    field: "coefficients",
                    message: format!("state {k} is not finite: {c}"),
                });
            }
            let mag = c.norm();
            if mag <= 0.0 || mag > 1.0 + 1e-9 {
                return Err(Error::Validation {
                    field: "coefficients",
                    message: format!("state {k} magnitude must be in (0, 1], got {mag}"),
                });
            }
        }
        Ok(Self { coefficients })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coefficients[k]
    }

    /// Reflection phase of state `k` in radians.
    pub fn phase(&self, k: usize) -> f64 {
        self.coefficients[k].arg()
    }

    /// Reflection magnitude of state `k`.
    pub fn amplitude(&self, k: usize) -> f64 {
        self.coefficients[k].norm()
    }
}

/// Per-cell state-index assignment over an array geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMask {
    geometry: RisGeometry,
    states: Vec<usize>,
}

impl StateMask {
    pub fn new(geometry: RisGeometry, states: Vec<usize>, set: &StateSet) -> Result<Self> {
        if states.len() != geometry.cells() {
            return Err(Error::Validation {
                field: "states",
                message: format!("expected {} indices, got {}", geometry.cells(), states.len()),
            });
        }
        if let Some(bad) = states.iter().find(|&&s| s >= set.len()) {
            return Err(Error::Validation {
                field: "states",
                message: format!("index {bad} out of range for {}-state set", set.len()),
            });
        }
        Ok(Self { geometry, states })
    }

    pub fn geometry(&self) -> &RisGeometry {
        &self.geometry
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn get(&self, n_x: usize, n_y: usize) -> usize {
        self.states[self.geometry.index(n_x, n_y)]
    }

    /// Bitwise complement of a two-state mask.
    pub fn complement(&self) -> Result<Self> {
        if let Some(bad) = self.states.iter().find(|&&s| s > 1) {
            return Err(Error::Unsupported(format!(
                "complement is defined for two-state masks only, found index {bad}"
            )));
        }
        let states = self.states.iter().map(|&s| 1 - s).collect();
        Ok(Self { geometry: self.geometry, states })
    }
}

/// The design inputs of one beam-steering problem: array geometry plus the
/// incident and target reflection directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub geometry: RisGeometry,
    pub incident: Direction,
    pub target: Direction,
}

impl Scenario {
    pub fn new(geometry: RisGeometry, incident: Direction, target: Direction) -> Self {
        Self { geometry, incident, target }
    }
}

/// A mask to evaluate: either a continuous phase field (unit amplitude) or
/// a discrete state assignment with its state set.
#[derive(Debug, Clone, Copy)]
pub enum AppliedMask<'a> {
    Continuous(&'a PhaseField),
    Discrete(&'a StateMask, &'a StateSet),
}

impl AppliedMask<'_> {
    pub fn geometry(&self) -> &RisGeometry {
        match self {
            AppliedMask::Continuous(field) => field.geometry(),
            AppliedMask::Discrete(mask, _) => mask.geometry(),
        }
    }

    /// Complex reflection coefficient applied at flat cell index `i`.
    pub(crate) fn coefficient(&self, i: usize) -> Complex64 {
        match self {
            AppliedMask::Continuous(field) => Complex64::from_polar(1.0, field.values()[i]),
            AppliedMask::Discrete(mask, set) => set.coefficient(mask.states()[i]),
        }
    }
}
