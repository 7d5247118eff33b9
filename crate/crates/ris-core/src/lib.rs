//! Phase-mask synthesis, quantization, and optimization for planar
//! reconfigurable intelligent surfaces (RIS), with far-field reflection
//! pattern prediction.
//!
//! The crate is organized as four modules:
//!
//! - [`model`]: geometry, angle, mask, and state-set types;
//! - [`synthesis`]: directional cosines, initial/compensation phase fields,
//!   state sets, nearest-state quantization, phase-distribution error;
//! - [`pattern`]: array factor by direct summation and closed form, sweeps,
//!   and lobe metrics;
//! - [`optimizer`]: coherent-sum fitness, exhaustive small-instance search,
//!   and a seeded genetic algorithm over binary masks.

pub mod model;
pub mod optimizer;
pub mod pattern;
pub mod synthesis;

pub use model::{
    AppliedMask, Direction, Error, PhaseField, Result, RisGeometry, Scenario, StateMask, StateSet,
};
pub use optimizer::{exhaustive_optimize, fitness, ga_optimize, GaConfig, GaResult};
pub use pattern::{
    array_factor, closed_form_gain, pattern_metrics, pattern_sweep, PatternCut, PatternMetrics,
    PatternSample, SweepGrid, DB_FLOOR,
};
pub use synthesis::{
    directional_cosines, ideal_continuous_mask, initial_phase_field, phase_distribution_error,
    quantize_mask, two_state_set, uniform_state_set, DirectionalCosines,
};

pub use num_complex::Complex64;
