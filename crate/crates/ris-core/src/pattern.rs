//! Far-field reflection pattern evaluation: direct phasor summation,
//! closed-form kernel product, observation-angle sweeps, and lobe metrics.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::{AppliedMask, Direction, Error, Result, RisGeometry};
use crate::synthesis::{coherent_sum, initial_phase_field, DirectionalCosines};

/// dB value substituted when a sample magnitude is exactly zero.
pub const DB_FLOOR: f64 = -300.0;

/// One sweep sample: observation elevation, |g_pd|, and dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSample {
    pub theta: f64,
    pub magnitude: f64,
    pub db: f64,
}

/// Sampled |g_pd| versus observation elevation along a fixed-azimuth cut.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCut {
    geometry: RisGeometry,
    incident: Direction,
    phi_r: f64,
    samples: Vec<PatternSample>,
}

impl PatternCut {
    pub fn geometry(&self) -> &RisGeometry {
        &self.geometry
    }

    pub fn incident(&self) -> Direction {
        self.incident
    }

    pub fn phi_r(&self) -> f64 {
        self.phi_r
    }

    pub fn samples(&self) -> &[PatternSample] {
        &self.samples
    }
}

/// Peak, target-gain, specular, and sidelobe metrics extracted from a cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternMetrics {
    /// Elevation of the maximum sample, radians.
    pub peak_theta: f64,
    /// dB value at the peak sample.
    pub peak_db: f64,
    /// dB at the target elevation, interpolated between bracketing samples.
    pub gain_at_target_db: f64,
    /// dB at the specular elevation (theta_r equal to theta_t).
    pub specular_db: f64,
    /// Highest local maximum outside the main lobe, with its elevation.
    pub first_sidelobe: Option<(f64, f64)>,
    /// |peak_theta - target theta|, radians.
    pub target_peak_offset: f64,
}

/// Uniform elevation grid for a sweep, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl SweepGrid {
    /// Grid from `start` to `stop` inclusive with uniform `step`, all in
    /// radians within `[0, π/2]`.
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        for (field, v) in [("start", start), ("stop", stop), ("step", step)] {
            if !v.is_finite() {
                return Err(Error::Validation { field, message: format!("must be finite, got {v}") });
            }
        }
        if step <= 0.0 {
            return Err(Error::Validation {
                field: "step",
                message: format!("must be > 0, got {step}"),
            });
        }
        if start < 0.0 || stop > FRAC_PI_2 + 1e-12 || stop < start {
            return Err(Error::Validation {
                field: "start",
                message: format!("grid [{start}, {stop}] must lie within [0, pi/2]"),
            });
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok(Self { start, step, count })
    }

    /// Grid specified in degrees.
    pub fn from_degrees(start_deg: f64, stop_deg: f64, step_deg: f64) -> Result<Self> {
        Self::new(start_deg.to_radians(), stop_deg.to_radians(), step_deg.to_radians())
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| (self.start + i as f64 * self.step).min(FRAC_PI_2))
    }
}

/// Complex array factor Σ c·e^{j(α + β)} where α is recomputed for the
/// observation direction and β (with amplitude) comes from the mask.
pub fn array_factor(
    geometry: RisGeometry,
    applied: AppliedMask<'_>,
    incident: Direction,
    observe: Direction,
) -> Result<Complex64> {
    if *applied.geometry() != geometry {
        return Err(Error::GeometryMismatch("mask geometry differs from the array".into()));
    }
    let alpha = initial_phase_field(geometry, incident, observe);
    coherent_sum(&alpha, applied)
}

fn kernel_factor(q: usize, psi: f64) -> f64 {
    let half = psi / 2.0;
    if half.sin().abs() < 1e-12 {
        q as f64
    } else {
        ((q as f64 * half).sin() / half.sin()).abs()
    }
}

/// |g_pd| of the ideal continuous design in closed form:
/// the product of two Dirichlet kernels over Ψ = κ·d·(w − w*).
pub fn closed_form_gain(
    geometry: RisGeometry,
    w: DirectionalCosines,
    w_star: DirectionalCosines,
) -> f64 {
    let kappa = geometry.wavenumber();
    let psi_x = kappa * geometry.d_x() * (w.w_x - w_star.w_x);
    let psi_y = kappa * geometry.d_y() * (w.w_y - w_star.w_y);
    kernel_factor(geometry.q_x(), psi_x) * kernel_factor(geometry.q_y(), psi_y)
}

/// Evaluates |g_pd| at every grid elevation along a fixed azimuth.
///
/// Samples may be computed concurrently; the assembled cut is identical to
/// a sequential evaluation.
pub fn pattern_sweep(
    geometry: RisGeometry,
    applied: AppliedMask<'_>,
    incident: Direction,
    phi_r: f64,
    grid: SweepGrid,
) -> Result<PatternCut> {
    if *applied.geometry() != geometry {
        return Err(Error::GeometryMismatch("mask geometry differs from the array".into()));
    }
    if grid.is_empty() {
        return Err(Error::Validation { field: "grid", message: "sweep grid is empty".into() });
    }
    let thetas: Vec<f64> = grid.thetas().collect();
    let samples: Vec<PatternSample> = thetas
        .par_iter()
        .map(|&theta| {
            let observe = Direction::from_radians(theta, phi_r)?;
            let magnitude = array_factor(geometry, applied, incident, observe)?.norm();
            let db = if magnitude == 0.0 { DB_FLOOR } else { 20.0 * magnitude.log10() };
            Ok(PatternSample { theta, magnitude, db })
        })
        .collect::<Result<_>>()?;
    Ok(PatternCut { geometry, incident, phi_r, samples })
}

fn interpolate_db(samples: &[PatternSample], theta: f64) -> f64 {
    if theta <= samples[0].theta {
        return samples[0].db;
    }
    if theta >= samples[samples.len() - 1].theta {
        return samples[samples.len() - 1].db;
    }
    let hi = samples.partition_point(|s| s.theta < theta);
    let (a, b) = (&samples[hi - 1], &samples[hi]);
    if b.theta == a.theta {
        return a.db;
    }
    let t = (theta - a.theta) / (b.theta - a.theta);
    a.db + t * (b.db - a.db)
}

/// Extracts peak, target, specular, and first-sidelobe levels from a cut.
///
/// The main lobe is bounded by the first strict local minima on each side
/// of the global peak; the first sidelobe is the highest local maximum
/// outside that interval.
pub fn pattern_metrics(cut: &PatternCut, target: Direction) -> Result<PatternMetrics> {
    let samples = cut.samples();
    if samples.len() < 3 {
        return Err(Error::Validation {
            field: "cut",
            message: format!("need at least 3 samples, got {}", samples.len()),
        });
    }

    let peak_idx = samples
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| {
            a.magnitude.partial_cmp(&b.magnitude).unwrap().then(j.cmp(i))
        })
        .map(|(i, _)| i)
        .unwrap();
    let peak = &samples[peak_idx];

    // Walk out to the first strict local minimum on each side of the peak.
    let mut lo = peak_idx;
    while lo > 0 && samples[lo - 1].magnitude < samples[lo].magnitude {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < samples.len() && samples[hi + 1].magnitude < samples[hi].magnitude {
        hi += 1;
    }

    let mut first_sidelobe: Option<(f64, f64)> = None;
    let mut consider = |idx: usize| {
        let s = &samples[idx];
        let left_ok = idx == 0 || samples[idx - 1].magnitude <= s.magnitude;
        let right_ok = idx + 1 == samples.len() || samples[idx + 1].magnitude <= s.magnitude;
        let strict = (idx > 0 && samples[idx - 1].magnitude < s.magnitude)
            || (idx + 1 < samples.len() && samples[idx + 1].magnitude < s.magnitude);
        if left_ok && right_ok && strict {
            match first_sidelobe {
                Some((db, _)) if db >= s.db => {}
                _ => first_sidelobe = Some((s.db, s.theta)),
            }
        }
    };
    for idx in 0..lo {
        consider(idx);
    }
    for idx in (hi + 1)..samples.len() {
        consider(idx);
    }

    Ok(PatternMetrics {
        peak_theta: peak.theta,
        peak_db: peak.db,
        gain_at_target_db: interpolate_db(samples, target.theta()),
        specular_db: interpolate_db(samples, cut.incident().theta()),
        first_sidelobe,
        target_peak_offset: (peak.theta - target.theta()).abs(),
    })
}
