//! Phase-mask synthesis: directional cosines, the initial phase field, the
//! ideal continuous compensation mask, discrete state sets, nearest-state
//! quantization, and the phase-distribution error.
//!
//! All operations are pure functions on immutable inputs.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::model::{
    AppliedMask, Direction, Error, PhaseField, Result, RisGeometry, Scenario, StateMask, StateSet,
};

/// Angle-dependent coefficients coupling the incident and observation
/// directions to the per-cell phase gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalCosines {
    pub w_x: f64,
    pub w_y: f64,
}

/// w_x = sin(θt)cos(φt) + sin(θr)cos(φr), w_y analogous with sines.
pub fn directional_cosines(incident: Direction, reflected: Direction) -> DirectionalCosines {
    let w_x = incident.theta().sin() * incident.phi().cos()
        + reflected.theta().sin() * reflected.phi().cos();
    let w_y = incident.theta().sin() * incident.phi().sin()
        + reflected.theta().sin() * reflected.phi().sin();
    DirectionalCosines { w_x, w_y }
}

/// Per-cell initial phase for a given incident/reflected direction pair:
/// α(n_x, n_y) = κ·d_x·w_x·n_x + κ·d_y·w_y·n_y.
pub fn initial_phase_field(
    geometry: RisGeometry,
    incident: Direction,
    reflected: Direction,
) -> PhaseField {
    let w = directional_cosines(incident, reflected);
    let kappa = geometry.wavenumber();
    let step_x = kappa * geometry.d_x() * w.w_x;
    let step_y = kappa * geometry.d_y() * w.w_y;
    let mut values = Vec::with_capacity(geometry.cells());
    for n_y in 0..geometry.q_y() {
        for n_x in 0..geometry.q_x() {
            values.push(step_x * n_x as f64 + step_y * n_y as f64);
        }
    }
    PhaseField::new(geometry, values).expect("finite by construction")
}

/// The continuous compensation mask β = −α* for the scenario's
/// incident/target pair, returned unwrapped.
pub fn ideal_continuous_mask(scenario: &Scenario) -> PhaseField {
    let alpha = initial_phase_field(scenario.geometry, scenario.incident, scenario.target);
    let values = alpha.values().iter().map(|a| -a).collect();
    PhaseField::new(scenario.geometry, values).expect("finite by construction")
}

/// Two-state set `[a0·e^{jγ}, a1·e^{j(γ+ψ)}]`. `psi` must lie in `(0, π]`;
/// amplitudes default to (1, 1).
pub fn two_state_set(gamma: f64, psi: f64, amplitudes: Option<(f64, f64)>) -> Result<StateSet> {
    if !psi.is_finite() || psi <= 0.0 || psi > PI + 1e-12 {
        return Err(Error::Validation {
            field: "psi",
            message: format!("must be within (0, pi], got {psi}"),
        });
    }
    let (a0, a1) = amplitudes.unwrap_or((1.0, 1.0));
    StateSet::new(vec![Complex64::from_polar(a0, gamma), Complex64::from_polar(a1, gamma + psi)])
}

/// Uniform unit-magnitude b-bit set: 2^b states at phases 2πk/2^b.
pub fn uniform_state_set(bits: u32) -> Result<StateSet> {
    if !(1..=8).contains(&bits) {
        return Err(Error::Validation {
            field: "bits",
            message: format!("must be within 1..=8, got {bits}"),
        });
    }
    let n = 1usize << bits;
    let coefficients =
        (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
    StateSet::new(coefficients)
}

/// Distance between two angles on the circle, in `[0, π]`.
fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Assigns each cell the state whose phase is circularly closest to the
/// cell's continuous phase; ties break toward the lowest state index.
///
/// For the ideal 1-bit set (γ = 0, ψ = π) this reproduces thresholding at
/// 90° and 270°.
pub fn quantize_mask(continuous: &PhaseField, states: &StateSet) -> StateMask {
    let phases: Vec<f64> = (0..states.len()).map(|k| states.phase(k).rem_euclid(TAU)).collect();
    let indices = continuous
        .values()
        .iter()
        .map(|&beta| {
            let beta = beta.rem_euclid(TAU);
            let mut best = 0usize;
            let mut best_dist = circular_distance(beta, phases[0]);
            for (k, &p) in phases.iter().enumerate().skip(1) {
                let d = circular_distance(beta, p);
                if d < best_dist {
                    best = k;
                    best_dist = d;
                }
            }
            best
        })
        .collect();
    StateMask::new(*continuous.geometry(), indices, states).expect("indices valid by construction")
}

/// Coherent phasor sum Σ c_i·e^{j·alpha_i} of a mask against a phase field.
pub(crate) fn coherent_sum(alpha: &PhaseField, applied: AppliedMask<'_>) -> Result<Complex64> {
    if applied.geometry() != alpha.geometry() {
        return Err(Error::GeometryMismatch(format!(
            "mask is {}x{}, phase field is {}x{}",
            applied.geometry().q_x(),
            applied.geometry().q_y(),
            alpha.geometry().q_x(),
            alpha.geometry().q_y(),
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &a) in alpha.values().iter().enumerate() {
        sum += applied.coefficient(i) * Complex64::from_polar(1.0, a);
    }
    Ok(sum)
}

/// Phase-distribution error e_pd = Q_x·Q_y − |Σ c·e^{j(α* + β)}| for the
/// scenario's target design.
pub fn phase_distribution_error(scenario: &Scenario, applied: AppliedMask<'_>) -> Result<f64> {
    let alpha_star = initial_phase_field(scenario.geometry, scenario.incident, scenario.target);
    let sum = coherent_sum(&alpha_star, applied)?;
    Ok(scenario.geometry.cells() as f64 - sum.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const C: f64 = 299_792_458.0;

    fn half_wave_geometry(q: usize) -> RisGeometry {
        let lam = C / 28e9;
        RisGeometry::new(q, q, lam / 2.0, lam / 2.0, lam).unwrap()
    }

    fn deg(theta: f64, phi: f64) -> Direction {
        Direction::from_degrees(theta, phi).unwrap()
    }

    #[test]
    fn cosines_normal_to_sixty() {
        let w = directional_cosines(deg(0.0, 0.0), deg(60.0, 0.0));
        assert_relative_eq!(w.w_x, 3f64.sqrt() / 2.0, max_relative = 1e-15);
        assert_eq!(w.w_y, 0.0);
    }

    #[test]
    fn cosines_broadside_and_specular_pair() {
        let w = directional_cosines(deg(0.0, 0.0), deg(0.0, 0.0));
        assert_eq!((w.w_x, w.w_y), (0.0, 0.0));

        let w = directional_cosines(deg(30.0, 180.0), deg(30.0, 0.0));
        assert_relative_eq!(w.w_x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.w_y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn initial_phase_half_wave_sixty() {
        let geo = half_wave_geometry(11);
        let alpha = initial_phase_field(geo, deg(0.0, 0.0), deg(60.0, 0.0));
        assert_relative_eq!(alpha.get(1, 0), PI * 3f64.sqrt() / 2.0, max_relative = 1e-12);
        assert_eq!(alpha.get(0, 0), 0.0);
    }

    #[test]
    fn initial_phase_broadside_is_zero() {
        let geo = half_wave_geometry(5);
        let alpha = initial_phase_field(geo, deg(0.0, 0.0), deg(0.0, 0.0));
        assert!(alpha.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ideal_mask_negates_initial_phase() {
        let geo = half_wave_geometry(11);
        let scenario = Scenario::new(geo, deg(0.0, 0.0), deg(60.0, 0.0));
        let beta = ideal_continuous_mask(&scenario);
        assert_relative_eq!(beta.get(1, 0), -PI * 3f64.sqrt() / 2.0, max_relative = 1e-12);

        let alpha = initial_phase_field(geo, scenario.incident, scenario.target);
        for (a, b) in alpha.values().iter().zip(beta.values()) {
            assert_eq!(a + b, 0.0);
        }
    }

    #[test]
    fn two_state_set_examples() {
        let set = two_state_set(0.0, PI, None).unwrap();
        assert_relative_eq!(set.coefficient(0).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(set.coefficient(1).re, -1.0, epsilon = 1e-15);

        let set = two_state_set(0.0, 110f64.to_radians(), None).unwrap();
        assert_relative_eq!(set.phase(1).to_degrees(), 110.0, max_relative = 1e-12);

        let set = two_state_set(0.0, PI, Some((0.89, 0.73))).unwrap();
        assert_relative_eq!(20.0 * set.amplitude(0).log10(), -1.0, epsilon = 0.02);
        assert_relative_eq!(20.0 * set.amplitude(1).log10(), -2.7, epsilon = 0.05);
    }

    #[test]
    fn two_state_set_rejects_psi_out_of_range() {
        assert!(two_state_set(0.0, 0.0, None).is_err());
        assert!(two_state_set(0.0, PI + 0.01, None).is_err());
    }

    #[test]
    fn uniform_state_sets() {
        let set = uniform_state_set(1).unwrap();
        assert_eq!(set.len(), 2);
        assert_relative_eq!(set.phase(1), PI, max_relative = 1e-15);

        let set = uniform_state_set(2).unwrap();
        assert_eq!(set.len(), 4);
        assert_relative_eq!(set.phase(1).to_degrees(), 90.0, max_relative = 1e-12);

        let set = uniform_state_set(3).unwrap();
        assert_eq!(set.len(), 8);
        assert_relative_eq!(
            (set.phase(1) - set.phase(0)).to_degrees(),
            45.0,
            max_relative = 1e-12
        );

        assert!(uniform_state_set(0).is_err());
        assert!(uniform_state_set(9).is_err());
    }

    #[test]
    fn quantize_examples() {
        let geo = RisGeometry::new(1, 1, 0.005, 0.005, 0.0107).unwrap();
        let set = two_state_set(0.0, PI, None).unwrap();

        let field = PhaseField::new(geo, vec![170f64.to_radians()]).unwrap();
        assert_eq!(quantize_mask(&field, &set).states(), &[1]);

        // Exact halfway between the two states: lower index wins.
        let field = PhaseField::new(geo, vec![PI / 2.0]).unwrap();
        assert_eq!(quantize_mask(&field, &set).states(), &[0]);

        // -2.7207 rad wraps to ~204.1 deg, closer to the 180 deg state.
        let field = PhaseField::new(geo, vec![-2.7207]).unwrap();
        assert_eq!(quantize_mask(&field, &set).states(), &[1]);
    }

    #[test]
    fn e_pd_examples() {
        let geo = half_wave_geometry(11);
        let scenario = Scenario::new(geo, deg(0.0, 0.0), deg(60.0, 0.0));
        let beta = ideal_continuous_mask(&scenario);
        let e = phase_distribution_error(&scenario, AppliedMask::Continuous(&beta)).unwrap();
        assert!(e.abs() < 1e-9, "ideal mask e_pd = {e}");

        // 1x2 array with alpha* = {0, pi} and an all-zero mask: destructive pair.
        let lam = C / 28e9;
        let geo_pair = RisGeometry::new(2, 1, lam / 2.0, lam / 2.0, lam).unwrap();
        let scenario = Scenario::new(geo_pair, deg(0.0, 0.0), deg(90.0, 0.0));
        let alpha = initial_phase_field(geo_pair, scenario.incident, scenario.target);
        assert_relative_eq!(alpha.values()[1], PI, max_relative = 1e-12);
        let zeros = PhaseField::zeros(geo_pair);
        let e = phase_distribution_error(&scenario, AppliedMask::Continuous(&zeros)).unwrap();
        assert_relative_eq!(e, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn e_pd_rejects_geometry_mismatch() {
        let geo_a = half_wave_geometry(3);
        let geo_b = half_wave_geometry(4);
        let scenario = Scenario::new(geo_a, deg(0.0, 0.0), deg(60.0, 0.0));
        let zeros = PhaseField::zeros(geo_b);
        assert!(matches!(
            phase_distribution_error(&scenario, AppliedMask::Continuous(&zeros)),
            Err(Error::GeometryMismatch(_))
        ));
    }

    // Regression constant for the 11x11 scenario with the ideal 1-bit set,
    // frozen from a direct evaluation of the 121-cell sum.
    #[test]
    fn e_pd_quantized_11x11_regression() {
        let geo = half_wave_geometry(11);
        let scenario = Scenario::new(geo, deg(0.0, 0.0), deg(60.0, 0.0));
        let set = two_state_set(0.0, PI, None).unwrap();
        let mask = quantize_mask(&ideal_continuous_mask(&scenario), &set);
        let e = phase_distribution_error(&scenario, AppliedMask::Discrete(&mask, &set)).unwrap();
        assert_relative_eq!(e, 36.874888357494775, epsilon = 1e-9);
    }

    fn arbitrary_direction() -> impl Strategy<Value = Direction> {
        (0.0f64..=90.0, 0.0f64..360.0).prop_map(|(t, p)| Direction::from_degrees(t, p).unwrap())
    }

    fn arbitrary_scenario() -> impl Strategy<Value = Scenario> {
        (1usize..8, 1usize..8, arbitrary_direction(), arbitrary_direction()).prop_map(
            |(qx, qy, incident, target)| {
                let lam = C / 28e9;
                let geo = RisGeometry::new(qx, qy, lam / 2.0, lam / 2.0, lam).unwrap();
                Scenario::new(geo, incident, target)
            },
        )
    }

    proptest! {
        #[test]
        fn cosines_exchange_symmetry(a in arbitrary_direction(), b in arbitrary_direction()) {
            let ab = directional_cosines(a, b);
            let ba = directional_cosines(b, a);
            prop_assert_eq!(ab.w_x, ba.w_x);
            prop_assert_eq!(ab.w_y, ba.w_y);
        }

        #[test]
        fn cosines_bounded(a in arbitrary_direction(), b in arbitrary_direction()) {
            let w = directional_cosines(a, b);
            prop_assert!(w.w_x.abs() <= 2.0);
            prop_assert!(w.w_y.abs() <= 2.0);
        }

        #[test]
        fn ideal_mask_cancels(scenario in arbitrary_scenario()) {
            let beta = ideal_continuous_mask(&scenario);
            let e = phase_distribution_error(&scenario, AppliedMask::Continuous(&beta)).unwrap();
            prop_assert!(e.abs() < 1e-9, "e_pd = {}", e);
        }

        #[test]
        fn e_pd_within_bounds(
            scenario in arbitrary_scenario(),
            phases in proptest::collection::vec(-10.0f64..10.0, 64),
        ) {
            let cells = scenario.geometry.cells();
            let field = PhaseField::new(scenario.geometry, phases[..cells].to_vec()).unwrap();
            let e = phase_distribution_error(&scenario, AppliedMask::Continuous(&field)).unwrap();
            prop_assert!(e >= -1e-9);
            prop_assert!(e <= cells as f64 + 1e-9);
        }

        #[test]
        fn quantize_is_idempotent(
            scenario in arbitrary_scenario(),
            psi_deg in 1.0f64..=180.0,
        ) {
            let set = two_state_set(0.0, psi_deg.to_radians(), None).unwrap();
            let mask = quantize_mask(&ideal_continuous_mask(&scenario), &set);
            let snapped: Vec<f64> = mask.states().iter().map(|&k| set.phase(k)).collect();
            let snapped = PhaseField::new(scenario.geometry, snapped).unwrap();
            prop_assert_eq!(quantize_mask(&snapped, &set), mask);
        }

        #[test]
        fn quantize_offset_shifts_with_gamma(
            scenario in arbitrary_scenario(),
            offset in -6.0f64..6.0,
        ) {
            let beta = ideal_continuous_mask(&scenario);
            let base = quantize_mask(&beta, &two_state_set(0.0, PI, None).unwrap());
            let shifted_set = two_state_set(offset, PI, None).unwrap();
            let shifted = quantize_mask(&beta.with_offset(offset).unwrap(), &shifted_set);
            prop_assert_eq!(base.states(), shifted.states());
        }
    }
}
