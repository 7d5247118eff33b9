//! Experiment and figure pipelines: compose synthesis, optimization, and
//! pattern sweeps, then write CSV/JSON/SVG artifacts with provenance
//! metadata (seed and spec hash) embedded in every file.

use std::path::Path;
use std::time::Instant;

use ris_core::{
    array_factor, exhaustive_optimize, ga_optimize, ideal_continuous_mask, pattern_metrics,
    pattern_sweep, phase_distribution_error, quantize_mask, two_state_set, uniform_state_set,
    AppliedMask, Direction, GaConfig, PatternCut, PatternMetrics, RisGeometry, Scenario, StateMask,
    StateSet, SweepGrid,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::export;
use crate::spec::{ExperimentSpec, Mode};
use crate::svg::{line_chart, Curve};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Six-decimal fixed formatting used for every float we serialize.
pub fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(CliError::io(path))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Pattern metrics and synthesis figures echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub peak_theta_deg: f64,
    pub peak_db: f64,
    pub gain_at_target_db: f64,
    pub specular_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_sidelobe_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_sidelobe_theta_deg: Option<f64>,
    pub target_peak_offset_deg: f64,
    /// Phase-distribution error e_pd of the applied mask.
    pub e_pd: f64,
    /// Coherent-sum magnitude toward the target.
    pub fitness: f64,
    /// Fitness of the nearest-state quantized mask (optimizer modes only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_fitness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations_run: Option<usize>,
}

fn metrics_doc(m: &PatternMetrics, e_pd: f64, fitness: f64) -> MetricsDoc {
    MetricsDoc {
        peak_theta_deg: m.peak_theta.to_degrees(),
        peak_db: m.peak_db,
        gain_at_target_db: m.gain_at_target_db,
        specular_db: m.specular_db,
        first_sidelobe_db: m.first_sidelobe.map(|(db, _)| db),
        first_sidelobe_theta_deg: m.first_sidelobe.map(|(_, th)| th.to_degrees()),
        target_peak_offset_deg: m.target_peak_offset.to_degrees(),
        e_pd,
        fitness,
        baseline_fitness: None,
        generations_run: None,
    }
}

/// Provenance record for one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub spec: ExperimentSpec,
    pub spec_sha256: String,
    pub seed: u64,
    pub duration_ms: u64,
    pub metrics: MetricsDoc,
    pub artifacts: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PhaseFieldDoc {
    geometry: export::GeometryDoc,
    seed: u64,
    spec_sha256: String,
    /// One row per n_y, unwrapped compensation phases in degrees.
    values_deg: Vec<Vec<f64>>,
}

fn geometry_doc(geo: &RisGeometry) -> export::GeometryDoc {
    export::GeometryDoc {
        q_x: geo.q_x(),
        q_y: geo.q_y(),
        d_x_m: geo.d_x(),
        d_y_m: geo.d_y(),
        wavelength_m: geo.wavelength(),
    }
}

/// Writes the single-run pattern CSV: a provenance comment line, then
/// `theta_deg,magnitude,db` rows at six decimals.
fn single_csv(cut: &PatternCut, seed: u64, spec_hash: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# seed={seed} spec_sha256={spec_hash}\n"));
    out.push_str("theta_deg,magnitude,db\n");
    for s in cut.samples() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt6(s.theta.to_degrees()),
            fmt6(s.magnitude),
            fmt6(s.db)
        ));
    }
    out
}

/// Multi-curve CSV: provenance comment, `theta_deg` plus one dB column per
/// curve label.
fn multi_csv(thetas: &[f64], curves: &[(String, PatternCut)], seed: u64, spec_hash: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# seed={seed} spec_sha256={spec_hash}\n"));
    out.push_str("theta_deg");
    for (label, _) in curves {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, &theta) in thetas.iter().enumerate() {
        out.push_str(&fmt6(theta.to_degrees()));
        for (_, cut) in curves {
            out.push(',');
            out.push_str(&fmt6(cut.samples()[i].db));
        }
        out.push('\n');
    }
    out
}

fn chart_svg(
    title: &str,
    curves: &[(String, PatternCut)],
    seed: u64,
    spec_hash: &str,
) -> String {
    let point_sets: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|(_, cut)| cut.samples().iter().map(|s| (s.theta.to_degrees(), s.db)).collect())
        .collect();
    let svg_curves: Vec<Curve<'_>> = curves
        .iter()
        .zip(&point_sets)
        .map(|((label, _), pts)| Curve { label, points: pts })
        .collect();
    let body = line_chart(title, "theta_r (deg)", "|g_pd| (dB)", &svg_curves);
    format!("<!-- seed={seed} spec_sha256={spec_hash} -->\n{body}")
}

/// Result of mask synthesis for one spec: the discrete mask (if any) plus
/// optimizer by-products.
struct Synthesized {
    mask: Option<(StateMask, StateSet)>,
    e_pd: f64,
    fitness: f64,
    baseline_fitness: Option<f64>,
    generations_run: Option<usize>,
}

fn synthesize(spec: &ExperimentSpec, scenario: &Scenario, seed: u64) -> Result<Synthesized> {
    let beta = ideal_continuous_mask(scenario);
    match spec.mode {
        Mode::Continuous => {
            let applied = AppliedMask::Continuous(&beta);
            let e_pd = phase_distribution_error(scenario, applied)?;
            let fitness = array_factor(
                scenario.geometry,
                AppliedMask::Continuous(&beta),
                scenario.incident,
                scenario.target,
            )?
            .norm();
            Ok(Synthesized {
                mask: None,
                e_pd,
                fitness,
                baseline_fitness: None,
                generations_run: None,
            })
        }
        Mode::Quantize => {
            let set = spec.state_set()?;
            let mask = quantize_mask(&beta, &set);
            let e_pd = phase_distribution_error(scenario, AppliedMask::Discrete(&mask, &set))?;
            let fitness = ris_core::fitness(&mask, scenario, &set)?;
            Ok(Synthesized {
                mask: Some((mask, set)),
                e_pd,
                fitness,
                baseline_fitness: None,
                generations_run: None,
            })
        }
        Mode::Ga => {
            let set = spec.state_set()?;
            let result = ga_optimize(scenario, &set, &spec.ga_config(seed))?;
            let e_pd = phase_distribution_error(
                scenario,
                AppliedMask::Discrete(&result.best_mask, &set),
            )?;
            Ok(Synthesized {
                e_pd,
                fitness: result.best_fitness,
                baseline_fitness: Some(result.baseline_fitness),
                generations_run: Some(result.generations_run),
                mask: Some((result.best_mask, set)),
            })
        }
        Mode::Exhaustive => {
            let set = spec.state_set()?;
            let (mask, fitness) = exhaustive_optimize(scenario, &set)?;
            let baseline = ris_core::fitness(&quantize_mask(&beta, &set), scenario, &set)?;
            let e_pd = phase_distribution_error(scenario, AppliedMask::Discrete(&mask, &set))?;
            Ok(Synthesized {
                mask: Some((mask, set)),
                e_pd,
                fitness,
                baseline_fitness: Some(baseline),
                generations_run: None,
            })
        }
    }
}

/// Runs one experiment spec end to end and writes its artifact files into
/// `out_dir`: `pattern.csv`, `mask.json` or `phase_field.json`,
/// `manifest.json`, and optionally `pattern.svg`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out_dir: &Path,
    write_svg: bool,
) -> Result<RunManifest> {
    let started = Instant::now();
    spec.validate()?;
    let scenario = spec.scenario()?;
    let seed = spec.seed;
    let spec_hash = sha256_hex(
        &serde_json::to_string(spec)
            .map_err(|e| CliError::Spec(format!("spec serialization failed: {e}")))?,
    );
    ensure_dir(out_dir)?;

    let beta = ideal_continuous_mask(&scenario);
    let synth = synthesize(spec, &scenario, seed)?;
    let grid = spec.sweep_grid()?;
    let phi_r = spec.sweep.phi_r_deg.to_radians();
    let cut = match &synth.mask {
        Some((mask, set)) => pattern_sweep(
            scenario.geometry,
            AppliedMask::Discrete(mask, set),
            scenario.incident,
            phi_r,
            grid,
        )?,
        None => pattern_sweep(
            scenario.geometry,
            AppliedMask::Continuous(&beta),
            scenario.incident,
            phi_r,
            grid,
        )?,
    };
    let pm = pattern_metrics(&cut, scenario.target)?;

    let mut artifacts = Vec::new();
    let csv_path = out_dir.join("pattern.csv");
    write_text(&csv_path, &single_csv(&cut, seed, &spec_hash))?;
    artifacts.push("pattern.csv".to_string());

    match &synth.mask {
        Some((mask, set)) => {
            export::write_mask(&out_dir.join("mask.json"), mask, set)?;
            artifacts.push("mask.json".to_string());
        }
        None => {
            let geo = &scenario.geometry;
            let values_deg = (0..geo.q_y())
                .map(|n_y| (0..geo.q_x()).map(|n_x| beta.get(n_x, n_y).to_degrees()).collect())
                .collect();
            let doc = PhaseFieldDoc {
                geometry: geometry_doc(geo),
                seed,
                spec_sha256: spec_hash.clone(),
                values_deg,
            };
            let text = serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::Spec(format!("phase-field serialization failed: {e}")))?;
            write_text(&out_dir.join("phase_field.json"), &(text + "\n"))?;
            artifacts.push("phase_field.json".to_string());
        }
    }

    if write_svg {
        let label = match spec.mode {
            Mode::Continuous => "continuous".to_string(),
            Mode::Quantize => "quantized".to_string(),
            Mode::Ga => "ga".to_string(),
            Mode::Exhaustive => "exhaustive".to_string(),
        };
        let curves = vec![(label, cut.clone())];
        write_text(
            &out_dir.join("pattern.svg"),
            &chart_svg("Reflection pattern", &curves, seed, &spec_hash),
        )?;
        artifacts.push("pattern.svg".to_string());
    }

    let mut metrics = metrics_doc(&pm, synth.e_pd, synth.fitness);
    metrics.baseline_fitness = synth.baseline_fitness;
    metrics.generations_run = synth.generations_run;

    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        spec: spec.clone(),
        spec_sha256: spec_hash,
        seed,
        duration_ms: started.elapsed().as_millis() as u64,
        metrics,
        artifacts,
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Spec(format!("manifest serialization failed: {e}")))?;
    write_text(&out_dir.join("manifest.json"), &(text + "\n"))?;
    Ok(manifest)
}

/// Per-curve entry in a figure manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureCurve {
    pub label: String,
    pub gain_at_target_db: f64,
    pub peak_theta_deg: f64,
    pub specular_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_fitness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_fitness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations_run: Option<usize>,
}

/// Provenance record for one figure bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureManifest {
    pub figure: String,
    pub tool_version: String,
    pub spec_sha256: String,
    pub seed: u64,
    pub duration_ms: u64,
    pub curves: Vec<FigureCurve>,
    pub artifacts: Vec<String>,
}

/// The 11-element, half-wavelength-pitch, 28 GHz scenario steering broadside
/// incidence to 60 degrees that all packaged figures share.
pub fn reference_scenario() -> Scenario {
    let lam = crate::spec::SPEED_OF_LIGHT / 28e9;
    let geo = RisGeometry::new(11, 11, lam / 2.0, lam / 2.0, lam).expect("valid geometry");
    Scenario::new(
        geo,
        Direction::from_degrees(0.0, 0.0).expect("valid angle"),
        Direction::from_degrees(60.0, 0.0).expect("valid angle"),
    )
}

fn sweep_cut(scenario: &Scenario, applied: AppliedMask<'_>) -> Result<PatternCut> {
    let grid = SweepGrid::from_degrees(0.0, 90.0, 0.1)?;
    Ok(pattern_sweep(scenario.geometry, applied, scenario.incident, 0.0, grid)?)
}

struct FigureCurveBuild {
    label: String,
    cut: PatternCut,
    best_fitness: Option<f64>,
    baseline_fitness: Option<f64>,
    generations_run: Option<usize>,
}

fn plain_curve(label: &str, cut: PatternCut) -> FigureCurveBuild {
    FigureCurveBuild {
        label: label.to_string(),
        cut,
        best_fitness: None,
        baseline_fitness: None,
        generations_run: None,
    }
}

fn quantized_curve(
    label: &str,
    scenario: &Scenario,
    set: &StateSet,
) -> Result<FigureCurveBuild> {
    let mask = quantize_mask(&ideal_continuous_mask(scenario), set);
    Ok(plain_curve(label, sweep_cut(scenario, AppliedMask::Discrete(&mask, set))?))
}

fn ga_curve(
    label: &str,
    scenario: &Scenario,
    set: &StateSet,
    seed: u64,
) -> Result<FigureCurveBuild> {
    let result = ga_optimize(scenario, set, &GaConfig::with_seed(seed))?;
    let cut = sweep_cut(scenario, AppliedMask::Discrete(&result.best_mask, set))?;
    Ok(FigureCurveBuild {
        label: label.to_string(),
        cut,
        best_fitness: Some(result.best_fitness),
        baseline_fitness: Some(result.baseline_fitness),
        generations_run: Some(result.generations_run),
    })
}

fn build_figure(id: &str, seed: u64) -> Result<Vec<FigureCurveBuild>> {
    let scenario = reference_scenario();
    let beta = ideal_continuous_mask(&scenario);
    match id {
        // Quantized cuts across increasingly non-ideal two-state phase
        // differences: the designed lobe fades and specular grows.
        "fig3a" => [180.0f64, 164.0, 134.0, 72.0]
            .iter()
            .map(|&psi| {
                let set = two_state_set(0.0, psi.to_radians(), None)?;
                quantized_curve(&format!("Q {psi:.0}"), &scenario, &set)
            })
            .collect(),
        // Continuous versus uniform 3-/2-/1-bit quantization.
        "fig4" => {
            let mut curves =
                vec![plain_curve("continuous", sweep_cut(&scenario, AppliedMask::Continuous(&beta))?)];
            for bits in [3u32, 2, 1] {
                let set = uniform_state_set(bits)?;
                let mask = quantize_mask(&beta, &set);
                curves.push(plain_curve(
                    &format!("{bits}-bit"),
                    sweep_cut(&scenario, AppliedMask::Discrete(&mask, &set))?,
                ));
            }
            Ok(curves)
        }
        // Continuous plus quantized/GA pairs at four phase differences.
        "fig5" => {
            let mut curves =
                vec![plain_curve("continuous", sweep_cut(&scenario, AppliedMask::Continuous(&beta))?)];
            for psi in [180.0f64, 150.0, 110.0, 50.0] {
                let set = two_state_set(0.0, psi.to_radians(), None)?;
                curves.push(quantized_curve(&format!("Q {psi:.0}"), &scenario, &set)?);
                curves.push(ga_curve(&format!("G {psi:.0}"), &scenario, &set, seed)?);
            }
            Ok(curves)
        }
        other => Err(CliError::Spec(format!(
            "unknown figure id '{other}'; valid ids are fig3a, fig4, fig5"
        ))),
    }
}

/// Reproduces one packaged figure: writes `<id>.csv`, `<id>_manifest.json`,
/// and optionally `<id>.svg` into `out_dir`.
pub fn reproduce_figure(
    id: &str,
    out_dir: &Path,
    seed: u64,
    write_svg: bool,
) -> Result<FigureManifest> {
    let started = Instant::now();
    ensure_dir(out_dir)?;
    let spec_hash = sha256_hex(&format!("{{\"figure\":\"{id}\",\"seed\":{seed}}}"));
    let built = build_figure(id, seed)?;

    let scenario = reference_scenario();
    let thetas: Vec<f64> = built[0].cut.samples().iter().map(|s| s.theta).collect();
    let curves: Vec<(String, PatternCut)> =
        built.iter().map(|b| (b.label.clone(), b.cut.clone())).collect();

    let mut artifacts = Vec::new();
    let csv_name = format!("{id}.csv");
    write_text(&out_dir.join(&csv_name), &multi_csv(&thetas, &curves, seed, &spec_hash))?;
    artifacts.push(csv_name);

    if write_svg {
        let svg_name = format!("{id}.svg");
        write_text(
            &out_dir.join(&svg_name),
            &chart_svg(&format!("Reflection patterns ({id})"), &curves, seed, &spec_hash),
        )?;
        artifacts.push(svg_name);
    }

    let mut curve_docs = Vec::with_capacity(built.len());
    for b in &built {
        let pm = pattern_metrics(&b.cut, scenario.target)?;
        curve_docs.push(FigureCurve {
            label: b.label.clone(),
            gain_at_target_db: pm.gain_at_target_db,
            peak_theta_deg: pm.peak_theta.to_degrees(),
            specular_db: pm.specular_db,
            best_fitness: b.best_fitness,
            baseline_fitness: b.baseline_fitness,
            generations_run: b.generations_run,
        });
    }

    let manifest = FigureManifest {
        figure: id.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        spec_sha256: spec_hash,
        seed,
        duration_ms: started.elapsed().as_millis() as u64,
        curves: curve_docs,
        artifacts,
    };
    let manifest_name = format!("{id}_manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Spec(format!("manifest serialization failed: {e}")))?;
    write_text(&out_dir.join(&manifest_name), &(text + "\n"))?;
    Ok(manifest)
}

/// Synthesizes the mask for a spec and writes only the mask document.
pub fn export_mask(spec: &ExperimentSpec, path: &Path) -> Result<()> {
    spec.validate()?;
    let scenario = spec.scenario()?;
    let synth = synthesize(spec, &scenario, spec.seed)?;
    match synth.mask {
        Some((mask, set)) => {
            export::write_mask(path, &mask, &set)?;
            // Read the artifact back so a broken write surfaces here rather
            // than in whatever consumes the file later.
            let (reread, _) = export::read_mask(path)?;
            if reread.states() != mask.states() {
                return Err(CliError::Spec(format!(
                    "{}: exported mask failed its round-trip check",
                    path.display()
                )));
            }
            Ok(())
        }
        None => Err(CliError::Core(ris_core::Error::Unsupported(
            "continuous phase fields have no discrete mask to export; use mode quantize, ga, or \
             exhaustive"
                .into(),
        ))),
    }
}
