//! One function per subcommand: load the validated config, synthesize or
//! fit, and write the output files atomically.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use cqad_core::acoustics::{emission_rate, qubit_linewidth};
use cqad_core::dispersive::{chi_flagged, chi_standard, dressed_energies, JcParams};
use cqad_core::fitting::{
    fit_bare_modes, fit_flux_map_with, fit_stark_slope, flux_map_magnitudes, BareFitConfig,
    FitOptions, FluxFitInit,
};
use cqad_core::model::ModeKind;
use cqad_core::reflection::{Device, FluxSweepMap, ReflectionSpectrum};
use cqad_core::spectral::coupling_strength;

use crate::config::{linspace, RunConfig};
use crate::csvio::{
    flux_map_csv, num, read_flux_map_csv, read_spectrum_csv, read_stark_csv, spectrum_csv,
    write_atomic,
};
use crate::{svg, CliError};

fn out_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(name)
}

fn apply_spectrum_noise(spectrum: &mut ReflectionSpectrum, noise: f64, seed: u64) {
    if noise <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in &mut spectrum.s11 {
        let xi: f64 = StandardNormal.sample(&mut rng);
        *s *= 1.0 + noise * xi;
    }
}

pub fn bare_spectrum(config: &RunConfig, out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .bare_spectrum
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.bare_spectrum]".into()))?;
    let device = config.device()?;
    let grid = linspace(task.f_start, task.f_stop, task.points)?;
    let mut spectrum = device.bare_reflection(&grid)?;
    apply_spectrum_noise(&mut spectrum, task.noise, seed);

    let csv = out_path(out_dir, "bare_spectrum.csv");
    write_atomic(&csv, &spectrum_csv(&spectrum))?;
    let mags = spectrum.magnitudes();
    let plot = svg::line_plot(
        "bare cavity reflection",
        "frequency (Hz)",
        "|s11|",
        &grid,
        &mags,
    );
    let svg_path = out_path(out_dir, "bare_spectrum.svg");
    write_atomic(&svg_path, &plot)?;
    Ok(vec![csv, svg_path])
}

pub fn flux_sweep(config: &RunConfig, out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .flux_sweep
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.flux_sweep]".into()))?;
    let device = config.device()?;
    let currents = linspace(task.current_start, task.current_stop, task.current_points)?;
    let grid = linspace(task.f_start, task.f_stop, task.freq_points)?;
    let mut map = parallel_flux_sweep(&device, &currents, &grid)?;
    if task.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut map.magnitude {
            let xi: f64 = StandardNormal.sample(&mut rng);
            *v *= 1.0 + task.noise * xi;
        }
    }

    let csv = out_path(out_dir, "flux_sweep.csv");
    write_atomic(&csv, &flux_map_csv(&map))?;
    let plot = svg::heatmap(
        "cavity reflection vs flux",
        "coil current (A)",
        "frequency (Hz)",
        &map.currents,
        &map.frequencies,
        &map.magnitude,
    );
    let svg_path = out_path(out_dir, "flux_sweep.svg");
    write_atomic(&svg_path, &plot)?;
    Ok(vec![csv, svg_path])
}

/// Row-parallel sweep with deterministic row order; bit-identical to the
/// sequential [`cqad_core::reflection::flux_sweep`].
pub fn parallel_flux_sweep(
    device: &Device,
    currents: &[f64],
    grid: &[f64],
) -> Result<FluxSweepMap, CliError> {
    let rows: Result<Vec<Vec<f64>>, cqad_core::Error> = currents
        .par_iter()
        .map(|&current| {
            device
                .reflection_at(current, grid)
                .map(|s| s.magnitudes())
        })
        .collect();
    let magnitude: Vec<f64> = rows?.into_iter().flatten().collect();
    FluxSweepMap::new(currents.to_vec(), grid.to_vec(), magnitude).map_err(CliError::from)
}

pub fn participation(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .participation
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.participation]".into()))?;
    let device = config.device()?;
    let modes = device.modes.clone();
    if modes
        .frequency_of(task.tracked_label, ModeKind::Longitudinal)
        .is_none()
    {
        return Err(CliError::config(format!(
            "tracked_label {} is not a longitudinal mode",
            task.tracked_label
        )));
    }
    let currents = linspace(task.current_start, task.current_stop, task.points)?;

    let mut header = String::from("current_a,omega_q_hz,eigenvalue_hz,p_qubit");
    for m in modes.modes() {
        let suffix = match m.kind {
            ModeKind::Longitudinal => String::new(),
            ModeKind::Transverse => String::from("t"),
        };
        header.push_str(&format!(",p_m{}{}", m.label, suffix));
    }
    header.push('\n');
    let mut body = String::new();

    // adiabatic tracking: start on the bare tracked mode, then follow the
    // eigenvector of largest overlap with the previous step
    let tracked_idx = modes
        .modes()
        .iter()
        .position(|m| m.label == task.tracked_label && m.kind == ModeKind::Longitudinal)
        .unwrap();
    let mut previous: Option<Vec<f64>> = None;
    for &current in &currents {
        let point = device.flux_point(current)?;
        let dim = point.eigen.dimension();
        let column = match &previous {
            None => (0..dim)
                .max_by(|&a, &b| {
                    point
                        .eigen
                        .participation(tracked_idx, a)
                        .partial_cmp(&point.eigen.participation(tracked_idx, b))
                        .unwrap()
                })
                .unwrap(),
            Some(prev) => (0..dim)
                .max_by(|&a, &b| {
                    let overlap = |k: usize| {
                        (0..dim)
                            .map(|r| prev[r] * point.eigen.eigenvectors.get(r, k))
                            .sum::<f64>()
                            .abs()
                    };
                    overlap(a).partial_cmp(&overlap(b)).unwrap()
                })
                .unwrap(),
        };
        previous = Some(point.eigen.eigenvectors.column(column));
        body.push_str(&format!(
            "{},{},{},{}",
            num(current),
            num(point.omega_q),
            num(point.eigen.eigenvalues[column]),
            num(point.eigen.qubit_participation[column])
        ));
        for r in 0..modes.len() {
            body.push_str(&format!(",{}", num(point.eigen.participation(r, column))));
        }
        body.push('\n');
    }

    let csv = out_path(out_dir, "participation.csv");
    write_atomic(&csv, &format!("{header}{body}"))?;
    Ok(vec![csv])
}

fn jc_params_for(config: &RunConfig, mode_label: u32, levels: usize, n_max: usize, g: Option<f64>, omega_q: f64) -> Result<JcParams, CliError> {
    let device = config.device()?;
    let omega_cav = device
        .modes
        .frequency_of(mode_label, ModeKind::Longitudinal)
        .ok_or_else(|| {
            CliError::config(format!("mode_label {mode_label} is not a longitudinal mode"))
        })?;
    let g = g.unwrap_or_else(|| {
        coupling_strength(mode_label, ModeKind::Longitudinal, &device.coupling).abs()
    });
    Ok(JcParams {
        omega_q,
        omega_cav,
        g,
        alpha: device.transmon.alpha,
        levels,
        n_max,
    })
}

pub fn dispersive(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .dispersive
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.dispersive]".into()))?;
    let grid = linspace(task.omega_q_start, task.omega_q_stop, task.points)?;
    let mut out = String::from("omega_q_hz,chi_hz,chi_standard_hz,ambiguous\n");
    for &wq in &grid {
        let p = jc_params_for(config, task.mode_label, task.levels, task.n_max, task.g, wq)?;
        let ladder = dressed_energies(&p)?;
        let (value, ambiguous) = chi_flagged(&ladder, task.phonon_index).ok_or_else(|| {
            CliError::config("phonon_index outside the truncated ladder".into())
        })?;
        let delta = wq - p.omega_cav;
        let standard = chi_standard(p.g, delta, p.alpha).unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{},{},{},{}\n",
            num(wq),
            num(value),
            num(standard),
            u8::from(ambiguous)
        ));
    }
    let csv = out_path(out_dir, "dispersive.csv");
    write_atomic(&csv, &out)?;
    Ok(vec![csv])
}

pub fn stark(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .stark
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.stark]".into()))?;
    let mut out = String::from("omega_q_hz,phonon,shift_hz\n");
    for &wq in &task.omega_q_values {
        let p = jc_params_for(config, task.mode_label, task.levels, task.n_max, task.g, wq)?;
        let phonons: Vec<usize> = (0..=task.phonon_max).collect();
        let shifts = cqad_core::dispersive::stark_curve(&phonons, &p)?;
        for (n, shift) in phonons.iter().zip(&shifts) {
            out.push_str(&format!("{},{},{}\n", num(wq), n, num(*shift)));
        }
    }
    let csv = out_path(out_dir, "stark.csv");
    write_atomic(&csv, &out)?;
    Ok(vec![csv])
}

pub fn emission(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .emission
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.emission]".into()))?;
    let geometry = config.geometry()?;
    let scales = config.scales();
    let transmon = config.transmon();
    let f_c = config.device.cavity_idt.f_center;
    let grid = linspace(task.f_start, task.f_stop, task.points)?;
    let mut out = String::from("frequency_hz,gamma_saw_hz,linewidth_hz\n");
    for &f in &grid {
        let gamma = emission_rate(f, geometry.n_q, f_c, scales.k2);
        let total = qubit_linewidth(f, transmon.gamma_intrinsic, geometry.n_q, f_c, scales.k2);
        out.push_str(&format!("{},{},{}\n", num(f), num(gamma), num(total)));
    }
    let csv = out_path(out_dir, "emission.csv");
    write_atomic(&csv, &out)?;
    Ok(vec![csv])
}

pub fn fit(
    config: &RunConfig,
    out_dir: &Path,
    data_override: Option<&Path>,
) -> Result<Vec<PathBuf>, CliError> {
    let task = config
        .task
        .fit
        .as_ref()
        .ok_or_else(|| CliError::config("missing [task.fit]".into()))?;
    let data_path: PathBuf = match data_override {
        Some(p) => p.to_path_buf(),
        None => task
            .data
            .as_ref()
            .map(PathBuf::from)
            .ok_or_else(|| CliError::config("no data path (task.fit.data or argument)".into()))?,
    };

    let result = match task.kind.as_str() {
        "bare" => {
            let spectrum = read_spectrum_csv(&data_path)?;
            let mut cfg = BareFitConfig::new(
                config.device.cavity_idt.n_periods,
                config.device.modes.fsr,
            );
            cfg.options = FitOptions::default();
            let outcome = fit_bare_modes(&spectrum, &cfg)?;
            json!({
                "kind": "bare",
                "pattern": outcome.pattern,
                "dips": outcome.dips,
                "warnings": outcome.warnings,
            })
        }
        "flux" => {
            let map = read_flux_map_csv(&data_path)?;
            let device = config.device()?;
            let init = FluxFitInit {
                g0: task.g0_init,
                phi_q: task.phi_q_init.unwrap_or(0.0),
                ib: task.ib_init.unwrap_or(0.0),
            };
            // residual evaluations run row-parallel; the optimizer itself
            // stays sequential
            let fit = fit_flux_map_with(
                &map,
                &device,
                &init,
                &FitOptions::default(),
                |g0, phi_q, ib| {
                    let rows: Result<Vec<Vec<f64>>, cqad_core::Error> = map
                        .currents
                        .par_iter()
                        .map(|&current| {
                            flux_map_magnitudes(
                                &device,
                                &[current],
                                &map.frequencies,
                                g0,
                                phi_q,
                                ib,
                            )
                        })
                        .collect();
                    Ok(rows?.into_iter().flatten().collect())
                },
            )?;
            json!({ "kind": "flux", "result": fit })
        }
        "stark" => {
            let groups = read_stark_csv(&data_path)?;
            if groups.is_empty() {
                return Err(CliError::runtime("stark csv has no data".into()));
            }
            let fits: Result<Vec<serde_json::Value>, CliError> = groups
                .iter()
                .map(|(wq, points)| {
                    let fit = fit_stark_slope(points)?;
                    Ok(json!({ "omega_q_hz": wq, "result": fit }))
                })
                .collect();
            json!({ "kind": "stark", "fits": fits? })
        }
        other => {
            return Err(CliError::config(format!(
                "unknown fit kind '{other}' (bare | flux | stark)"
            )))
        }
    };

    let path = out_path(out_dir, "fit_result.json");
    let text = serde_json::to_string_pretty(&result)
        .map_err(|e| CliError::runtime(format!("json: {e}")))?;
    write_atomic(&path, &format!("{text}\n"))?;
    Ok(vec![path])
}

