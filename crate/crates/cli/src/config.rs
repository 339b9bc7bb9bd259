//! Run configuration: a TOML file with a `[device]` section shared by every
//! command and per-command `[task.*]` sections. Unknown keys are rejected
//! and the whole device is validated before any computation.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use cqad_core::acoustics::{EnergyScales, IdtGeometry};
use cqad_core::model::{
    AcousticMode, AcousticModeSet, CouplingParams, ModeKind, PhysicalConstants, TransmonParams,
};
use cqad_core::reflection::{CavityIdt, Device};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    #[serde(default)]
    pub task: TaskConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(default)]
    pub constants: ConstantsConfig,
    pub transmon: TransmonConfig,
    pub coupling: CouplingConfig,
    pub cavity_idt: CavityIdtConfig,
    pub modes: ModesConfig,
    pub geometry: GeometryConfig,
    pub scales: ScalesConfig,
}

/// Material constants; defaults are the documented GaAs values.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub v_s: f64,
    pub e_pz: f64,
    pub epsilon: f64,
    pub density: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let gaas = PhysicalConstants::gaas();
        ConstantsConfig {
            v_s: gaas.v_s,
            e_pz: gaas.e_pz,
            epsilon: gaas.epsilon,
            density: gaas.density,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonConfig {
    pub omega_max: f64,
    pub i0: f64,
    pub ib: f64,
    pub alpha: f64,
    pub levels: usize,
    pub gamma_intrinsic: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub g0: f64,
    pub phi_q: f64,
    pub transverse_ratio: f64,
    pub label_offset: i32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityIdtConfig {
    pub kappa0: f64,
    pub phi_c: f64,
    pub n_periods: u32,
    pub f_center: f64,
}

/// Mode table: either synthesized from the comb parameters or given
/// explicitly; exactly one of the two must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub synthesize: Option<SynthesizeModes>,
    pub table: Option<Vec<ModeEntry>>,
    pub fsr: f64,
    pub mirror_bandwidth: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeModes {
    /// Number of longitudinal modes, labelled 1..count.
    pub count: u32,
    /// Label whose frequency coincides with the transducer center.
    pub center_label: u32,
    pub kappa_longitudinal: f64,
    pub kappa_transverse: f64,
    /// Transverse satellite offset above the parent longitudinal mode.
    pub transverse_offset: f64,
    pub transverse_parents: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub label: u32,
    pub kind: String,
    pub frequency: f64,
    pub kappa_internal: f64,
    /// Signed readout amplitude; derived from the transducer model when
    /// absent (transverse entries get the transverse_ratio on top).
    pub external_amplitude: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_q: u32,
    pub x0: f64,
    pub width: f64,
    pub cavity_length: f64,
    /// Effective cavity area; width * cavity_length when absent.
    pub area: Option<f64>,
    /// Finger edge spacing; an eighth of v_s / f_center when absent.
    pub finger_edge_spacing: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesConfig {
    pub e_j: f64,
    pub e_c: f64,
    pub beta: f64,
    pub k2: f64,
    pub c_s: f64,
    pub l_j: f64,
    pub c_idt: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub bare_spectrum: Option<BareSpectrumTask>,
    pub flux_sweep: Option<FluxSweepTask>,
    pub participation: Option<ParticipationTask>,
    pub dispersive: Option<DispersiveTask>,
    pub stark: Option<StarkTask>,
    pub emission: Option<EmissionTask>,
    pub fit: Option<FitTask>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BareSpectrumTask {
    pub f_start: f64,
    pub f_stop: f64,
    pub points: usize,
    /// Multiplicative magnitude noise (fraction), seeded by --seed.
    #[serde(default)]
    pub noise: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSweepTask {
    pub current_start: f64,
    pub current_stop: f64,
    pub current_points: usize,
    pub f_start: f64,
    pub f_stop: f64,
    pub freq_points: usize,
    #[serde(default)]
    pub noise: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticipationTask {
    pub current_start: f64,
    pub current_stop: f64,
    pub points: usize,
    /// Longitudinal mode whose eigenbranch is tracked adiabatically.
    pub tracked_label: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveTask {
    pub omega_q_start: f64,
    pub omega_q_stop: f64,
    pub points: usize,
    pub mode_label: u32,
    #[serde(default)]
    pub phonon_index: usize,
    pub levels: usize,
    pub n_max: usize,
    /// Qubit-mode coupling; the device pattern value when absent.
    pub g: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarkTask {
    pub omega_q_values: Vec<f64>,
    pub phonon_max: usize,
    pub mode_label: u32,
    pub levels: usize,
    pub n_max: usize,
    pub g: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionTask {
    pub f_start: f64,
    pub f_stop: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitTask {
    /// "bare" | "flux" | "stark"
    pub kind: String,
    /// Input CSV in the matching emitted schema.
    pub data: Option<String>,
    pub g0_init: Option<f64>,
    pub phi_q_init: Option<f64>,
    pub ib_init: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::config(format!("{e}")))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.device()?.validate().map_err(CliError::from_config_error)?;
        self.constants().validate().map_err(CliError::from_config_error)?;
        self.geometry()?.validate().map_err(CliError::from_config_error)?;
        self.scales().validate().map_err(CliError::from_config_error)?;
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        let c = &self.device.constants;
        PhysicalConstants {
            v_s: c.v_s,
            e_pz: c.e_pz,
            epsilon: c.epsilon,
            density: c.density,
            hbar: cqad_core::model::HBAR,
            e: cqad_core::model::ELECTRON_CHARGE,
        }
    }

    pub fn transmon(&self) -> TransmonParams {
        let t = &self.device.transmon;
        TransmonParams {
            omega_max: t.omega_max,
            i0: t.i0,
            ib: t.ib,
            alpha: t.alpha,
            levels: t.levels,
            gamma_intrinsic: t.gamma_intrinsic,
        }
    }

    pub fn coupling(&self) -> CouplingParams {
        let c = &self.device.coupling;
        CouplingParams {
            g0: c.g0,
            phi_q: c.phi_q,
            transverse_ratio: c.transverse_ratio,
            label_offset: c.label_offset,
        }
    }

    pub fn cavity_idt(&self) -> CavityIdt {
        let c = &self.device.cavity_idt;
        CavityIdt {
            kappa0: c.kappa0,
            phi_c: c.phi_c,
            n_periods: c.n_periods,
            f_center: c.f_center,
        }
    }

    pub fn mode_set(&self) -> Result<AcousticModeSet, CliError> {
        let idt = self.cavity_idt();
        let cfg = &self.device.modes;
        let ratio = self.device.coupling.transverse_ratio;
        let entries: Vec<AcousticMode> = match (&cfg.synthesize, &cfg.table) {
            (Some(s), None) => {
                let mut out = Vec::new();
                for label in 1..=s.count {
                    let f = idt.f_center + (label as f64 - s.center_label as f64) * cfg.fsr;
                    out.push(AcousticMode {
                        label,
                        kind: ModeKind::Longitudinal,
                        frequency: f,
                        kappa_internal: s.kappa_longitudinal,
                        external_amplitude: idt.amplitude(label, f).0,
                    });
                }
                for &label in &s.transverse_parents {
                    if label < 1 || label > s.count {
                        return Err(CliError::config(format!(
                            "transverse parent {label} outside the longitudinal range"
                        )));
                    }
                    let f = idt.f_center
                        + (label as f64 - s.center_label as f64) * cfg.fsr
                        + s.transverse_offset;
                    out.push(AcousticMode {
                        label,
                        kind: ModeKind::Transverse,
                        frequency: f,
                        kappa_internal: s.kappa_transverse,
                        external_amplitude: ratio * idt.amplitude(label, f).0,
                    });
                }
                out
            }
            (None, Some(table)) => table
                .iter()
                .map(|e| {
                    let kind = match e.kind.as_str() {
                        "longitudinal" => ModeKind::Longitudinal,
                        "transverse" => ModeKind::Transverse,
                        other => {
                            return Err(CliError::config(format!(
                                "unknown mode kind '{other}' (longitudinal | transverse)"
                            )))
                        }
                    };
                    let amplitude = e.external_amplitude.unwrap_or_else(|| {
                        let base = idt.amplitude(e.label, e.frequency).0;
                        match kind {
                            ModeKind::Longitudinal => base,
                            ModeKind::Transverse => ratio * base,
                        }
                    });
                    Ok(AcousticMode {
                        label: e.label,
                        kind,
                        frequency: e.frequency,
                        kappa_internal: e.kappa_internal,
                        external_amplitude: amplitude,
                    })
                })
                .collect::<Result<_, _>>()?,
            _ => {
                return Err(CliError::config(
                    "exactly one of device.modes.synthesize or device.modes.table is required"
                        .into(),
                ))
            }
        };
        AcousticModeSet::new(entries, cfg.fsr, idt.f_center, cfg.mirror_bandwidth)
            .map_err(CliError::from_config_error)
    }

    pub fn device(&self) -> Result<Device, CliError> {
        Ok(Device {
            modes: self.mode_set()?,
            transmon: self.transmon(),
            coupling: self.coupling(),
            cavity_idt: self.cavity_idt(),
        })
    }

    pub fn geometry(&self) -> Result<IdtGeometry, CliError> {
        let g = &self.device.geometry;
        let spacing = g
            .finger_edge_spacing
            .unwrap_or(self.device.constants.v_s / self.device.cavity_idt.f_center / 8.0);
        let mut geom = IdtGeometry::split_finger(
            g.n_q,
            self.device.cavity_idt.n_periods,
            spacing,
            g.x0,
            g.width,
            g.cavity_length,
        );
        if let Some(area) = g.area {
            geom.area = area;
        }
        Ok(geom)
    }

    pub fn scales(&self) -> EnergyScales {
        let s = &self.device.scales;
        EnergyScales {
            e_j: s.e_j,
            e_c: s.e_c,
            beta: s.beta,
            k2: s.k2,
            c_s: s.c_s,
            l_j: s.l_j,
            c_idt: s.c_idt,
        }
    }
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::config("grids need at least 2 points".into()));
    }
    if !(stop > start) {
        return Err(CliError::config("grid stop must exceed start".into()));
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + i as f64 * step).collect())
}
