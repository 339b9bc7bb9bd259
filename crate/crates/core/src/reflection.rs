//! One-port microwave reflection of the acoustic cavity.
//!
//! Every spectrum is a coherent sum of input-output Lorentzians,
//!
//! ```text
//! s11(f) = 1 - sum_m kex_m / (i (f - f_m) + (kin_m + kex_m) / 2)
//! ```
//!
//! with all quantities in linear Hz. An isolated mode dips to
//! `|kin - kex| / (kin + kex)` on resonance and the |s11|^2 dip has FWHM
//! `kin + kex`. The same line shape is reused for the hybridized cavity with
//! the eigenvalues and dressed rates in place of the bare ones; interference
//! between modes enters only through the signed amplitude sum inside the
//! dressed external rates.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{qubit_frequency, AcousticModeSet, CouplingParams, TransmonParams};
use crate::spectral::{
    build_interaction, diagonalize, hybridized_rates, EigenSystem, HybridizedRate,
};
use crate::util::sinc;

/// Readout transducer parameters: base external rate `kappa0`, positional
/// phase `phi_c`, finger periods and center frequency of the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityIdt {
    pub kappa0: f64,
    pub phi_c: f64,
    pub n_periods: u32,
    pub f_center: f64,
}

impl CavityIdt {
    pub fn validate(&self) -> Result<()> {
        if self.kappa0 < 0.0 {
            return Err(Error::Domain(String::from("kappa0 must be >= 0")));
        }
        if self.n_periods < 1 {
            return Err(Error::Domain(String::from("n_periods must be >= 1")));
        }
        if !(self.f_center > 0.0) {
            return Err(Error::Domain(String::from("f_center must be positive")));
        }
        Ok(())
    }

    /// Signed amplitude and external rate of a mode through this transducer.
    pub fn amplitude(&self, label: u32, f_m: f64) -> (f64, f64) {
        external_amplitude(label, f_m, self.kappa0, self.phi_c, self.n_periods, self.f_center)
    }
}

/// Signed external amplitude of mode `label` at frequency `f_m`:
///
/// ```text
/// a_m = sin(label pi / 2 + phi_c) * sinc(pi N_c (f_m - f_c) / f_c)
/// kex = kappa0 * a_m^2
/// ```
///
/// The sign of `a_m` is irrelevant for the bare rate but carries the
/// interference structure of hybridized-mode superpositions.
pub fn external_amplitude(
    label: u32,
    f_m: f64,
    kappa0: f64,
    phi_c: f64,
    n_c: u32,
    f_c: f64,
) -> (f64, f64) {
    let x = core::f64::consts::PI * n_c as f64 * (f_m - f_c) / f_c;
    let a = libm::sin(label as f64 * core::f64::consts::FRAC_PI_2 + phi_c) * sinc(x);
    (a, kappa0 * a * a)
}

/// A single synthesized reflection trace plus the parameters it was taken at.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpectrum {
    pub frequencies: Vec<f64>,
    pub s11: Vec<Complex64>,
    pub meta: SpectrumMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumMeta {
    /// Coil current the trace was synthesized at, if flux dependent.
    pub flux_bias: Option<f64>,
    /// Qubit frequency at that bias.
    pub omega_q: Option<f64>,
}

impl ReflectionSpectrum {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.s11.iter().map(|s| s.norm()).collect()
    }
}

/// Long-format 2-D map of |s11| over (current, frequency).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSweepMap {
    pub currents: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// Row-major |s11|: index [current][frequency].
    pub magnitude: Vec<f64>,
}

impl FluxSweepMap {
    pub fn new(currents: Vec<f64>, frequencies: Vec<f64>, magnitude: Vec<f64>) -> Result<Self> {
        if magnitude.len() != currents.len() * frequencies.len() {
            return Err(Error::Shape {
                expected: currents.len() * frequencies.len(),
                got: magnitude.len(),
            });
        }
        Ok(FluxSweepMap {
            currents,
            frequencies,
            magnitude,
        })
    }

    #[inline]
    pub fn get(&self, current_idx: usize, freq_idx: usize) -> f64 {
        self.magnitude[current_idx * self.frequencies.len() + freq_idx]
    }

    pub fn row(&self, current_idx: usize) -> &[f64] {
        let n = self.frequencies.len();
        &self.magnitude[current_idx * n..(current_idx + 1) * n]
    }
}

/// Coherent Lorentzian sum shared by the bare and hybridized spectra.
fn lorentzian_sum(
    grid: &[f64],
    centers: &[f64],
    rates: &[HybridizedRate],
) -> Result<Vec<Complex64>> {
    if centers.len() != rates.len() {
        return Err(Error::Shape {
            expected: centers.len(),
            got: rates.len(),
        });
    }
    if rates.iter().any(|r| r.kappa_ex < 0.0 || r.kappa_in < 0.0) {
        return Err(Error::Domain(String::from("loss rates must be >= 0")));
    }
    let mut out = Vec::with_capacity(grid.len());
    for &f in grid {
        let mut s = Complex64::new(1.0, 0.0);
        for (fm, r) in centers.iter().zip(rates) {
            let denom = Complex64::new(0.5 * (r.kappa_in + r.kappa_ex), f - fm);
            s -= r.kappa_ex / denom;
        }
        out.push(s);
    }
    Ok(out)
}

/// Reflection of the bare cavity (qubit far detuned).
pub fn bare_reflection(
    grid: &[f64],
    modes: &AcousticModeSet,
    kappa0: f64,
) -> Result<ReflectionSpectrum> {
    if kappa0 < 0.0 {
        return Err(Error::Domain(String::from("kappa0 must be >= 0")));
    }
    let centers: Vec<f64> = modes.modes().iter().map(|m| m.frequency).collect();
    let rates: Vec<HybridizedRate> = modes
        .modes()
        .iter()
        .map(|m| HybridizedRate {
            kappa_ex: kappa0 * m.external_amplitude * m.external_amplitude,
            kappa_in: m.kappa_internal,
        })
        .collect();
    Ok(ReflectionSpectrum {
        frequencies: grid.to_vec(),
        s11: lorentzian_sum(grid, &centers, &rates)?,
        meta: SpectrumMeta::default(),
    })
}

/// Reflection of the hybridized cavity from an eigen decomposition and the
/// matching dressed rates.
pub fn hybridized_reflection(
    grid: &[f64],
    es: &EigenSystem,
    rates: &[HybridizedRate],
) -> Result<ReflectionSpectrum> {
    if rates.len() != es.dimension() {
        return Err(Error::Shape {
            expected: es.dimension(),
            got: rates.len(),
        });
    }
    Ok(ReflectionSpectrum {
        frequencies: grid.to_vec(),
        s11: lorentzian_sum(grid, &es.eigenvalues, rates)?,
        meta: SpectrumMeta::default(),
    })
}

// ---------------------------------------------------------------------------
// full device
// ---------------------------------------------------------------------------

/// Everything needed to synthesize flux-dependent spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub modes: AcousticModeSet,
    pub transmon: TransmonParams,
    pub coupling: CouplingParams,
    pub cavity_idt: CavityIdt,
}

/// Eigen decomposition and dressed rates at one flux bias.
#[derive(Debug, Clone)]
pub struct FluxPoint {
    pub current: f64,
    pub omega_q: f64,
    pub eigen: EigenSystem,
    pub rates: Vec<HybridizedRate>,
}

impl Device {
    pub fn validate(&self) -> Result<()> {
        self.transmon.validate()?;
        self.coupling.validate()?;
        self.cavity_idt.validate()
    }

    /// Diagonalize the interaction at one coil current.
    pub fn flux_point(&self, current: f64) -> Result<FluxPoint> {
        let omega_q = qubit_frequency(current, &self.transmon);
        let h = build_interaction(&self.modes, &self.coupling, omega_q)?;
        let eigen = diagonalize(&h)?;
        let rates = hybridized_rates(
            &eigen,
            &self.modes,
            self.cavity_idt.kappa0,
            self.transmon.gamma_intrinsic,
        )?;
        Ok(FluxPoint {
            current,
            omega_q,
            eigen,
            rates,
        })
    }

    /// Hybridized reflection trace at one coil current.
    pub fn reflection_at(&self, current: f64, grid: &[f64]) -> Result<ReflectionSpectrum> {
        let point = self.flux_point(current)?;
        let mut spectrum = hybridized_reflection(grid, &point.eigen, &point.rates)?;
        spectrum.meta = SpectrumMeta {
            flux_bias: Some(current),
            omega_q: Some(point.omega_q),
        };
        Ok(spectrum)
    }

    /// Bare-cavity reflection (couplings ignored).
    pub fn bare_reflection(&self, grid: &[f64]) -> Result<ReflectionSpectrum> {
        bare_reflection(grid, &self.modes, self.cavity_idt.kappa0)
    }
}

/// Sweep the coil current, synthesizing one hybridized trace per point.
///
/// Rows are computed independently in current order; a failure at any point
/// is reported with its index.
pub fn flux_sweep(device: &Device, currents: &[f64], grid: &[f64]) -> Result<FluxSweepMap> {
    if currents.is_empty() || grid.is_empty() {
        return Err(Error::Domain(String::from(
            "flux sweep axes must be non-empty",
        )));
    }
    let mut magnitude = Vec::with_capacity(currents.len() * grid.len());
    for (idx, &current) in currents.iter().enumerate() {
        let spectrum = device.reflection_at(current, grid).map_err(|e| {
            Error::Domain(alloc::format!("flux point {idx} (I = {current:e} A): {e}"))
        })?;
        magnitude.extend(spectrum.s11.iter().map(|s| s.norm()));
    }
    FluxSweepMap::new(currents.to_vec(), grid.to_vec(), magnitude)
}
