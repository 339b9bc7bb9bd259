//! Domain types and elementary relations: acoustic mode tables, transmon
//! parameters, the flux tuning law, and cavity geometry identities.
//!
//! Conventions used throughout the crate:
//!
//! - every stored or returned frequency and rate is a *linear* frequency in
//!   Hz (full width for loss rates); 2π enters only inside formulas;
//! - the anharmonicity `alpha` is stored as a positive magnitude and the
//!   quadratic term *lowers* the levels: `E_i = i w_q - i(i-1) alpha / 2`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// acoustic modes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Longitudinal,
    Transverse,
}

/// One bare cavity mode as seen by the readout transducer.
///
/// `label` is the display index of the parent longitudinal mode (1..11 for
/// the default device); a transverse satellite carries the label of the
/// longitudinal mode it sits above. `external_amplitude` is the signed,
/// dimensionless coupling amplitude `a_m`; the external rate of the bare
/// mode is `kappa0 * a_m^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticMode {
    pub label: u32,
    pub kind: ModeKind,
    pub frequency: f64,
    pub kappa_internal: f64,
    pub external_amplitude: f64,
}

/// Validated, frequency-ordered collection of bare cavity modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticModeSet {
    modes: Vec<AcousticMode>,
    pub fsr: f64,
    pub center_frequency: f64,
    pub mirror_bandwidth: f64,
}

/// Default tolerance on |spacing - fsr| / fsr for adjacent longitudinal modes.
pub const DEFAULT_FSR_TOLERANCE: f64 = 0.01;

impl AcousticModeSet {
    /// Sort and validate a mode table with the default spacing tolerance.
    pub fn new(
        modes: Vec<AcousticMode>,
        fsr: f64,
        center_frequency: f64,
        mirror_bandwidth: f64,
    ) -> Result<Self> {
        Self::with_spacing_tolerance(
            modes,
            fsr,
            center_frequency,
            mirror_bandwidth,
            DEFAULT_FSR_TOLERANCE,
        )
    }

    pub fn with_spacing_tolerance(
        mut modes: Vec<AcousticMode>,
        fsr: f64,
        center_frequency: f64,
        mirror_bandwidth: f64,
        spacing_tolerance: f64,
    ) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::ModeSet(String::from("empty mode table")));
        }
        if !(fsr > 0.0) || !(center_frequency > 0.0) || !(mirror_bandwidth > 0.0) {
            return Err(Error::Domain(String::from(
                "fsr, center frequency and mirror bandwidth must be positive",
            )));
        }
        for m in &modes {
            if !(m.frequency > 0.0) {
                return Err(Error::Domain(String::from("mode frequency must be positive")));
            }
            if m.kappa_internal < 0.0 {
                return Err(Error::Domain(String::from("internal loss must be >= 0")));
            }
        }
        modes.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());

        let longitudinal: Vec<&AcousticMode> = modes
            .iter()
            .filter(|m| m.kind == ModeKind::Longitudinal)
            .collect();
        if longitudinal.is_empty() {
            return Err(Error::ModeSet(String::from("no longitudinal modes")));
        }
        for pair in longitudinal.windows(2) {
            let spacing = pair[1].frequency - pair[0].frequency;
            if spacing <= 0.0 {
                return Err(Error::ModeSet(String::from(
                    "longitudinal frequencies are not strictly increasing",
                )));
            }
            if (spacing - fsr).abs() > spacing_tolerance * fsr {
                return Err(Error::ModeSet(String::from(
                    "adjacent longitudinal spacing deviates from the FSR beyond tolerance",
                )));
            }
        }
        for m in modes.iter().filter(|m| m.kind == ModeKind::Transverse) {
            if !longitudinal
                .iter()
                .any(|l| l.label == m.label)
            {
                return Err(Error::ModeSet(String::from(
                    "transverse mode references a missing longitudinal label",
                )));
            }
        }

        Ok(AcousticModeSet {
            modes,
            fsr,
            center_frequency,
            mirror_bandwidth,
        })
    }

    #[inline]
    pub fn modes(&self) -> &[AcousticMode] {
        &self.modes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Frequency of the mode with the given label and kind.
    pub fn frequency_of(&self, label: u32, kind: ModeKind) -> Option<f64> {
        self.modes
            .iter()
            .find(|m| m.label == label && m.kind == kind)
            .map(|m| m.frequency)
    }
}

// ---------------------------------------------------------------------------
// transmon
// ---------------------------------------------------------------------------

/// Flux-tunable transmon parameters.
///
/// `i0` is the coil current per flux quantum, `ib` the background offset
/// current, and `alpha` the anharmonicity magnitude (stored positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub omega_max: f64,
    pub i0: f64,
    pub ib: f64,
    pub alpha: f64,
    pub levels: usize,
    pub gamma_intrinsic: f64,
}

impl TransmonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_max > 0.0) {
            return Err(Error::Domain(String::from("omega_max must be positive")));
        }
        if !(self.i0 > 0.0) {
            return Err(Error::Domain(String::from("i0 must be positive")));
        }
        if self.alpha < 0.0 {
            return Err(Error::Domain(String::from("alpha must be >= 0")));
        }
        if !(2..=6).contains(&self.levels) {
            return Err(Error::Domain(String::from("levels must be in 2..=6")));
        }
        if self.gamma_intrinsic < 0.0 {
            return Err(Error::Domain(String::from("gamma_intrinsic must be >= 0")));
        }
        Ok(())
    }

    /// Bounds-checked level energy `E_i` at a given qubit frequency.
    pub fn level_energy(&self, i: usize, omega_q: f64) -> Result<f64> {
        if i >= self.levels {
            return Err(Error::LevelIndex {
                index: i,
                levels: self.levels,
            });
        }
        Ok(transmon_level(i, omega_q, self.alpha))
    }
}

/// Qubit transition frequency at a coil current:
/// `w_max * sqrt(|cos(pi (I - Ib) / I0)|)`.
///
/// Total in `current`; periodic with period `i0` and even about `ib`.
pub fn qubit_frequency(current: f64, p: &TransmonParams) -> f64 {
    let phase = PI * (current - p.ib) / p.i0;
    p.omega_max * libm::sqrt(libm::cos(phase).abs())
}

/// Transmon level energy `E_i = i w_q - i(i-1) alpha / 2` with `alpha > 0`.
pub fn transmon_level(i: usize, omega_q: f64, alpha: f64) -> f64 {
    let i = i as f64;
    i * omega_q - i * (i - 1.0) * alpha / 2.0
}

// ---------------------------------------------------------------------------
// coupling
// ---------------------------------------------------------------------------

/// Qubit-mode coupling pattern parameters.
///
/// `label_offset` maps a display label to the mode index entering the
/// four-mode-period pattern; the fitted device uses 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub g0: f64,
    pub phi_q: f64,
    pub transverse_ratio: f64,
    pub label_offset: i32,
}

pub const DEFAULT_TRANSVERSE_RATIO: f64 = 0.35;

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        if self.g0 < 0.0 {
            return Err(Error::Domain(String::from("g0 must be >= 0")));
        }
        if self.phi_q.abs() >= PI {
            return Err(Error::Domain(String::from("|phi_q| must be < pi")));
        }
        if !(0.0..=1.0).contains(&self.transverse_ratio) {
            return Err(Error::Domain(String::from(
                "transverse_ratio must be in [0, 1]",
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// physical constants
// ---------------------------------------------------------------------------

/// Material and fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of sound on the substrate surface, m/s.
    pub v_s: f64,
    /// Piezoelectric coefficient, C/m^2.
    pub e_pz: f64,
    /// Substrate permittivity, F/m.
    pub epsilon: f64,
    /// Substrate mass density, kg/m^3.
    pub density: f64,
    pub hbar: f64,
    pub e: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;

impl PhysicalConstants {
    /// Literature values for GaAs: v_s = 2880 m/s along the propagation cut,
    /// e_pz = e_14 = 0.16 C/m^2, eps_r = 12.9, density = 5317 kg/m^3.
    pub fn gaas() -> Self {
        PhysicalConstants {
            v_s: 2880.0,
            e_pz: 0.16,
            epsilon: 12.9 * VACUUM_PERMITTIVITY,
            density: 5317.0,
            hbar: HBAR,
            e: ELECTRON_CHARGE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.v_s,
            self.e_pz,
            self.epsilon,
            self.density,
            self.hbar,
            self.e,
        ];
        if all.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Domain(String::from(
                "all physical constants must be strictly positive",
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// cavity identities
// ---------------------------------------------------------------------------

/// Free spectral range `v_s / (2 L_eff)`.
pub fn fsr(v_s: f64, l_eff: f64) -> Result<f64> {
    if !(v_s > 0.0) || !(l_eff > 0.0) {
        return Err(Error::Domain(String::from(
            "fsr arguments must be positive",
        )));
    }
    Ok(v_s / (2.0 * l_eff))
}

/// Characteristic wavelength `v_s / f_c`.
pub fn wavelength(v_s: f64, f_c: f64) -> Result<f64> {
    if !(v_s > 0.0) || !(f_c > 0.0) {
        return Err(Error::Domain(String::from(
            "wavelength arguments must be positive",
        )));
    }
    Ok(v_s / f_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn transmon() -> TransmonParams {
        TransmonParams {
            omega_max: 5.08e9,
            i0: 1.0395e-3,
            ib: 0.0,
            alpha: 249e6,
            levels: 4,
            gamma_intrinsic: 1.1e6,
        }
    }

    #[test]
    fn qubit_frequency_at_sweet_spot() {
        let p = transmon();
        assert_eq!(qubit_frequency(p.ib, &p), 5.08e9);
    }

    #[test]
    fn qubit_frequency_at_half_quantum() {
        // cos(pi/2) only reaches ~6e-17 in floating point, so the frequency
        // bottoms out at sqrt of that times omega_max
        let p = transmon();
        assert!(qubit_frequency(p.ib + p.i0 / 2.0, &p) < 1e-7 * p.omega_max);
    }

    #[test]
    fn qubit_frequency_at_quarter_quantum() {
        // direct evaluation of w_max * sqrt(cos(pi/4))
        let p = transmon();
        let expect = 5.08e9 * libm::sqrt(libm::cos(core::f64::consts::FRAC_PI_4));
        let got = qubit_frequency(p.ib + p.i0 / 4.0, &p);
        assert!((got - expect).abs() < 1.0);
        assert!((got - 4.2718e9).abs() < 1e6); // 4.2718 GHz to the displayed digit
    }

    #[test]
    fn level_ladder() {
        assert_eq!(transmon_level(0, 4.077e9, 249e6), 0.0);
        assert_eq!(transmon_level(1, 4.077e9, 249e6), 4.077e9);
        // two-photon |g>-|f> transition at E_2 / 2 = 3.9525 GHz
        let e2 = transmon_level(2, 4.077e9, 249e6);
        assert!((e2 / 2.0 - 3.9525e9).abs() < 1e3);
    }

    #[test]
    fn level_energy_bounds() {
        let p = transmon();
        assert!(p.level_energy(3, 4.0e9).is_ok());
        assert_eq!(
            p.level_energy(4, 4.0e9),
            Err(Error::LevelIndex {
                index: 4,
                levels: 4
            })
        );
    }

    #[test]
    fn level_spacing_shrinks_by_alpha() {
        let (wq, alpha) = (4.5e9, 273e6);
        let diffs: Vec<f64> = (0..5)
            .map(|i| transmon_level(i + 1, wq, alpha) - transmon_level(i, wq, alpha))
            .collect();
        for pair in diffs.windows(2) {
            assert!((pair[0] - pair[1] - alpha).abs() < 1e-6);
        }
    }

    #[test]
    fn fsr_and_wavelength_values() {
        assert!((fsr(2880.0, 300e-6).unwrap() - 4.8e6).abs() < 1e-9);
        let lambda = wavelength(2880.0, 4.253e9).unwrap();
        assert!((lambda - 677.2e-9).abs() < 0.05e-9);
        // doubling the cavity halves the FSR
        assert_eq!(
            fsr(2880.0, 600e-6).unwrap(),
            fsr(2880.0, 300e-6).unwrap() / 2.0
        );
    }

    #[test]
    fn fsr_rejects_nonpositive() {
        assert!(fsr(0.0, 1.0).is_err());
        assert!(fsr(1.0, -1.0).is_err());
        assert!(wavelength(2880.0, 0.0).is_err());
    }

    fn mode(label: u32, kind: ModeKind, f: f64) -> AcousticMode {
        AcousticMode {
            label,
            kind,
            frequency: f,
            kappa_internal: 200e3,
            external_amplitude: 0.5,
        }
    }

    #[test]
    fn mode_set_sorts_and_validates() {
        let set = AcousticModeSet::new(
            vec![
                mode(2, ModeKind::Longitudinal, 4.2578e9),
                mode(1, ModeKind::Longitudinal, 4.2530e9),
                mode(1, ModeKind::Transverse, 4.2545e9),
            ],
            4.8e6,
            4.253e9,
            50e6,
        )
        .unwrap();
        let freqs: Vec<f64> = set.modes().iter().map(|m| m.frequency).collect();
        assert!(freqs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(set.frequency_of(1, ModeKind::Transverse), Some(4.2545e9));
    }

    #[test]
    fn mode_set_rejects_bad_spacing() {
        let err = AcousticModeSet::new(
            vec![
                mode(1, ModeKind::Longitudinal, 4.2530e9),
                mode(2, ModeKind::Longitudinal, 4.2600e9), // 7 MHz, not ~4.8 MHz
            ],
            4.8e6,
            4.253e9,
            50e6,
        );
        assert!(matches!(err, Err(Error::ModeSet(_))));
    }

    #[test]
    fn mode_set_rejects_orphan_transverse() {
        let err = AcousticModeSet::new(
            vec![
                mode(1, ModeKind::Longitudinal, 4.2530e9),
                mode(3, ModeKind::Transverse, 4.2545e9),
            ],
            4.8e6,
            4.253e9,
            50e6,
        );
        assert!(matches!(err, Err(Error::ModeSet(_))));
    }

    #[test]
    fn mode_set_rejects_empty() {
        assert!(matches!(
            AcousticModeSet::new(vec![], 4.8e6, 4.253e9, 50e6),
            Err(Error::ModeSet(_))
        ));
    }
}
