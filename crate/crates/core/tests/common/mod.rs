//! Shared fixtures: the fitted default device used across suites.

#![allow(dead_code)]

use cqad_core::model::{
    AcousticMode, AcousticModeSet, CouplingParams, ModeKind, TransmonParams,
};
use cqad_core::reflection::{CavityIdt, Device};

pub const F_CENTER: f64 = 4.253e9;
pub const FSR: f64 = 4.8e6;
pub const KAPPA0: f64 = 178.2e3;
pub const PHI_C: f64 = core::f64::consts::FRAC_PI_4 - 0.09;
pub const N_C: u32 = 100;
pub const KAPPA_L: f64 = 200e3;
pub const KAPPA_T: f64 = 400e3;
pub const TRANSVERSE_OFFSET: f64 = 1.5e6;
pub const MIRROR_BANDWIDTH: f64 = 50e6;
pub const G0: f64 = 6.5e6;
pub const PHI_Q: f64 = -0.1;
pub const OMEGA_MAX: f64 = 5.08e9;
pub const I0: f64 = 1.0395e-3;
pub const GAMMA: f64 = 1.1e6;
pub const ALPHA: f64 = 273e6;

pub fn longitudinal_frequency(label: u32) -> f64 {
    F_CENTER + (label as f64 - 6.0) * FSR
}

/// Eleven longitudinal modes plus the six most visible transverse
/// satellites (odd parents), amplitudes from the readout transducer model.
pub fn default_mode_set() -> AcousticModeSet {
    let idt = default_cavity_idt();
    let mut modes: Vec<AcousticMode> = (1..=11)
        .map(|m| {
            let f = longitudinal_frequency(m);
            AcousticMode {
                label: m,
                kind: ModeKind::Longitudinal,
                frequency: f,
                kappa_internal: KAPPA_L,
                external_amplitude: idt.amplitude(m, f).0,
            }
        })
        .collect();
    for m in [1_u32, 3, 5, 7, 9, 11] {
        let f = longitudinal_frequency(m) + TRANSVERSE_OFFSET;
        modes.push(AcousticMode {
            label: m,
            kind: ModeKind::Transverse,
            frequency: f,
            kappa_internal: KAPPA_T,
            external_amplitude: 0.35 * idt.amplitude(m, f).0,
        });
    }
    AcousticModeSet::new(modes, FSR, F_CENTER, MIRROR_BANDWIDTH).unwrap()
}

pub fn default_cavity_idt() -> CavityIdt {
    CavityIdt {
        kappa0: KAPPA0,
        phi_c: PHI_C,
        n_periods: N_C,
        f_center: F_CENTER,
    }
}

pub fn default_transmon() -> TransmonParams {
    TransmonParams {
        omega_max: OMEGA_MAX,
        i0: I0,
        ib: 0.0,
        alpha: ALPHA,
        levels: 4,
        gamma_intrinsic: GAMMA,
    }
}

pub fn default_coupling() -> CouplingParams {
    CouplingParams {
        g0: G0,
        phi_q: PHI_Q,
        transverse_ratio: 0.35,
        label_offset: 2,
    }
}

pub fn default_device() -> Device {
    Device {
        modes: default_mode_set(),
        transmon: default_transmon(),
        coupling: default_coupling(),
        cavity_idt: default_cavity_idt(),
    }
}

/// Coil current with the qubit at `target` Hz on the rising branch
/// (0 < I < I0/2), from inverting the flux tuning law.
pub fn current_for_qubit_frequency(target: f64) -> f64 {
    let ratio = (target / OMEGA_MAX) * (target / OMEGA_MAX);
    I0 / core::f64::consts::PI * ratio.acos()
}

/// Full Jaynes-Cummings Hamiltonian over the product basis
/// `|i phonons, level j>` with `i + j <= n_max`, ignoring the manifold
/// block structure; the brute-force reference for the per-block solver.
pub fn full_jc_hamiltonian(p: &cqad_core::dispersive::JcParams) -> cqad_core::linalg::Matrix {
    let mut states: Vec<(usize, usize)> = Vec::new();
    for n in 0..=p.n_max {
        for j in 0..p.levels.min(n + 1) {
            states.push((n - j, j));
        }
    }
    let dim = states.len();
    let mut h = cqad_core::linalg::Matrix::zeros(dim);
    for (r, &(i, j)) in states.iter().enumerate() {
        h.set(
            r,
            r,
            cqad_core::model::transmon_level(j, p.omega_q, p.alpha) + i as f64 * p.omega_cav,
        );
        for (c, &(i2, j2)) in states.iter().enumerate() {
            // ladder coupling |i, j> <-> |i-1, j+1>
            if j2 == j + 1 && i2 + 1 == i {
                let elem = ((j + 1) as f64).sqrt() * (i as f64).sqrt() * p.g;
                h.set(r, c, elem);
                h.set(c, r, elem);
            }
        }
    }
    h
}
