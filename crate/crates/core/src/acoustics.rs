//! First-principles transducer physics: qubit-mode coupling estimated from
//! geometry and material constants, and the phonon emission rate of the
//! qubit through its transducer.
//!
//! The coupling chain is `g_m = Phi0 * Q0 * S_m / h`: zero-point voltage of
//! the mode, charge fluctuation amplitude of the transmon, and a
//! dimensionless array factor measuring how well the finger charges align
//! with the mode's standing wave. The array factor is available both as the
//! exact sum over finger edges and as its closed form; the two agree inside
//! the mirror band and the exact sum stays usable for perturbed finger
//! layouts.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysicalConstants;
use crate::util::sinc;

/// Transducer and cavity geometry.
///
/// `finger_edge_spacing` is the uniform spacing `s` between charge-carrying
/// finger edges (one eighth of the transducer's characteristic wavelength
/// for the split-finger layout); `x0` anchors the response phase so that the
/// array factor follows `sin(m pi x0 / L)`; `connectivity` holds one sign
/// per finger edge (8 per period).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdtGeometry {
    /// Finger periods of the qubit transducer.
    pub n_q: u32,
    /// Finger periods of the readout transducer.
    pub n_c: u32,
    pub finger_edge_spacing: f64,
    pub x0: f64,
    /// Cavity width, m.
    pub width: f64,
    /// Effective cavity area, m^2 (width * effective length by default).
    pub area: f64,
    /// Effective cavity length, m.
    pub cavity_length: f64,
    /// Edge connectivity, +1 for the top electrode, -1 for the bottom.
    pub connectivity: Vec<i8>,
}

impl IdtGeometry {
    /// Canonical split-finger layout: two fingers per electrode per period,
    /// eight charge edges per period with pattern `+ + + + - - - -`.
    pub fn split_finger(
        n_q: u32,
        n_c: u32,
        finger_edge_spacing: f64,
        x0: f64,
        width: f64,
        cavity_length: f64,
    ) -> Self {
        let mut connectivity = Vec::with_capacity(8 * n_q as usize);
        for _ in 0..n_q {
            connectivity.extend_from_slice(&[1, 1, 1, 1, -1, -1, -1, -1]);
        }
        IdtGeometry {
            n_q,
            n_c,
            finger_edge_spacing,
            x0,
            width,
            area: width * cavity_length,
            cavity_length,
            connectivity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_q < 1 || self.n_c < 1 {
            return Err(Error::Domain(String::from("finger periods must be >= 1")));
        }
        if !(self.finger_edge_spacing > 0.0)
            || !(self.width > 0.0)
            || !(self.area > 0.0)
            || !(self.cavity_length > 0.0)
        {
            return Err(Error::Domain(String::from(
                "geometry lengths must be positive",
            )));
        }
        if self.connectivity.iter().any(|p| p.abs() != 1) {
            return Err(Error::Domain(String::from("connectivity must be +-1")));
        }
        Ok(())
    }

    /// Characteristic wavelength of the transducer pitch, 8 s.
    #[inline]
    pub fn pitch_wavelength(&self) -> f64 {
        8.0 * self.finger_edge_spacing
    }
}

/// Transmon energy scales and material coupling numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScales {
    /// Josephson energy, Hz.
    pub e_j: f64,
    /// Charging energy, Hz.
    pub e_c: f64,
    /// Capacitive participation of the transducer, ~1.
    pub beta: f64,
    /// Piezoelectric coupling coefficient K^2 (0.0007 for GaAs).
    pub k2: f64,
    /// Capacitance per unit finger length, F/m.
    pub c_s: f64,
    /// Junction inductance, H.
    pub l_j: f64,
    /// Transducer capacitance, F.
    pub c_idt: f64,
}

impl EnergyScales {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.e_j, self.e_c, self.k2, self.c_s, self.l_j, self.c_idt];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Domain(String::from(
                "energy scales must be strictly positive",
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Domain(String::from("beta must be in (0, 1]")));
        }
        Ok(())
    }
}

/// Zero-point voltage of a cavity mode at the surface:
/// `Phi0 = (e_pz / eps) sqrt(hbar / (2 D v_s A))`.
pub fn zero_point_voltage(consts: &PhysicalConstants, area: f64, v_s: f64) -> f64 {
    consts.e_pz / consts.epsilon * libm::sqrt(consts.hbar / (2.0 * consts.density * v_s * area))
}

/// Charge fluctuation amplitude across the transducer:
/// `Q0 = 2 e beta (1/sqrt(2)) (E_J / 8 E_C)^(1/4)`.
pub fn charge_fluctuation(e_j: f64, e_c: f64, beta: f64) -> f64 {
    2.0 * crate::model::ELECTRON_CHARGE * beta / libm::sqrt(2.0)
        * libm::pow(e_j / (8.0 * e_c), 0.25)
}

/// `[sin(pi/8) + sin(3 pi/8)] / 2`, the split-finger geometry factor.
pub fn split_finger_prefactor() -> f64 {
    0.5 * (libm::sin(PI / 8.0) + libm::sin(3.0 * PI / 8.0))
}

/// Exact array factor: `(1 / 8 N_q) sum_i sin(k_m x_i) p_i` over the finger
/// edges, with `k_m = m pi / L` the standing-wave number of mode `m`.
///
/// Edges are laid out symmetrically around `x0 - lambda_c / 4`; the quarter-
/// wave offset makes the response phase follow `sin(k_m x0)` so the exact
/// sum and [`array_factor_closed`] share the same `x0` convention.
pub fn array_factor_exact(mode_m: u32, geom: &IdtGeometry) -> Result<f64> {
    let n_edges = 8 * geom.n_q as usize;
    if geom.connectivity.len() != n_edges {
        return Err(Error::Shape {
            expected: n_edges,
            got: geom.connectivity.len(),
        });
    }
    let k_m = mode_m as f64 * PI / geom.cavity_length;
    let s = geom.finger_edge_spacing;
    let center = geom.x0 - geom.pitch_wavelength() / 4.0;
    let half_span = 0.5 * (n_edges as f64 - 1.0);
    let mut sum = 0.0;
    for (i, &p) in geom.connectivity.iter().enumerate() {
        let x = center + s * (i as f64 - half_span);
        sum += libm::sin(k_m * x) * p as f64;
    }
    Ok(sum / n_edges as f64)
}

/// Closed-form array factor:
/// `0.653 * sin(m pi x0 / L) * sinc(pi N_q (f_m - f_a) / f_a)`,
/// where `f_a` is the frequency matching the transducer pitch. Both the mode
/// frequency and `f_a` reduce to geometry: `f_m / f_a = 4 m s / L`.
pub fn array_factor_closed(mode_m: u32, geom: &IdtGeometry) -> f64 {
    let position = libm::sin(mode_m as f64 * PI * geom.x0 / geom.cavity_length);
    let detune = 4.0 * mode_m as f64 * geom.finger_edge_spacing / geom.cavity_length - 1.0;
    let envelope = sinc(PI * geom.n_q as f64 * detune);
    split_finger_prefactor() * position * envelope
}

/// First-principles coupling of mode `m`, linear Hz:
/// `g_m = Phi0 Q0 S_m / h` with the closed-form array factor.
pub fn coupling_estimate(
    mode_m: u32,
    geom: &IdtGeometry,
    scales: &EnergyScales,
    consts: &PhysicalConstants,
) -> f64 {
    let phi0 = zero_point_voltage(consts, geom.area, consts.v_s);
    let q0 = charge_fluctuation(scales.e_j, scales.e_c, scales.beta);
    let s_m = array_factor_closed(mode_m, geom);
    phi0 * q0 * s_m / (2.0 * PI * consts.hbar)
}

/// Spontaneous phonon emission rate of the qubit, linear Hz:
///
/// ```text
/// Gamma_SAW(f) = 1.3 K^2 N_q f_c / (2 sqrt(2)) * (sin X / X)^2
/// X = N_q pi (f - f_c) / f_c
/// ```
///
/// Zeros sit at `f = f_c (1 +- k / N_q)`; the fitted device peaks near
/// 33 MHz on resonance.
pub fn emission_rate(f: f64, n_q: u32, f_c: f64, k2: f64) -> f64 {
    let x = n_q as f64 * PI * (f - f_c) / f_c;
    let envelope = sinc(x);
    1.3 * k2 * n_q as f64 * f_c / (2.0 * libm::sqrt(2.0)) * envelope * envelope
}

/// Expected qubit linewidth: phonon emission plus the intrinsic offset.
pub fn qubit_linewidth(f: f64, gamma_intrinsic: f64, n_q: u32, f_c: f64, k2: f64) -> f64 {
    emission_rate(f, n_q, f_c, k2) + gamma_intrinsic
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> IdtGeometry {
        // pitch matched to the 4.253 GHz center: lambda_c = v_s / f_c
        let lambda = 2880.0 / 4.253e9;
        IdtGeometry::split_finger(24, 80, lambda / 8.0, 300e-6 / 4.0, 50e-6, 300e-6)
    }

    fn scales() -> EnergyScales {
        EnergyScales {
            e_j: 1.7424e10,
            e_c: 200e6,
            beta: 1.0,
            k2: 7e-4,
            c_s: 1.2e-10,
            l_j: 9.4e-9,
            c_idt: 100e-15,
        }
    }

    #[test]
    fn zero_point_voltage_scaling() {
        let c = PhysicalConstants::gaas();
        let v1 = zero_point_voltage(&c, 1.5e-8, c.v_s);
        let v2 = zero_point_voltage(&c, 3.0e-8, c.v_s);
        assert!((v1 / v2 - libm::sqrt(2.0)).abs() < 1e-12);
        let mut c0 = c;
        c0.e_pz = 1e-300; // e_pz -> 0 limit
        assert!(zero_point_voltage(&c0, 1.5e-8, c.v_s) < 1e-300);
    }

    #[test]
    fn charge_fluctuation_limits() {
        let e = crate::model::ELECTRON_CHARGE;
        // E_J / E_C = 8 makes the quartic root unity
        let q = charge_fluctuation(8.0, 1.0, 1.0);
        assert!((q - 2.0 * e / libm::sqrt(2.0)).abs() < 1e-30);
        assert_eq!(charge_fluctuation(8.0, 1.0, 0.0), 0.0);
        // 16x Josephson energy doubles Q0
        let q16 = charge_fluctuation(16.0 * 8.0, 1.0, 1.0);
        assert!((q16 / q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn split_finger_prefactor_value() {
        assert!((split_finger_prefactor() - 0.6533).abs() < 1e-4);
    }

    #[test]
    fn array_factor_periodicity_at_quarter_position() {
        // x0 = L/4: S_m follows sin(m pi / 4), a four-mode period (in
        // magnitude) under the slowly varying pitch envelope
        let geom = geometry();
        let prefactor = split_finger_prefactor();
        for m in 882..=890_u32 {
            let expect = prefactor * libm::sin(m as f64 * PI / 4.0);
            let got = array_factor_closed(m, &geom);
            // the pitch envelope stays within ~2% of unity across this span
            assert!(
                (got - expect).abs() < 0.03 * prefactor,
                "m = {m}: {got} vs {expect}"
            );
        }
        // modes divisible by 4 sit on nodes
        assert!(array_factor_closed(884, &geom).abs() < 1e-12);
        assert!(array_factor_closed(888, &geom).abs() < 1e-12);
    }

    #[test]
    fn array_factor_node_alignment() {
        let mut geom = geometry();
        geom.x0 = 0.0;
        for m in [880_u32, 882, 884, 886, 888] {
            assert_eq!(array_factor_closed(m, &geom), 0.0);
            assert!(array_factor_exact(m, &geom).unwrap().abs() < 0.01);
        }
        // cavity center: even modes have a node there
        geom.x0 = geom.cavity_length / 2.0;
        for m in [880_u32, 884, 886] {
            assert!(array_factor_closed(m, &geom).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_matches_closed_in_band() {
        let geom = geometry();
        // modes within +-25 MHz of 4.253 GHz at FSR 4.8 MHz: m = 880..=891
        let prefactor = split_finger_prefactor();
        for m in 880..=891_u32 {
            let exact = array_factor_exact(m, &geom).unwrap();
            let closed = array_factor_closed(m, &geom);
            assert!(
                (exact - closed).abs() <= 0.02 * prefactor,
                "m = {m}: exact {exact} closed {closed}"
            );
            if closed.abs() > 0.1 * prefactor {
                assert!(((exact - closed) / closed).abs() <= 0.02);
            }
        }
    }

    #[test]
    fn connectivity_shape_checked() {
        let mut geom = geometry();
        geom.connectivity.pop();
        assert!(matches!(
            array_factor_exact(884, &geom),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn coupling_estimate_peak_band() {
        // documented GaAs constants land the peak coupling in 7..10 MHz
        let geom = geometry();
        let sc = scales();
        let c = PhysicalConstants::gaas();
        let peak = (880..=891)
            .map(|m| coupling_estimate(m, &geom, &sc, &c).abs())
            .fold(0.0_f64, f64::max);
        assert!(
            (7e6..=10e6).contains(&peak),
            "peak coupling {peak:e} outside 7..10 MHz"
        );
    }

    #[test]
    fn coupling_scales_with_inverse_sqrt_area() {
        let geom = geometry();
        let mut small = geom.clone();
        small.area = geom.area / 10.0;
        let sc = scales();
        let c = PhysicalConstants::gaas();
        let g = coupling_estimate(886, &geom, &sc, &c);
        let g_small = coupling_estimate(886, &small, &sc, &c);
        assert!((g_small / g - libm::sqrt(10.0)).abs() < 0.01 * libm::sqrt(10.0));
    }

    #[test]
    fn emission_peak_value() {
        // N_q = 24, f_c = 4.253 GHz, K^2 = 0.07% -> Gamma_max = 32.8 MHz
        let gamma = emission_rate(4.253e9, 24, 4.253e9, 7e-4);
        assert!((gamma - 32.84e6).abs() < 0.05e6);
    }

    #[test]
    fn emission_nulls() {
        let (n_q, f_c, k2) = (24_u32, 4.253e9, 7e-4);
        let peak = emission_rate(f_c, n_q, f_c, k2);
        for k in 1..=5 {
            for sign in [-1.0, 1.0] {
                let f = f_c * (1.0 + sign * k as f64 / n_q as f64);
                assert!(emission_rate(f, n_q, f_c, k2) < 1e-12 * peak);
            }
        }
    }

    #[test]
    fn emission_suppressed_at_3p9_ghz() {
        let gamma = emission_rate(3.9e9, 24, 4.253e9, 7e-4);
        assert!(gamma < 1e3, "{gamma}");
    }

    #[test]
    fn linewidth_offset_and_ratio() {
        let (n_q, f_c, k2, g0) = (24_u32, 4.253e9, 7e-4, 1.1e6);
        // at a null the linewidth collapses to the intrinsic offset
        let null = f_c * (1.0 - 2.0 / n_q as f64);
        assert!((qubit_linewidth(null, g0, n_q, f_c, k2) - g0).abs() < 1e-3);
        // near the 4.0 GHz side lobe it broadens by a factor of 2..4
        let peak_4ghz = (0..200)
            .map(|i| 3.95e9 + i as f64 * 0.5e6)
            .map(|f| qubit_linewidth(f, g0, n_q, f_c, k2))
            .fold(0.0_f64, f64::max);
        let ratio = peak_4ghz / g0;
        assert!((2.0..=4.0).contains(&ratio), "ratio {ratio}");
        // gamma = 0 at center recovers the peak emission rate
        assert_eq!(
            qubit_linewidth(f_c, 0.0, n_q, f_c, k2),
            emission_rate(f_c, n_q, f_c, k2)
        );
    }
}
