//! Cross-checks of the transducer physics against independent routes.

mod common;

use cqad_core::acoustics::{
    array_factor_closed, array_factor_exact, emission_rate, IdtGeometry,
};

fn geometry() -> IdtGeometry {
    let lambda = 2880.0 / common::F_CENTER;
    IdtGeometry::split_finger(24, common::N_C, lambda / 8.0, 300e-6 / 4.0, 50e-6, 300e-6)
}

#[test]
fn exact_and_closed_agree_across_mirror_band() {
    // modes within +-25 MHz of the center at 4.8 MHz spacing
    let geom = geometry();
    let prefactor = cqad_core::acoustics::split_finger_prefactor();
    let fsr = common::FSR;
    for m in 881..=891_u32 {
        let f_m = m as f64 * fsr; // v_s / (2 L) = FSR exactly for this geometry
        assert!((f_m - common::F_CENTER).abs() < 25.2e6);
        let exact = array_factor_exact(m, &geom).unwrap();
        let closed = array_factor_closed(m, &geom);
        assert!(
            (exact - closed).abs() <= 0.02 * prefactor,
            "m = {m}: {exact} vs {closed}"
        );
    }
}

#[test]
fn emission_profile_matches_pulse_transform() {
    // the emission envelope is the power spectrum of a square-windowed tone
    // of duration N_q / f_c; integrate that pulse numerically and compare
    // the normalized profiles across the main lobe
    let n_q = 24_u32;
    let f_c = common::F_CENTER;
    let duration = n_q as f64 / f_c;
    let samples = 60_000_usize;
    let dt = duration / samples as f64;

    let power = |f: f64| -> f64 {
        // trapezoid quadrature of int_0^T sin(2 pi f_c t) e^{-2 pi i f t} dt
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..=samples {
            let t = k as f64 * dt;
            let weight = if k == 0 || k == samples { 0.5 } else { 1.0 };
            let s = (2.0 * core::f64::consts::PI * f_c * t).sin();
            let phase = -2.0 * core::f64::consts::PI * f * t;
            re += weight * s * phase.cos();
            im += weight * s * phase.sin();
        }
        (re * re + im * im) * dt * dt
    };

    let peak_power = power(f_c);
    let peak_rate = emission_rate(f_c, n_q, f_c, 7e-4);
    let half_lobe = f_c / n_q as f64;
    for k in 0..=40 {
        let f = f_c - half_lobe + k as f64 * (2.0 * half_lobe / 40.0);
        let numeric = power(f) / peak_power;
        let model = emission_rate(f, n_q, f_c, 7e-4) / peak_rate;
        assert!(
            (numeric - model).abs() <= 0.01,
            "f = {f:e}: pulse spectrum {numeric} vs sinc^2 {model}"
        );
    }
}
