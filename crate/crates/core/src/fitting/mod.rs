//! Nonlinear least-squares estimation of device parameters from spectra.
//!
//! The solver is a damped Gauss-Newton (Levenberg-Marquardt style) loop with
//! centrally differenced Jacobians and a Nelder-Mead simplex fallback for
//! rank-deficient problems; everything is deterministic for fixed inputs.
//! On top of it sit the model-specific fits: the two-stage bare-spectrum fit
//! (per-dip Lorentzians, then the transducer coupling pattern), the flux-map
//! fit for the qubit coupling parameters, and the quadratic Stark-slope fit.

mod bare;
mod engine;
mod flux;
mod stark;

pub use bare::{fit_bare_modes, BareFitConfig, BareFitOutcome, DipFit};
pub use engine::{
    fit_result_from_lm, levenberg_marquardt, nelder_mead, FitOptions, FitParameter, FitResult,
    LmOutcome,
};
pub use flux::{fit_flux_map, fit_flux_map_with, flux_map_magnitudes, FluxFitInit};
pub use stark::fit_stark_slope;
