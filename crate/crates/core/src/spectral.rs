//! The resonant multimode interaction matrix and its spectral decomposition.
//!
//! With n bare modes and one qubit the system is an (n+1)-dimensional real
//! symmetric "arrowhead" matrix: bare frequencies on the diagonal, signed
//! couplings in the last row and column. Diagonalizing it yields the
//! hybridized mode frequencies, the participation of each bare mode and of
//! the qubit in every eigenmode, and — through the signed external
//! amplitudes — the loss rates of the dressed modes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, Matrix};
use crate::model::{AcousticModeSet, CouplingParams, ModeKind};

/// Signed qubit coupling of a mode: `g0 * sin(pi (label + offset) / 4 + phi_q)`,
/// scaled by `transverse_ratio` for transverse modes.
pub fn coupling_strength(label: u32, kind: ModeKind, c: &CouplingParams) -> f64 {
    let m = label as i64 + c.label_offset as i64;
    let g = c.g0 * libm::sin(PI * m as f64 / 4.0 + c.phi_q);
    match kind {
        ModeKind::Longitudinal => g,
        ModeKind::Transverse => c.transverse_ratio * g,
    }
}

/// Bordered interaction matrix: bare mode frequencies then the qubit on the
/// diagonal, per-mode signed couplings in the last row/column. Symmetric by
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionMatrix {
    /// n mode frequencies followed by the qubit frequency (length n+1).
    diagonal: Vec<f64>,
    /// n signed couplings.
    couplings: Vec<f64>,
}

impl InteractionMatrix {
    pub fn new(diagonal: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if diagonal.len() != couplings.len() + 1 {
            return Err(Error::Shape {
                expected: couplings.len() + 1,
                got: diagonal.len(),
            });
        }
        Ok(InteractionMatrix { diagonal, couplings })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    #[inline]
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    #[inline]
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dimension();
        let mut m = Matrix::zeros(n);
        for (i, &d) in self.diagonal.iter().enumerate() {
            m.set(i, i, d);
        }
        for (i, &g) in self.couplings.iter().enumerate() {
            m.set(i, n - 1, g);
            m.set(n - 1, i, g);
        }
        m
    }
}

/// Assemble the interaction matrix for a mode set at a given qubit frequency.
pub fn build_interaction(
    modes: &AcousticModeSet,
    c: &CouplingParams,
    omega_q: f64,
) -> Result<InteractionMatrix> {
    if modes.is_empty() {
        return Err(Error::ModeSet(alloc::string::String::from(
            "cannot build an interaction matrix from an empty mode set",
        )));
    }
    let mut diagonal: Vec<f64> = modes.modes().iter().map(|m| m.frequency).collect();
    let couplings: Vec<f64> = modes
        .modes()
        .iter()
        .map(|m| coupling_strength(m.label, m.kind, c))
        .collect();
    diagonal.push(omega_q);
    InteractionMatrix::new(diagonal, couplings)
}

/// Full spectral decomposition of an interaction matrix.
///
/// Eigenvalues ascend; `eigenvectors` holds one orthonormal eigenvector per
/// column in the bare basis (modes in set order, qubit last). Column signs
/// are fixed so the largest-magnitude component is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    /// Squared qubit component of each eigenvector.
    pub qubit_participation: Vec<f64>,
}

impl EigenSystem {
    #[inline]
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Squared component of bare basis state `basis` in eigenmode `mode`.
    pub fn participation(&self, basis: usize, mode: usize) -> f64 {
        let c = self.eigenvectors.get(basis, mode);
        c * c
    }
}

/// Allowed relative asymmetry for matrices accepted by [`eigh`].
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

/// Validated symmetric eigendecomposition for externally supplied matrices.
///
/// Rejects input whose asymmetry exceeds `1e-12` relative to its norm; use
/// [`diagonalize`] for interaction matrices, which are symmetric by
/// construction.
pub fn eigh(matrix: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let asym = matrix.max_asymmetry();
    let scale = matrix.frobenius_norm();
    if asym > SYMMETRY_REL_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    jacobi_eigh(matrix)
}

/// Diagonalize an interaction matrix into an [`EigenSystem`].
pub fn diagonalize(h: &InteractionMatrix) -> Result<EigenSystem> {
    let (eigenvalues, eigenvectors) = jacobi_eigh(&h.to_dense())?;
    let n = h.dimension();
    let qubit_participation = (0..n)
        .map(|k| {
            let c = eigenvectors.get(n - 1, k);
            c * c
        })
        .collect();
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        qubit_participation,
    })
}

/// External and internal loss rates of one hybridized eigenmode, linear Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridizedRate {
    pub kappa_ex: f64,
    pub kappa_in: f64,
}

/// Loss rates of the dressed modes.
///
/// For eigenmode m with components `c_{nm}` over the bare modes and `c_{qm}`
/// over the qubit:
///
/// ```text
/// kex'_m = kappa0 * (sum_n a_n c_{nm})^2
/// kin'_m = sum_n kappa_n c_{nm}^2 + gamma c_{qm}^2
/// ```
///
/// The signed sum in `kex'` is where bright/dark interference between
/// hybridized modes enters. By orthonormality the total internal loss is
/// conserved: `sum_m kin'_m = sum_n kappa_n + gamma`.
pub fn hybridized_rates(
    es: &EigenSystem,
    modes: &AcousticModeSet,
    kappa0: f64,
    gamma: f64,
) -> Result<Vec<HybridizedRate>> {
    let n_modes = modes.len();
    if es.dimension() != n_modes + 1 {
        return Err(Error::Shape {
            expected: n_modes + 1,
            got: es.dimension(),
        });
    }
    if kappa0 < 0.0 || gamma < 0.0 {
        return Err(Error::Domain(alloc::string::String::from(
            "rates must be >= 0",
        )));
    }
    let dim = es.dimension();
    let mut out = Vec::with_capacity(dim);
    for m in 0..dim {
        let mut amp = 0.0;
        let mut kin = gamma * es.participation(n_modes, m);
        for (n, mode) in modes.modes().iter().enumerate() {
            let c = es.eigenvectors.get(n, m);
            amp += mode.external_amplitude * c;
            kin += mode.kappa_internal * c * c;
        }
        out.push(HybridizedRate {
            kappa_ex: kappa0 * amp * amp,
            kappa_in: kin,
        });
    }
    Ok(out)
}
