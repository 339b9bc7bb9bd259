//! Generalized Jaynes-Cummings model of one cavity mode coupled to a
//! multi-level transmon, evaluated per excitation manifold.
//!
//! Total excitation number commutes with the Hamiltonian, so the problem
//! block-diagonalizes: the n-th manifold holds the states
//! `|i phonons, level j>` with `i + j = n` and couples neighbors with the
//! `sqrt(j+1) sqrt(n-j) g` matrix elements of a ladder transducer. Each block
//! is diagonalized independently and the eigenvalues are labelled back onto
//! the bare product basis by maximal overlap; near a degeneracy the label is
//! flagged ambiguous instead of silently picked.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, Matrix};
use crate::model::transmon_level;

/// Parameters of the single-mode dispersive model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcParams {
    pub omega_q: f64,
    pub omega_cav: f64,
    pub g: f64,
    /// Anharmonicity magnitude (positive; lowers the ladder).
    pub alpha: f64,
    /// Transmon levels kept in the model (4 by default, 5 supported).
    pub levels: usize,
    /// Total-excitation truncation.
    pub n_max: usize,
}

impl JcParams {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::Domain(String::from("levels must be >= 2")));
        }
        if self.n_max < 2 {
            return Err(Error::Domain(String::from("n_max must be >= 2")));
        }
        if self.n_max < self.levels {
            return Err(Error::Domain(String::from("n_max must be >= levels")));
        }
        Ok(())
    }
}

/// Manifold block `H_n` in the basis `|n - j phonons, level j>`, j ascending.
///
/// Diagonal entries are `E_j + (n - j) w_cav`; the (j, j+1) off-diagonal is
/// `sqrt(j+1) sqrt(n-j) g`.
pub fn build_block(n: usize, p: &JcParams) -> Matrix {
    let size = core::cmp::min(p.levels, n + 1);
    let mut h = Matrix::zeros(size);
    for j in 0..size {
        let phonons = (n - j) as f64;
        h.set(
            j,
            j,
            transmon_level(j, p.omega_q, p.alpha) + phonons * p.omega_cav,
        );
        if j + 1 < size {
            let elem = libm::sqrt((j + 1) as f64) * libm::sqrt((n - j) as f64) * p.g;
            h.set(j, j + 1, elem);
            h.set(j + 1, j, elem);
        }
    }
    h
}

/// One labelled dressed energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub energy: f64,
    /// Squared overlap with the bare state the label claims.
    pub overlap: f64,
    /// True when the overlap fell below 1/2 (near a degeneracy).
    pub ambiguous: bool,
}

/// Dressed energies `E(i, j)` labelled in the joint Fock basis,
/// for `i <= n_max - levels` phonons and `j < levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedLadder {
    levels: usize,
    max_phonons: usize,
    entries: Vec<LadderEntry>,
}

impl DressedLadder {
    #[inline]
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Largest phonon index the table holds.
    #[inline]
    pub fn max_phonons(&self) -> usize {
        self.max_phonons
    }

    pub fn entry(&self, phonons: usize, level: usize) -> Option<&LadderEntry> {
        if phonons > self.max_phonons || level >= self.levels {
            return None;
        }
        Some(&self.entries[phonons * self.levels + level])
    }

    /// Energy of `|phonons, level>`, failing on out-of-range or ambiguous
    /// labels.
    pub fn energy(&self, phonons: usize, level: usize) -> Result<f64> {
        let entry = self.entry(phonons, level).ok_or(Error::LevelIndex {
            index: level.max(phonons),
            levels: self.levels,
        })?;
        if entry.ambiguous {
            return Err(Error::AmbiguousLabel {
                phonons,
                level,
                overlap: entry.overlap,
            });
        }
        Ok(entry.energy)
    }

    /// Ground-to-first-excited transition with `phonons` in the cavity:
    /// `w_q(i) = E(i, 1) - E(i, 0)`.
    pub fn qubit_frequency(&self, phonons: usize) -> Result<f64> {
        Ok(self.energy(phonons, 1)? - self.energy(phonons, 0)?)
    }
}

/// Diagonalize every manifold up to `n_max` and label the eigenvalues.
///
/// Labels are assigned greedily by descending squared overlap with the bare
/// basis, so each bare state and each eigenvalue is used once; entries whose
/// winning overlap is below 1/2 are flagged, not dropped.
pub fn dressed_energies(p: &JcParams) -> Result<DressedLadder> {
    p.validate()?;
    let levels = p.levels;
    let max_phonons = p.n_max - levels;
    let mut entries = vec![
        LadderEntry {
            energy: 0.0,
            overlap: 0.0,
            ambiguous: true,
        };
        (max_phonons + 1) * levels
    ];

    for n in 0..=p.n_max {
        let block = build_block(n, p);
        let size = block.dim();
        let (vals, vecs) = jacobi_eigh(&block)?;
        // all (overlap, eigen k, basis j) pairs, best first; ties broken by
        // index order for determinism
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(size * size);
        for k in 0..size {
            for j in 0..size {
                let c = vecs.get(j, k);
                pairs.push((c * c, k, j));
            }
        }
        pairs.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        let mut eigen_used = vec![false; size];
        let mut basis_used = vec![false; size];
        for (overlap, k, j) in pairs {
            if eigen_used[k] || basis_used[j] {
                continue;
            }
            eigen_used[k] = true;
            basis_used[j] = true;
            let phonons = n - j;
            if phonons <= max_phonons {
                entries[phonons * levels + j] = LadderEntry {
                    energy: vals[k],
                    overlap,
                    ambiguous: overlap < 0.5,
                };
            }
        }
    }

    Ok(DressedLadder {
        levels,
        max_phonons,
        entries,
    })
}

/// Dispersive shift with `i` phonons: `2 chi(i) = w_q(i+1) - w_q(i)`.
pub fn chi_of(ladder: &DressedLadder, i: usize) -> Result<f64> {
    Ok(0.5 * (ladder.qubit_frequency(i + 1)? - ladder.qubit_frequency(i)?))
}

/// Like [`chi_of`] but near degeneracies it returns the raw labelled value
/// together with an ambiguity flag instead of failing; `None` only when the
/// indices fall outside the ladder. Scans across the poles use this to keep
/// emitting the (diverging) curve while marking the unreliable points.
pub fn chi_flagged(ladder: &DressedLadder, i: usize) -> Option<(f64, bool)> {
    let mut ambiguous = false;
    let mut wq = [0.0; 2];
    for (slot, phonons) in [i, i + 1].iter().enumerate() {
        let excited = ladder.entry(*phonons, 1)?;
        let ground = ladder.entry(*phonons, 0)?;
        ambiguous |= excited.ambiguous || ground.ambiguous;
        wq[slot] = excited.energy - ground.energy;
    }
    Some((0.5 * (wq[1] - wq[0]), ambiguous))
}

/// Dispersive shift from scratch at the given parameters.
pub fn chi(i: usize, p: &JcParams) -> Result<f64> {
    chi_of(&dressed_energies(p)?, i)
}

/// Closed-form three-level transmon dispersive shift,
///
/// ```text
/// chi = -g^2 alpha / (Delta (Delta - alpha)),   Delta = w_q - w_cav
/// ```
///
/// with `alpha` the positive anharmonicity magnitude. The sign matches
/// [`chi`] in the straddling-free regime `w_q < w_cav` (both negative there).
pub fn chi_standard(g: f64, delta: f64, alpha: f64) -> Result<f64> {
    if delta == 0.0 || delta == alpha {
        return Err(Error::Domain(String::from(
            "chi_standard poles at Delta = 0 and Delta = alpha",
        )));
    }
    Ok(-g * g * alpha / (delta * (delta - alpha)))
}

/// Qubit Stark shift versus phonon number: `shift(i) = w_q(i) - w_q(0)`.
///
/// In the far-detuned regime the shift is linear with slope `2 chi(0)`;
/// near the two-phonon degeneracies it picks up a visible quadratic part.
pub fn stark_curve(phonon_numbers: &[usize], p: &JcParams) -> Result<Vec<f64>> {
    let ladder = dressed_energies(p)?;
    if let Some(&worst) = phonon_numbers.iter().max() {
        if worst > ladder.max_phonons() {
            return Err(Error::Domain(String::from(
                "phonon number exceeds the truncated ladder",
            )));
        }
    }
    let base = ladder.qubit_frequency(0)?;
    phonon_numbers
        .iter()
        .map(|&i| Ok(ladder.qubit_frequency(i)? - base))
        .collect()
}
