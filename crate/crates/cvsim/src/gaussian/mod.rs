//! Gaussian unitaries in Bloch-Messiah form and their action on states.
//!
//! Two representations are maintained side by side: truncated Fock maps
//! (elementary-gate kernels with exact matrix elements up to the cutoff) and
//! pure Gaussian states in Bargmann form (exact parameter updates, global
//! phase included). Cross-checking the two is what certifies both.

mod bargmann;
mod fock_apply;
mod passive;

pub use bargmann::{
    fock_amplitudes_of_gaussian, gaussian_overlap, heterodyne_amplitude,
    partial_heterodyne_overlap, GaussianPureState,
};
pub use fock_apply::apply_elementary;
pub use passive::{compose_elementary, decompose_passive};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{FockError, FockState};

/// Unitarity and symmetry checks use this max-entry tolerance.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("matrix is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("squeezing parameters must be nonnegative, got {0}")]
    NegativeSqueezing(f64),
    #[error("mode index {0} out of range for {1} modes")]
    ModeOutOfRange(usize, usize),
    #[error("cutoff {0} exceeds the supported factorial range (170)")]
    CutoffTooLarge(u32),
    #[error("state parameters are not normalizable: {0}")]
    NotNormalizable(String),
    #[error("matrix is not symmetric: max deviation {0:.3e}")]
    NotSymmetric(f64),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// A single-mode or two-mode Gaussian gate with known Fock-basis kernels.
///
/// Conventions fixed for the whole crate: a = (q + ip)/sqrt 2,
/// D(alpha) = exp(alpha a' - conj(alpha) a), S(r) = exp(r (a^2 - a'^2)/2)
/// with r >= 0 squeezing the q quadrature, and BS(theta, phi) mixing two
/// modes with transmissivity cos^2 theta.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementaryGate {
    /// e^{i theta N} on one mode.
    PhaseShifter { mode: usize, theta: f64 },
    /// Two-mode mixer with single-photon matrix
    /// [[cos t, -e^{i phi} sin t], [e^{-i phi} sin t, cos t]].
    BeamSplitter { mode_a: usize, mode_b: usize, theta: f64, phi: f64 },
    /// Single-mode squeezer, r >= 0.
    Squeeze { mode: usize, r: f64 },
    /// Single-mode displacement.
    Displace { mode: usize, alpha: Complex64 },
}

impl ElementaryGate {
    /// Whether the gate commutes with the total boson number.
    pub fn is_passive(&self) -> bool {
        matches!(self, ElementaryGate::PhaseShifter { .. } | ElementaryGate::BeamSplitter { .. })
    }

    pub fn modes_touched(&self) -> Vec<usize> {
        match self {
            ElementaryGate::PhaseShifter { mode, .. }
            | ElementaryGate::Squeeze { mode, .. }
            | ElementaryGate::Displace { mode, .. } => vec![*mode],
            ElementaryGate::BeamSplitter { mode_a, mode_b, .. } => vec![*mode_a, *mode_b],
        }
    }

    pub(crate) fn validate(&self, modes: usize) -> Result<(), GaussianError> {
        for m in self.modes_touched() {
            if m >= modes {
                return Err(GaussianError::ModeOutOfRange(m, modes));
            }
        }
        if let ElementaryGate::Squeeze { r, .. } = self {
            if *r < 0.0 {
                return Err(GaussianError::NegativeSqueezing(*r));
            }
        }
        if let ElementaryGate::BeamSplitter { mode_a, mode_b, .. } = self {
            if mode_a == mode_b {
                return Err(GaussianError::DimensionMismatch(
                    "beamsplitter modes must differ".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Max-entry deviation of `U' U` from the identity.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let m = u.nrows();
    let gram = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let expected = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((gram[(i, j)] - expected).norm());
        }
    }
    dev
}

pub(crate) fn check_unitary(u: &DMatrix<Complex64>) -> Result<(), GaussianError> {
    if u.nrows() != u.ncols() {
        return Err(GaussianError::NotSquare(u.nrows(), u.ncols()));
    }
    let dev = unitarity_deviation(u);
    if dev > UNITARITY_TOL {
        return Err(GaussianError::NotUnitary(dev));
    }
    Ok(())
}

/// A Gaussian unitary in Bloch-Messiah form: G = V D(alpha) S(r) U with
/// passive U, V.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianUnitary {
    passive_in: DMatrix<Complex64>,
    squeezing: DVector<f64>,
    displacement: DVector<Complex64>,
    passive_out: DMatrix<Complex64>,
}

impl GaussianUnitary {
    pub fn new(
        passive_out: DMatrix<Complex64>,
        displacement: DVector<Complex64>,
        squeezing: DVector<f64>,
        passive_in: DMatrix<Complex64>,
    ) -> Result<Self, GaussianError> {
        check_unitary(&passive_out)?;
        check_unitary(&passive_in)?;
        let m = passive_in.nrows();
        if passive_out.nrows() != m || displacement.len() != m || squeezing.len() != m {
            return Err(GaussianError::DimensionMismatch(format!(
                "expected {m} modes across all Bloch-Messiah factors"
            )));
        }
        for &r in squeezing.iter() {
            if r < 0.0 {
                return Err(GaussianError::NegativeSqueezing(r));
            }
        }
        Ok(GaussianUnitary { passive_in, squeezing, displacement, passive_out })
    }

    pub fn identity(modes: usize) -> Self {
        GaussianUnitary {
            passive_in: DMatrix::identity(modes, modes),
            squeezing: DVector::zeros(modes),
            displacement: DVector::zeros(modes),
            passive_out: DMatrix::identity(modes, modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.passive_in.nrows()
    }

    pub fn passive_in(&self) -> &DMatrix<Complex64> {
        &self.passive_in
    }

    pub fn passive_out(&self) -> &DMatrix<Complex64> {
        &self.passive_out
    }

    pub fn squeezing(&self) -> &DVector<f64> {
        &self.squeezing
    }

    pub fn displacement(&self) -> &DVector<Complex64> {
        &self.displacement
    }

    pub fn max_squeezing(&self) -> f64 {
        self.squeezing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_displacement(&self) -> f64 {
        self.displacement.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_passive(&self) -> bool {
        self.max_squeezing() == 0.0 && self.max_displacement() == 0.0
    }

    /// The Bloch-Messiah factors as an ordered elementary-gate program
    /// (first gate acts first).
    pub fn elementary_program(&self) -> Result<Vec<ElementaryGate>, GaussianError> {
        let mut gates = decompose_passive(&self.passive_in)?;
        for (mode, &r) in self.squeezing.iter().enumerate() {
            if r != 0.0 {
                gates.push(ElementaryGate::Squeeze { mode, r });
            }
        }
        for (mode, &alpha) in self.displacement.iter().enumerate() {
            if alpha.norm() != 0.0 {
                gates.push(ElementaryGate::Displace { mode, alpha });
            }
        }
        gates.extend(decompose_passive(&self.passive_out)?);
        Ok(gates)
    }
}

/// Apply a full Gaussian unitary to a truncated Fock state, re-truncating at
/// `k_out` after every energy-non-preserving elementary gate.
///
/// Returns the final state and the combined discarded probability weight.
pub fn apply_gaussian(
    state: &FockState,
    gate: &GaussianUnitary,
    k_out: u32,
) -> Result<(FockState, f64), GaussianError> {
    let (out, discards) = apply_gaussian_detailed(state, gate, k_out)?;
    let retained: f64 = discards.iter().map(|w| 1.0 - w).product();
    Ok((out, 1.0 - retained))
}

/// Like [`apply_gaussian`] but reporting the discarded weight of every
/// elementary gate separately, in application order.
pub fn apply_gaussian_detailed(
    state: &FockState,
    gate: &GaussianUnitary,
    k_out: u32,
) -> Result<(FockState, Vec<f64>), GaussianError> {
    if state.modes() != gate.modes() {
        return Err(GaussianError::DimensionMismatch(format!(
            "state has {} modes, gate has {}",
            state.modes(),
            gate.modes()
        )));
    }
    let mut current = state.clone();
    let mut discards = Vec::new();
    for g in gate.elementary_program()? {
        let (next, w) = apply_elementary(&current, &g, k_out)?;
        current = next;
        discards.push(w);
    }
    Ok((current, discards))
}
