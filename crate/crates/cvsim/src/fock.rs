//! Sparse multimode Fock-space states with a total-boson cutoff.
//!
//! States are maps from occupation tuples to complex amplitudes, restricted to
//! total boson number `|n| <= cutoff`. Everything downstream (gate kernels,
//! truncation certificates, heterodyne densities) is built on these values.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

/// Absolute tolerance used for norm checks throughout the crate.
pub const NORM_TOL: f64 = 1e-10;

/// Amplitudes below this magnitude are dropped during normalization; the
/// removed weight is reported so callers can add it to their error ledger.
pub const DROP_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),
    #[error("occupation tuple {0:?} exceeds cutoff {1}")]
    CutoffExceeded(Vec<u32>, u32),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("exponential-energy base must satisfy s > 1, got {0}")]
    BaseNotAboveOne(f64),
    #[error("truncation removed all amplitude weight")]
    EmptyTruncation,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("dimension binom({0}+{1}, {0}) overflows u64")]
    DimensionOverflow(u32, u32),
    #[error("occupation tuple has {0} modes, expected {1}")]
    WrongModeCount(usize, usize),
}

/// Occupation numbers of an m-mode Fock basis state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(occupations: Vec<u32>) -> Self {
        MultiIndex(occupations)
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total boson number `|n| = sum_i n_i`.
    pub fn total_bosons(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Copy with mode `j` shifted by `delta` (callers keep the result valid).
    pub(crate) fn with_mode(&self, j: usize, value: u32) -> Self {
        let mut occ = self.0.clone();
        occ[j] = value;
        MultiIndex(occ)
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(occ: &[u32]) -> Self {
        MultiIndex(occ.to_vec())
    }
}

/// Number of multi-indices with `|n| <= k` on `m` modes: binom(m + k, m).
///
/// Overflow is reported rather than wrapped.
pub fn dimension(modes: u32, cutoff: u32) -> Result<u64, FockError> {
    let m = modes as u128;
    let k = cutoff as u128;
    let mut acc: u128 = 1;
    // binom(m + k, m) = prod_{i=1..m} (k + i) / i, kept exact by dividing as we go
    for i in 1..=m {
        acc = acc
            .checked_mul(k + i)
            .ok_or(FockError::DimensionOverflow(modes, cutoff))?;
        acc /= i;
    }
    u64::try_from(acc).map_err(|_| FockError::DimensionOverflow(modes, cutoff))
}

/// A sparse truncated Fock-space state.
///
/// The map stores only nonzero amplitudes; iteration order is the
/// lexicographic order of occupation tuples, which keeps every reduction over
/// the state deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: u32,
    normalized: bool,
    amps: BTreeMap<MultiIndex, Complex64>,
}

impl FockState {
    /// The m-mode vacuum `|0...0>`.
    pub fn vacuum(modes: usize, cutoff: u32) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(MultiIndex(vec![0; modes]), Complex64::new(1.0, 0.0));
        FockState { modes, cutoff, normalized: true, amps }
    }

    /// The Fock basis state `|n>`.
    pub fn basis(occupations: &[u32], cutoff: u32) -> Result<Self, FockError> {
        let idx = MultiIndex(occupations.to_vec());
        if idx.total_bosons() > cutoff {
            return Err(FockError::CutoffExceeded(occupations.to_vec(), cutoff));
        }
        let mut amps = BTreeMap::new();
        amps.insert(idx, Complex64::new(1.0, 0.0));
        Ok(FockState { modes: occupations.len(), cutoff, normalized: true, amps })
    }

    /// Single-mode coherent state `|alpha>` truncated at `cutoff` and renormalized.
    pub fn coherent(alpha: Complex64, cutoff: u32) -> Self {
        let mut amps = BTreeMap::new();
        let mut term = Complex64::new(1.0, 0.0);
        for n in 0..=cutoff {
            if n > 0 {
                term *= alpha / (n as f64).sqrt();
            }
            if term.norm() > 0.0 {
                amps.insert(MultiIndex(vec![n]), term);
            }
        }
        let state = FockState { modes: 1, cutoff, normalized: false, amps };
        state.normalize().expect("coherent state has nonzero norm").0
    }

    /// Build an unnormalized state from explicit amplitudes. Exact zeros are
    /// skipped; indices beyond the cutoff or with the wrong arity are rejected.
    pub fn from_amplitudes<I>(
        modes: usize,
        cutoff: u32,
        amplitudes: I,
    ) -> Result<Self, FockError>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut amps = BTreeMap::new();
        for (idx, a) in amplitudes {
            if idx.modes() != modes {
                return Err(FockError::WrongModeCount(idx.modes(), modes));
            }
            if idx.total_bosons() > cutoff {
                return Err(FockError::CutoffExceeded(idx.0.clone(), cutoff));
            }
            if a.norm_sqr() > 0.0 {
                *amps.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += a;
            }
        }
        amps.retain(|_, a| a.norm_sqr() > 0.0);
        Ok(FockState { modes, cutoff, normalized: false, amps })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn term_count(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, idx: &MultiIndex) -> Complex64 {
        self.amps.get(idx).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Iterate amplitudes in lexicographic occupation order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Renormalize, dropping amplitudes below [`DROP_THRESHOLD`].
    ///
    /// Returns the state and the probability weight removed by the drop (as a
    /// fraction of the input norm), so callers can ledger it.
    pub fn normalize(mut self) -> Result<(Self, f64), FockError> {
        let total = self.norm_sqr();
        if total <= 0.0 {
            return Err(FockError::ZeroNorm);
        }
        let mut dropped = 0.0;
        self.amps.retain(|_, a| {
            if a.norm() < DROP_THRESHOLD {
                dropped += a.norm_sqr();
                false
            } else {
                true
            }
        });
        let kept = total - dropped;
        if kept <= 0.0 {
            return Err(FockError::ZeroNorm);
        }
        let scale = 1.0 / kept.sqrt();
        for a in self.amps.values_mut() {
            *a *= scale;
        }
        self.normalized = true;
        Ok((self, dropped / total))
    }

    fn require_normalized(&self) -> Result<(), FockError> {
        let n = self.norm_sqr();
        if !self.normalized || (n - 1.0).abs() > NORM_TOL {
            return Err(FockError::NotNormalized(n));
        }
        Ok(())
    }

    /// Expectation of the exponential-energy operator: sum_n s^|n| |psi_n|^2.
    pub fn exp_energy_expectation(&self, s: f64) -> Result<f64, FockError> {
        if s <= 1.0 {
            return Err(FockError::BaseNotAboveOne(s));
        }
        self.require_normalized()?;
        Ok(self
            .amps
            .iter()
            .map(|(idx, a)| s.powi(idx.total_bosons() as i32) * a.norm_sqr())
            .sum())
    }

    /// Mean total boson number: sum_n |n| |psi_n|^2.
    pub fn energy_expectation(&self) -> Result<f64, FockError> {
        self.require_normalized()?;
        Ok(self
            .amps
            .iter()
            .map(|(idx, a)| idx.total_bosons() as f64 * a.norm_sqr())
            .sum())
    }

    /// Inner product `<self|other>`, summed over shared indices.
    pub fn overlap(&self, other: &FockState) -> Result<Complex64, FockError> {
        if self.modes != other.modes {
            return Err(FockError::ModeMismatch(self.modes, other.modes));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, a) in &self.amps {
            if let Some(b) = other.amps.get(idx) {
                acc += a.conj() * b;
            }
        }
        Ok(acc)
    }

    /// Pure-state trace distance: sqrt(1 - |<a|b>|^2), clamped into [0, 1].
    pub fn trace_distance_pure(&self, other: &FockState) -> Result<f64, FockError> {
        self.require_normalized()?;
        other.require_normalized()?;
        let f = self.overlap(other)?.norm_sqr();
        Ok((1.0 - f).max(0.0).sqrt().min(1.0))
    }

    /// Renormalized restriction to `|n| <= k` plus the probability weight removed.
    ///
    /// For `k >= cutoff` the state is returned unchanged with weight 0.
    pub fn truncate(&self, k: u32) -> Result<(FockState, f64), FockError> {
        self.require_normalized()?;
        if k >= self.cutoff {
            return Ok((self.clone(), 0.0));
        }
        let mut kept = BTreeMap::new();
        let mut removed = 0.0;
        for (idx, a) in &self.amps {
            if idx.total_bosons() <= k {
                kept.insert(idx.clone(), *a);
            } else {
                removed += a.norm_sqr();
            }
        }
        if kept.is_empty() {
            return Err(FockError::EmptyTruncation);
        }
        let retained: f64 = kept.values().map(|a| a.norm_sqr()).sum();
        let scale = 1.0 / retained.sqrt();
        for a in kept.values_mut() {
            *a *= scale;
        }
        let state = FockState { modes: self.modes, cutoff: k, normalized: true, amps: kept };
        Ok((state, removed))
    }

    /// Multiply each amplitude in place by `phase(n)` of unit modulus.
    pub(crate) fn apply_diagonal_phase<F>(&self, phase: F) -> FockState
    where
        F: Fn(&MultiIndex) -> Complex64,
    {
        let amps = self
            .amps
            .iter()
            .map(|(idx, a)| (idx.clone(), a * phase(idx)))
            .collect();
        FockState { modes: self.modes, cutoff: self.cutoff, normalized: self.normalized, amps }
    }

    pub(crate) fn from_map(
        modes: usize,
        cutoff: u32,
        normalized: bool,
        amps: BTreeMap<MultiIndex, Complex64>,
    ) -> Self {
        FockState { modes, cutoff, normalized, amps }
    }

    pub(crate) fn map(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.amps
    }
}
