//! Monte-Carlo quasiprobability estimation of heterodyne probabilities by
//! sampling branch pairs of the Kerr phase-shifter decompositions.
//!
//! For P = sum_{J,J'} g_J conj(g_{J'}) <a|G_J><G_{J'}|a> / pi^m, pairs are
//! drawn with probability |g_J g_{J'}| / ||g||_1 and the leftover phase is
//! folded into the integrand. The pair 1-norm ||g||_1 = (prod_i ||g_i||_1)^2
//! prices the sampling overhead, and Hoeffding's inequality fixes the sample
//! count for a requested (eps, delta).

use std::collections::HashMap;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::NonGaussianGate;
use crate::gaussian::{heterodyne_amplitude, ElementaryGate, GaussianPureState};
use crate::kerr::PhaseShifterDecomposition;
use crate::superposition::RationalizedCircuit;

#[derive(Debug, Error)]
pub enum CuttingError {
    #[error("precision and confidence must lie in (0, 1), got eps = {eps}, delta = {delta}")]
    InvalidParameters { eps: f64, delta: f64 },
    #[error("pair 1-norm must be >= 1, got {0}")]
    OneNormBelowOne(f64),
    #[error("estimation requires one heterodyne outcome per mode: got {0} for {1}")]
    AlphaCount(usize, usize),
    #[error(transparent)]
    Gaussian(#[from] crate::gaussian::GaussianError),
    #[error(transparent)]
    Superpos(#[from] crate::superposition::SuperposError),
}

/// Samples sufficient for additive precision eps with confidence 1 - delta
/// against bounded increments of magnitude ||g||_1:
/// N = ceil(2 ||g||_1^2 / eps^2 ln(2/delta)).
pub fn hoeffding_count(g_pair_norm: f64, eps: f64, delta: f64) -> Result<u64, CuttingError> {
    if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(CuttingError::InvalidParameters { eps, delta });
    }
    if g_pair_norm < 1.0 {
        return Err(CuttingError::OneNormBelowOne(g_pair_norm));
    }
    Ok((2.0 * g_pair_norm * g_pair_norm / (eps * eps) * (2.0 / delta).ln()).ceil() as u64)
}

/// A sampling plan: the rationalized circuit, its branch decompositions, the
/// pair 1-norm, and the Hoeffding sample count for (eps, delta).
#[derive(Debug, Clone)]
pub struct CutPlan {
    circuit: RationalizedCircuit,
    decompositions: Vec<LayerBranches>,
    one_norm_pair: f64,
    pub eps: f64,
    pub delta: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct LayerBranches {
    decomposition: PhaseShifterDecomposition,
    weights: Vec<f64>,
}

/// Result of a cutting run.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Hoeffding half-width implied by (N, delta).
    pub half_width: f64,
    pub samples: u64,
    pub one_norm_pair: f64,
    /// True when the plan had a single branch and the value is exact.
    pub exact: bool,
}

impl CutPlan {
    /// Build a plan for the given precision, confidence, and seed. The
    /// sample count is [`hoeffding_count`] at the circuit's pair 1-norm.
    pub fn new(
        circuit: RationalizedCircuit,
        eps: f64,
        delta: f64,
        seed: u64,
    ) -> Result<Self, CuttingError> {
        let mut decompositions = Vec::new();
        let mut branch_norm_product = 1.0;
        for (i, layer) in circuit.circuit.layers().iter().enumerate() {
            let kerr = match &layer.non_gaussian {
                Some(NonGaussianGate::Kerr(k)) => k.clone(),
                None => crate::kerr::RationalKerr::self_kerr(0, 1, 0)
                    .expect("identity Kerr is valid"),
                _ => return Err(CuttingError::Superpos(
                    crate::superposition::SuperposError::NotRational(i),
                )),
            };
            let decomposition = kerr.decompose();
            let weights: Vec<f64> =
                decomposition.branches.iter().map(|b| b.coefficient.norm()).collect();
            let one_norm: f64 = weights.iter().sum();
            branch_norm_product *= one_norm;
            decompositions.push(LayerBranches { decomposition, weights });
        }
        let one_norm_pair = branch_norm_product * branch_norm_product;
        let samples = hoeffding_count(one_norm_pair.max(1.0), eps, delta)?;
        Ok(CutPlan { circuit, decompositions, one_norm_pair, eps, delta, samples, seed })
    }

    pub fn one_norm_pair(&self) -> f64 {
        self.one_norm_pair
    }

    pub fn circuit(&self) -> &RationalizedCircuit {
        &self.circuit
    }

    /// True when every decomposition has exactly one branch.
    pub fn is_single_branch(&self) -> bool {
        self.decompositions.iter().all(|l| l.decomposition.branches.len() == 1)
    }

    /// The Gaussian state of branch index tuple J, built by evolving vacuum
    /// through the branch phase shifters and layer Gaussians.
    fn branch_state(&self, index: &[u32]) -> Result<GaussianPureState, CuttingError> {
        let modes = self.circuit.circuit.modes();
        let mut state = GaussianPureState::vacuum(modes);
        for ((layer, branches), &branch) in
            self.circuit.circuit.layers().iter().zip(&self.decompositions).zip(index)
        {
            let d = &branches.decomposition;
            let b = &d.branches[branch as usize];
            for (mode, angle) in d.source.target_modes().iter().zip(&b.phases) {
                state =
                    state.evolve(&ElementaryGate::PhaseShifter { mode: *mode, theta: *angle })?;
            }
            if let Some(g) = &layer.gaussian {
                state = state.evolve_unitary(g)?;
            }
        }
        Ok(state)
    }

    /// Branch coefficient g_J = prod_i g_{j_i}.
    fn branch_coefficient(&self, index: &[u32]) -> Complex64 {
        index
            .iter()
            .zip(&self.decompositions)
            .map(|(&j, layer)| layer.decomposition.branches[j as usize].coefficient)
            .fold(Complex64::new(1.0, 0.0), |acc, g| acc * g)
    }
}

/// Estimate the heterodyne probability at a full-mode outcome by sampling
/// branch pairs. Deterministic for a fixed seed: each sample's randomness is
/// an independent counter-indexed stream, and the reduction order is fixed.
pub fn estimate(plan: &CutPlan, alphas: &[Complex64]) -> Result<Estimate, CuttingError> {
    let modes = plan.circuit.circuit.modes();
    if alphas.len() != modes {
        return Err(CuttingError::AlphaCount(alphas.len(), modes));
    }
    // single-branch decompositions short-circuit to the exact value
    if plan.is_single_branch() {
        let index = vec![0u32; plan.circuit.circuit.depth()];
        let state = plan.branch_state(&index)?;
        let coeff = plan.branch_coefficient(&index);
        let amp = heterodyne_amplitude(&state, alphas);
        let value = (coeff * amp).norm_sqr() / std::f64::consts::PI.powi(modes as i32);
        return Ok(Estimate {
            value,
            half_width: 0.0,
            samples: 1,
            one_norm_pair: plan.one_norm_pair,
            exact: true,
        });
    }

    let samplers: Vec<WeightedIndex<f64>> = plan
        .decompositions
        .iter()
        .map(|l| WeightedIndex::new(&l.weights).expect("branch weights are nonnegative"))
        .collect();

    // memoized branch amplitudes <alpha|G_J>, keyed by the index tuple
    let cache: HashMap<Vec<u32>, (Complex64, Complex64)> = HashMap::new();
    let cache = std::sync::Mutex::new(cache);
    let lookup = |index: Vec<u32>| -> Result<(Complex64, Complex64), CuttingError> {
        if let Some(hit) = cache.lock().unwrap().get(&index) {
            return Ok(*hit);
        }
        let state = plan.branch_state(&index)?;
        let amp = heterodyne_amplitude(&state, alphas);
        let coeff = plan.branch_coefficient(&index);
        let phase = if coeff.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { coeff / coeff.norm() };
        cache.lock().unwrap().insert(index, (amp, phase));
        Ok((amp, phase))
    };

    let pi_m = std::f64::consts::PI.powi(modes as i32);
    let values: Result<Vec<f64>, CuttingError> = (0..plan.samples)
        .into_par_iter()
        .map(|sample| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(sample);
            let draw = |rng: &mut ChaCha8Rng| -> Vec<u32> {
                samplers.iter().map(|s| s.sample(rng) as u32).collect()
            };
            let j = draw(&mut rng);
            let jp = draw(&mut rng);
            let (amp_j, phase_j) = lookup(j)?;
            let (amp_jp, phase_jp) = lookup(jp)?;
            let term = phase_j * phase_jp.conj() * amp_j * amp_jp.conj();
            Ok(plan.one_norm_pair * term.re / pi_m)
        })
        .collect();
    let values = values?;
    // fixed-order Neumaier summation keeps the reduction deterministic and tight
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    let mean = (sum + compensation) / plan.samples as f64;
    let half_width =
        plan.one_norm_pair * (2.0 * (2.0 / plan.delta).ln() / plan.samples as f64).sqrt();
    Ok(Estimate {
        value: mean,
        half_width,
        samples: plan.samples,
        one_norm_pair: plan.one_norm_pair,
        exact: false,
    })
}

/// Exhaustive mean of the sampling measure: every pair (J, J') weighted by
/// its draw probability times its estimator value. This is the quantity the
/// Monte-Carlo runs converge to, enumerated exactly for unbiasedness checks
/// on small branch spaces.
pub fn exhaustive_pair_sum(plan: &CutPlan, alphas: &[Complex64]) -> Result<f64, CuttingError> {
    let modes = plan.circuit.circuit.modes();
    if alphas.len() != modes {
        return Err(CuttingError::AlphaCount(alphas.len(), modes));
    }
    let branch_counts: Vec<usize> =
        plan.decompositions.iter().map(|l| l.decomposition.branches.len()).collect();
    let mut indices = vec![vec![0u32; branch_counts.len()]];
    for (layer, &count) in branch_counts.iter().enumerate() {
        let mut next = Vec::with_capacity(indices.len() * count);
        for idx in &indices {
            for b in 0..count {
                let mut grown = idx.clone();
                grown[layer] = b as u32;
                next.push(grown);
            }
        }
        indices = next;
    }
    let side_norm = plan.one_norm_pair.sqrt();
    let mut per_branch = Vec::with_capacity(indices.len());
    for idx in &indices {
        let state = plan.branch_state(idx)?;
        let amp = heterodyne_amplitude(&state, alphas);
        let coeff = plan.branch_coefficient(idx);
        let magnitude = coeff.norm();
        let phase =
            if magnitude == 0.0 { Complex64::new(1.0, 0.0) } else { coeff / magnitude };
        per_branch.push((magnitude / side_norm, phase, amp));
    }
    let pi_m = std::f64::consts::PI.powi(modes as i32);
    let mut mean = 0.0;
    for (w_j, phase_j, amp_j) in &per_branch {
        for (w_jp, phase_jp, amp_jp) in &per_branch {
            let probability = w_j * w_jp;
            let estimator =
                plan.one_norm_pair * (phase_j * phase_jp.conj() * amp_j * amp_jp.conj()).re / pi_m;
            mean += probability * estimator;
        }
    }
    Ok(mean)
}
