//! Exact simulation of Gaussian + rational-Kerr circuits as superpositions
//! of Gaussian states, with continued-fraction rationalization of irrational
//! Kerr parameters under a certified trace-distance budget.
//!
//! Each rational Kerr gate splits every term into q (self) or q^2 (cross)
//! branches; no merging or pruning is performed, so the term count after L
//! layers is exactly the product of the branch counts.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::circuit::{CircuitIr, Layer, NonGaussianGate};
use crate::gaussian::{ElementaryGate, GaussianError, GaussianPureState, GaussianUnitary};
use crate::kerr::{KerrError, KerrKind, RationalKerr};

/// Default cap on the number of Gaussian terms a simulation may produce.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SuperposError {
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Kerr(#[from] KerrError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("term count {0} exceeds the configured cap {1}")]
    TermCapExceeded(usize, usize),
    #[error("circuit contains a non-rational gate in layer {0}; rationalize first")]
    NotRational(usize),
    #[error("layer {layer}: no convergent with q <= {q_cap} meets the budget {budget:.3e}")]
    BudgetUnreachable { layer: usize, q_cap: u64, budget: f64 },
    #[error("budget must lie in (0, 1), got {0}")]
    InvalidBudget(f64),
    #[error("{0} heterodyne outcomes supplied for {1} modes")]
    AlphaCount(usize, usize),
}

/// A weighted sum of pure Gaussian states on a fixed number of modes.
#[derive(Debug, Clone)]
pub struct GaussianSuperposition {
    modes: usize,
    terms: Vec<(Complex64, GaussianPureState)>,
}

impl GaussianSuperposition {
    pub fn vacuum(modes: usize) -> Self {
        GaussianSuperposition {
            modes,
            terms: vec![(Complex64::new(1.0, 0.0), GaussianPureState::vacuum(modes))],
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[(Complex64, GaussianPureState)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Global norm: sum over term pairs of c_J conj(c_J') <G_J'|G_J>.
    pub fn norm_sqr(&self) -> Result<f64, SuperposError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (cj, gj) in &self.terms {
            for (ck, gk) in &self.terms {
                acc += cj * ck.conj() * crate::gaussian::gaussian_overlap(gk, gj)?;
            }
        }
        Ok(acc.re)
    }
}

/// A circuit whose Kerr parameters are all rational, together with the
/// per-gate trace-distance errors introduced by rationalization.
#[derive(Debug, Clone)]
pub struct RationalizedCircuit {
    pub circuit: CircuitIr,
    pub per_gate_errors: Vec<f64>,
    pub total_error_bound: f64,
}

impl RationalizedCircuit {
    /// Wrap an already-rational circuit with a zero error budget.
    pub fn exact(circuit: CircuitIr) -> Result<Self, SuperposError> {
        for (i, layer) in circuit.layers().iter().enumerate() {
            if layer_needs_rationalizing(layer) {
                return Err(SuperposError::NotRational(i));
            }
        }
        Ok(RationalizedCircuit { circuit, per_gate_errors: Vec::new(), total_error_bound: 0.0 })
    }
}

fn layer_needs_rationalizing(layer: &Layer) -> bool {
    matches!(
        layer.non_gaussian,
        Some(NonGaussianGate::IrrationalKerr { .. }) | Some(NonGaussianGate::Diagonal(_))
    )
}

/// Replace every irrational Kerr parameter by a continued-fraction convergent
/// whose certified trace-distance error fits within `delta_total`, split
/// evenly across the irrational gates.
///
/// The certificate for layer i comes from the exponential-energy bound of the
/// first i layers' envelope; the per-gate error is the Kerr-neglect bound
/// evaluated at the Hurwitz error pi/(sqrt 5 q^2) of the chosen convergent.
pub fn rationalize(
    circuit: &CircuitIr,
    delta_total: f64,
    q_cap: u64,
) -> Result<RationalizedCircuit, SuperposError> {
    if !(delta_total > 0.0 && delta_total < 1.0) {
        return Err(SuperposError::InvalidBudget(delta_total));
    }
    let irrational_count = circuit
        .layers()
        .iter()
        .filter(|layer| layer_needs_rationalizing(layer))
        .count();
    if irrational_count == 0 {
        return Ok(RationalizedCircuit {
            circuit: circuit.clone(),
            per_gate_errors: Vec::new(),
            total_error_bound: 0.0,
        });
    }
    let budget = delta_total / irrational_count as f64;
    let mut layers = Vec::with_capacity(circuit.depth());
    let mut per_gate_errors = Vec::new();
    for (i, layer) in circuit.layers().iter().enumerate() {
        let mut new_layer = layer.clone();
        match &layer.non_gaussian {
            Some(NonGaussianGate::IrrationalKerr { x, kind, modes }) => {
                let cert = bounds::circuit_exp_energy_bound(&circuit.prefix_envelope(i + 1));
                let energy_proxy = cert.bound.ln() / cert.base.ln();
                let (p, q, err) =
                    pick_convergent(*x, cert.base, energy_proxy, budget, q_cap).ok_or(
                        SuperposError::BudgetUnreachable { layer: i, q_cap, budget },
                    )?;
                let gate = match kind {
                    KerrKind::SelfKerr => RationalKerr::self_kerr(p, q, modes[0])?,
                    KerrKind::CrossKerr => RationalKerr::cross_kerr(p, q, modes[0], modes[1])?,
                };
                per_gate_errors.push(err);
                new_layer.non_gaussian = Some(NonGaussianGate::Kerr(gate));
            }
            Some(NonGaussianGate::Diagonal(_)) => {
                return Err(SuperposError::NotRational(i));
            }
            _ => {}
        }
        layers.push(new_layer);
    }
    let total: f64 = per_gate_errors.iter().sum();
    let circuit = CircuitIr::new(circuit.modes(), layers).expect("layer shape unchanged");
    Ok(RationalizedCircuit { circuit, per_gate_errors, total_error_bound: total })
}

/// Walk the convergents of x in order and return the first whose certified
/// Kerr-neglect error meets the budget. Only Hurwitz-satisfying convergents
/// are considered, since the error is evaluated at pi/(sqrt 5 q^2).
fn pick_convergent(
    x: f64,
    base: f64,
    energy: f64,
    budget: f64,
    q_cap: u64,
) -> Option<(i64, u64, f64)> {
    for (p, q) in crate::kerr::convergents(x, q_cap) {
        if !crate::kerr::satisfies_hurwitz(x, p, q) {
            continue;
        }
        let eps = std::f64::consts::PI / (5f64.sqrt() * (q as f64) * (q as f64));
        let err = bounds::kerr_neglect_error_bound(base, energy, eps).ok()?;
        if err <= budget {
            return Some((p, q, err));
        }
    }
    None
}

/// Split every term of the superposition through one layer: branch phase
/// shifters from the Kerr decomposition, then the Gaussian gate.
pub fn expand_layer(
    sup: &GaussianSuperposition,
    kerr: &RationalKerr,
    gaussian: &GaussianUnitary,
) -> Result<GaussianSuperposition, SuperposError> {
    let decomposition = kerr.decompose();
    let target_modes = kerr.target_modes();
    let mut terms = Vec::with_capacity(sup.terms.len() * decomposition.branches.len());
    for (coeff, state) in &sup.terms {
        for branch in &decomposition.branches {
            let mut evolved = state.clone();
            for (mode, angle) in target_modes.iter().zip(&branch.phases) {
                evolved =
                    evolved.evolve(&ElementaryGate::PhaseShifter { mode: *mode, theta: *angle })?;
            }
            evolved = evolved.evolve_unitary(gaussian)?;
            terms.push((coeff * branch.coefficient, evolved));
        }
    }
    Ok(GaussianSuperposition { modes: sup.modes, terms })
}

/// Fold [`expand_layer`] over all layers starting from vacuum. Exact: no
/// truncation, no pruning. Errors out if the term count would exceed the cap.
pub fn simulate(
    rationalized: &RationalizedCircuit,
    term_cap: usize,
) -> Result<GaussianSuperposition, SuperposError> {
    let circuit = &rationalized.circuit;
    let mut sup = GaussianSuperposition::vacuum(circuit.modes());
    for (i, layer) in circuit.layers().iter().enumerate() {
        let kerr = match &layer.non_gaussian {
            Some(NonGaussianGate::Kerr(k)) => k.clone(),
            None => RationalKerr::self_kerr(0, 1, 0)?,
            _ => return Err(SuperposError::NotRational(i)),
        };
        let identity;
        let gaussian = match &layer.gaussian {
            Some(g) => g,
            None => {
                identity = GaussianUnitary::identity(circuit.modes());
                &identity
            }
        };
        let next_count = sup.term_count().saturating_mul(kerr.branch_count() as usize);
        if next_count > term_cap {
            return Err(SuperposError::TermCapExceeded(next_count, term_cap));
        }
        sup = expand_layer(&sup, &kerr, gaussian)?;
    }
    Ok(sup)
}

/// Heterodyne probability density on the first k modes:
/// (1/pi^k) sum_{J,J'} c_J conj(c_{J'}) <G_{J'}| (|a><a| x I) |G_J>.
///
/// Each pairwise summand is the partial heterodyne overlap of the two branch
/// states; the shared coherent projection of every branch is computed once.
/// The double sum is evaluated pairwise and reduced in fixed order, so the
/// result is deterministic regardless of the parallel schedule.
pub fn probability(
    sup: &GaussianSuperposition,
    alphas: &[Complex64],
) -> Result<f64, SuperposError> {
    let k = alphas.len();
    if k > sup.modes() || k == 0 {
        return Err(SuperposError::AlphaCount(k, sup.modes()));
    }
    if k == sup.modes() {
        // full-mode projection: every summand factorizes into scalar
        // amplitudes and the double sum collapses to |sum_J c_J <a|G_J>|^2
        let amp: Complex64 = sup
            .terms
            .iter()
            .map(|(c, g)| c * crate::gaussian::heterodyne_amplitude(g, alphas))
            .sum();
        return Ok(amp.norm_sqr() / std::f64::consts::PI.powi(k as i32));
    }
    let reduced: Vec<(Complex64, GaussianPureState)> = sup
        .terms
        .iter()
        .map(|(c, g)| (*c, g.project_coherent(alphas)))
        .collect();
    let rows: Result<Vec<Complex64>, SuperposError> = reduced
        .par_iter()
        .map(|(cj, gj)| {
            let mut row = Complex64::new(0.0, 0.0);
            for (ck, gk) in &reduced {
                row += cj * ck.conj() * crate::gaussian::gaussian_overlap(gk, gj)?;
            }
            Ok(row)
        })
        .collect();
    let total: Complex64 = rows?.into_iter().sum();
    debug_assert!(total.im.abs() <= 1e-10 * total.re.abs().max(1.0));
    Ok((total.re / std::f64::consts::PI.powi(k as i32)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Layer;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kerr_layer(p: i64, q: u64) -> Layer {
        Layer {
            non_gaussian: Some(NonGaussianGate::Kerr(
                RationalKerr::self_kerr(p, q, 0).unwrap(),
            )),
            gaussian: None,
        }
    }

    #[test]
    fn vacuum_probability_is_inverse_pi() {
        let sup = GaussianSuperposition::vacuum(1);
        let p = probability(&sup, &[c(0.0, 0.0)]).unwrap();
        assert_relative_eq!(p, 1.0 / PI, epsilon = 1e-13);
    }

    #[test]
    fn identity_kerr_keeps_term_count() {
        let sup = GaussianSuperposition::vacuum(1);
        let kerr = RationalKerr::self_kerr(0, 1, 0).unwrap();
        let out = expand_layer(&sup, &kerr, &GaussianUnitary::identity(1)).unwrap();
        assert_eq!(out.term_count(), 1);
    }

    #[test]
    fn branch_arithmetic_on_vacuum() {
        // kappa(-1/2) on vacuum: two branches, both states stay vacuum, and
        // the coefficients (1-i)/2 + (1+i)/2 sum to one
        let sup = GaussianSuperposition::vacuum(1);
        let kerr = RationalKerr::self_kerr(-1, 2, 0).unwrap();
        let out = expand_layer(&sup, &kerr, &GaussianUnitary::identity(1)).unwrap();
        assert_eq!(out.term_count(), 2);
        assert!((out.terms()[0].0 - c(0.5, -0.5)).norm() < 1e-14);
        assert!((out.terms()[1].0 - c(0.5, 0.5)).norm() < 1e-14);
        let total: Complex64 = out.terms().iter().map(|(c, _)| *c).sum();
        assert!((total - c(1.0, 0.0)).norm() < 1e-14);
        assert_relative_eq!(out.norm_sqr().unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn term_count_multiplies() {
        let circuit = CircuitIr::new(
            1,
            vec![kerr_layer(1, 2), kerr_layer(1, 2), kerr_layer(1, 2)],
        )
        .unwrap();
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let sup = simulate(&rc, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(sup.term_count(), 8);
    }

    #[test]
    fn term_cap_enforced() {
        let circuit = CircuitIr::new(1, vec![kerr_layer(1, 5); 4]).unwrap();
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let err = simulate(&rc, 100).unwrap_err();
        assert!(matches!(err, SuperposError::TermCapExceeded(125, 100)));
    }

    #[test]
    fn norm_invariant_after_layers() {
        let mut rs = DVector::zeros(1);
        rs[0] = 0.25;
        let g = GaussianUnitary::new(
            DMatrix::identity(1, 1),
            DVector::from_vec(vec![c(0.4, 0.3)]),
            rs,
            DMatrix::identity(1, 1),
        )
        .unwrap();
        let circuit = CircuitIr::new(
            1,
            vec![
                Layer {
                    non_gaussian: Some(NonGaussianGate::Kerr(
                        RationalKerr::self_kerr(1, 3, 0).unwrap(),
                    )),
                    gaussian: Some(g.clone()),
                },
                Layer {
                    non_gaussian: Some(NonGaussianGate::Kerr(
                        RationalKerr::self_kerr(1, 2, 0).unwrap(),
                    )),
                    gaussian: Some(g),
                },
            ],
        )
        .unwrap();
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let sup = simulate(&rc, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(sup.term_count(), 6);
        assert_relative_eq!(sup.norm_sqr().unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn hermiticity_of_probability() {
        let circuit = CircuitIr::new(
            1,
            vec![Layer {
                non_gaussian: Some(NonGaussianGate::Kerr(
                    RationalKerr::self_kerr(1, 2, 0).unwrap(),
                )),
                gaussian: Some(GaussianUnitary::new(
                    DMatrix::identity(1, 1),
                    DVector::from_vec(vec![c(0.5, -0.2)]),
                    DVector::from_vec(vec![0.2]),
                    DMatrix::identity(1, 1),
                )
                .unwrap()),
            }],
        )
        .unwrap();
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let sup = simulate(&rc, DEFAULT_TERM_CAP).unwrap();
        let p = probability(&sup, &[c(0.3, 0.1)]).unwrap();
        assert!(p >= 0.0);
    }

    #[test]
    fn passive_circuit_density_matches_closed_form() {
        // passive gates and Kerr branches all fix the vacuum, so every term
        // stays vacuum and the density is the coherent overlap e^{-|a|^2}/pi^m
        let bs = crate::gaussian::compose_elementary(
            &[crate::gaussian::ElementaryGate::BeamSplitter {
                mode_a: 0,
                mode_b: 1,
                theta: 0.7,
                phi: 0.4,
            }],
            2,
        )
        .unwrap();
        let g = GaussianUnitary::new(
            bs,
            nalgebra::DVector::zeros(2),
            nalgebra::DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let circuit = CircuitIr::new(
            2,
            vec![Layer {
                non_gaussian: Some(NonGaussianGate::Kerr(
                    RationalKerr::cross_kerr(1, 2, 0, 1).unwrap(),
                )),
                gaussian: Some(g),
            }],
        )
        .unwrap();
        let sup = simulate(&RationalizedCircuit::exact(circuit).unwrap(), 1000).unwrap();
        assert_eq!(sup.term_count(), 4);
        let alphas = [c(0.3, -0.2), c(-0.1, 0.5)];
        let p = probability(&sup, &alphas).unwrap();
        let expected = (-alphas[0].norm_sqr() - alphas[1].norm_sqr()).exp() / (PI * PI);
        assert_relative_eq!(p, expected, epsilon = 1e-12);
    }

    #[test]
    fn rationalize_passthrough_and_monotonicity() {
        let rational = CircuitIr::new(1, vec![kerr_layer(1, 3)]).unwrap();
        let rc = rationalize(&rational, 1e-2, 1 << 40).unwrap();
        assert_eq!(rc.total_error_bound, 0.0);

        let irrational = CircuitIr::new(
            1,
            vec![Layer {
                non_gaussian: Some(NonGaussianGate::IrrationalKerr {
                    x: 1.0 / 2f64.sqrt(),
                    kind: KerrKind::SelfKerr,
                    modes: vec![0],
                }),
                gaussian: None,
            }],
        )
        .unwrap();
        let loose = rationalize(&irrational, 1e-1, 1 << 40).unwrap();
        let tight = rationalize(&irrational, 1e-3, 1 << 40).unwrap();
        let q_of = |rc: &RationalizedCircuit| match &rc.circuit.layers()[0].non_gaussian {
            Some(NonGaussianGate::Kerr(k)) => k.denominator(),
            other => panic!("unexpected gate {other:?}"),
        };
        assert!(q_of(&tight) >= q_of(&loose));
        assert!(loose.total_error_bound <= 1e-1);
        assert!(tight.total_error_bound <= 1e-3);
    }

    #[test]
    fn rationalize_matches_convergent_scan_oracle() {
        // one gate x = 1/sqrt 2 with certificate (E = 2, s = 2), budget 1e-2:
        // scan the convergents directly and compare the selected q
        let x = 1.0 / 2f64.sqrt();
        let budget = 1e-2;
        let convergents: Vec<(i64, u64)> =
            vec![(0, 1), (1, 1), (2, 3), (5, 7), (12, 17), (29, 41), (70, 99), (169, 239), (408, 577)];
        let mut expected = None;
        for &(p, q) in &convergents {
            let exact = (x - p as f64 / q as f64).abs();
            if exact >= 1.0 / (5f64.sqrt() * (q * q) as f64) {
                continue;
            }
            let eps = PI / (5f64.sqrt() * (q * q) as f64);
            let err = bounds::kerr_neglect_error_bound(2.0, 2.0, eps).unwrap();
            if err <= budget {
                expected = Some(q);
                break;
            }
        }
        let picked = pick_convergent(x, 2.0, 2.0, budget, 1 << 40).unwrap();
        assert_eq!(Some(picked.1), expected);
        assert_eq!(picked.1, 577);
    }
}
