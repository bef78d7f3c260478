//! Cross-checks between the Bargmann calculus, the Fock gate kernels, and
//! the two simulation backends, plus the growth-factor chaining property.

mod common;

use common::{c, random_circuit, random_gaussian};
use cvsim::bounds::{displacement_growth, squeezing_admissible_t, squeezing_growth};
use cvsim::fock::{FockState, MultiIndex};
use cvsim::fock_backend;
use cvsim::gaussian::{
    apply_gaussian, fock_amplitudes_of_gaussian, GaussianPureState, GaussianUnitary,
};
use cvsim::superposition::{self, RationalizedCircuit};
use cvsim::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gate-level backend equivalence: evolving the Bargmann parameters and then
/// expanding in the Fock basis agrees with applying the gate to the Fock
/// expansion of the input, amplitude by amplitude, phases included. The
/// kernel route renormalizes by positive reals only, so the two expansions
/// must agree up to one positive real factor.
#[test]
fn bargmann_and_fock_kernels_agree_per_gate() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..8 {
        let modes = 1 + (trial % 2);
        let gate = random_gaussian(modes, 0.8, 0.4, &mut rng);
        let evolved = GaussianPureState::vacuum(modes).evolve_unitary(&gate).unwrap();
        let via_bargmann = fock_amplitudes_of_gaussian(&evolved, 30);

        let vacuum = FockState::vacuum(modes, 30);
        let (via_kernels, _) = apply_gaussian(&vacuum, &gate, 30).unwrap();

        let overlap = via_bargmann.overlap(&via_kernels).unwrap();
        // via_bargmann is unnormalized: its norm is the retained mass
        let deficit = (overlap.norm() / via_bargmann.norm_sqr().sqrt() - 1.0).abs();
        assert!(deficit < 1e-8, "trial {trial}: overlap deficit {deficit}");

        let scale = via_bargmann.norm_sqr().sqrt();
        for (idx, amp) in via_kernels.amplitudes() {
            if amp.norm() < 1e-6 {
                continue;
            }
            let expected = via_bargmann.amplitude(idx) / scale;
            assert!(
                (expected - amp).norm() < 1e-8,
                "trial {trial} {idx:?}: bargmann {expected} vs kernel {amp}"
            );
        }
    }
}

/// Marginal (k < m) heterodyne densities from the superposition backend
/// match the Fock backend's residual-occupation sum.
#[test]
fn marginal_probabilities_agree_across_backends() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for trial in 0..6 {
        let circuit = random_circuit(2, 1 + trial % 2, 0.6, 0.2, 3, true, &mut rng);
        let fock_run = fock_backend::simulate(&circuit, 40).unwrap();
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let sup = superposition::simulate(&rc, 1_000_000).unwrap();
        for _ in 0..3 {
            let alpha = [c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7))];
            let p_fock =
                fock_backend::heterodyne_probability(&fock_run.state, &alpha).unwrap();
            let p_sup = superposition::probability(&sup, &alpha).unwrap();
            assert!(
                (p_fock - p_sup).abs() <= fock_run.total_error_bound + 1e-8,
                "trial {trial}: marginal {p_fock} vs {p_sup}"
            );
        }
    }
}

#[test]
fn apply_gaussian_norm_deficit_equals_reported_weight() {
    // Dense oracle with the same discipline as the gate kernels: evolve by
    // matrix exponentials, project at the cutoff after each non-passive gate,
    // renormalize, and compound the per-gate norm deficits.
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for trial in 0..6 {
        let r = rng.gen_range(0.2..0.8);
        let alpha = Complex64::from_polar(
            rng.gen_range(0.3..1.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let cutoff = 12usize;
        let gate = GaussianUnitary::new(
            DMatrix::identity(1, 1),
            DVector::from_vec(vec![alpha]),
            DVector::from_vec(vec![r]),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        let vacuum = FockState::vacuum(1, cutoff as u32);
        let (out, reported) = apply_gaussian(&vacuum, &gate, cutoff as u32).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);

        let dim = 4 * cutoff; // enough headroom for the exact evolution
        let mut vec_state = DVector::<Complex64>::zeros(dim);
        vec_state[0] = c(1.0, 0.0);
        let mut retained_product = 1.0;
        for generator in [
            common::dense_squeeze_generator(r, dim),
            common::dense_displace_generator(alpha, dim),
        ] {
            vec_state = common::dense_expm(&generator) * vec_state;
            for n in (cutoff + 1)..dim {
                vec_state[n] = c(0.0, 0.0);
            }
            let kept = vec_state.norm_squared();
            retained_product *= kept;
            vec_state /= Complex64::new(kept.sqrt(), 0.0);
        }
        let oracle = 1.0 - retained_product;
        assert!(
            (oracle - reported).abs() < 1e-12,
            "trial {trial}: reported {reported} vs dense oracle {oracle}"
        );
    }
}

/// Stronger gates stress the alternating sums in the normal-ordered kernels;
/// the dense matrix exponential pins every retained amplitude.
#[test]
fn strong_gate_kernels_match_dense_exponentials() {
    let cutoff = 40usize;
    // the squeezed tail decays like tanh(r)^2 per level pair, so the dense
    // oracle needs enough headroom that its boundary stops mattering
    let dim = 3 * cutoff;
    let cases: Vec<(cvsim::gaussian::ElementaryGate, DMatrix<Complex64>)> = vec![
        (
            cvsim::gaussian::ElementaryGate::Squeeze { mode: 0, r: 0.8 },
            common::dense_squeeze_generator(0.8, dim),
        ),
        (
            cvsim::gaussian::ElementaryGate::Displace { mode: 0, alpha: c(1.8, -1.2) },
            common::dense_displace_generator(c(1.8, -1.2), dim),
        ),
    ];
    for (gate, generator) in cases {
        let vacuum = FockState::vacuum(1, cutoff as u32);
        let (out, _) = cvsim::gaussian::apply_elementary(&vacuum, &gate, cutoff as u32).unwrap();
        let mut dense = DVector::<Complex64>::zeros(dim);
        dense[0] = c(1.0, 0.0);
        let dense = common::dense_expm(&generator) * dense;
        let retained: f64 = (0..=cutoff).map(|n| dense[n].norm_sqr()).sum();
        let scale = retained.sqrt();
        for n in 0..=cutoff {
            let expected = dense[n] / Complex64::new(scale, 0.0);
            let got = out.amplitude(&MultiIndex::new(vec![n as u32]));
            assert!(
                (got - expected).norm() < 1e-9,
                "{gate:?} n={n}: kernel {got} vs dense {expected}"
            );
        }
    }
}

#[test]
fn passive_gates_preserve_boson_number_histogram() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let passive = GaussianUnitary::new(
        common::random_passive(2, &mut rng),
        DVector::zeros(2),
        DVector::zeros(2),
        common::random_passive(2, &mut rng),
    )
    .unwrap();
    let state = FockState::from_amplitudes(
        2,
        12,
        vec![
            (MultiIndex::new(vec![1, 2]), c(0.6, 0.1)),
            (MultiIndex::new(vec![3, 0]), c(0.2, -0.4)),
            (MultiIndex::new(vec![0, 0]), c(0.5, 0.0)),
        ],
    )
    .unwrap()
    .normalize()
    .unwrap()
    .0;
    let histogram = |s: &FockState| {
        let mut h = std::collections::BTreeMap::new();
        for (idx, a) in s.amplitudes() {
            *h.entry(idx.total_bosons()).or_insert(0.0) += a.norm_sqr();
        }
        h
    };
    let before = histogram(&state);
    let (after_state, w) = apply_gaussian(&state, &passive, 12).unwrap();
    assert_eq!(w, 0.0);
    let after = histogram(&after_state);
    for (n, weight) in before {
        assert!((after.get(&n).copied().unwrap_or(0.0) - weight).abs() < 1e-10, "n = {n}");
    }
}

/// The per-layer chaining bound: displacement growth at (t, t~) times the
/// squeezing growth at (t~, s) upper-bounds the measured exp-energy ratio
/// across one D(alpha) S(r) layer.
#[test]
fn growth_factors_bound_measured_exp_energy_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..10 {
        let r = rng.gen_range(0.0..0.3);
        let alpha_mag = rng.gen_range(0.0..1.0);
        let alpha = Complex64::from_polar(alpha_mag, rng.gen_range(0.0..std::f64::consts::TAU));
        let s = 1.3;
        let f = squeezing_admissible_t(r, s);
        let t_mid = 1.0 + 0.8 * (f - 1.0); // strictly inside (1, f(r, s))
        let t = 1.0 + 0.5 * (t_mid - 1.0);
        let growth = squeezing_growth(r, s, t_mid).unwrap()
            * displacement_growth(t_mid, t, alpha_mag, 1).unwrap();

        // random low-energy input state
        let amps: Vec<_> = (0..5u32)
            .map(|n| {
                (
                    MultiIndex::new(vec![n]),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        let input = FockState::from_amplitudes(1, 60, amps).unwrap().normalize().unwrap().0;
        let gate = GaussianUnitary::new(
            DMatrix::identity(1, 1),
            DVector::from_vec(vec![alpha]),
            DVector::from_vec(vec![r]),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        let (output, w) = apply_gaussian(&input, &gate, 60).unwrap();
        assert!(w < 1e-12, "cutoff 60 must be lossless here, discarded {w}");
        let before = input.exp_energy_expectation(s).unwrap();
        let after = output.exp_energy_expectation(t).unwrap();
        assert!(
            after <= growth * before * (1.0 + 1e-9),
            "trial {trial}: ratio {} exceeds growth bound {growth}",
            after / before
        );
    }
}

/// Full-circuit agreement between the two backends on random rational
/// circuits, within the Fock backend's certified bound.
#[test]
fn backends_agree_on_random_rational_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..10 {
        let modes = 1 + (trial % 2);
        let layers = 1 + (trial % 3);
        let circuit = random_circuit(modes, layers, 0.7, 0.25, 3, modes == 2, &mut rng);
        let fock_run = fock_backend::simulate(&circuit, 40).unwrap();
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let sup = superposition::simulate(&rc, 1_000_000).unwrap();
        for _ in 0..3 {
            let alphas: Vec<Complex64> = (0..modes)
                .map(|_| c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
                .collect();
            let p_fock = fock_backend::heterodyne_probability(&fock_run.state, &alphas).unwrap();
            let p_sup = superposition::probability(&sup, &alphas).unwrap();
            assert!(
                (p_fock - p_sup).abs() <= fock_run.total_error_bound + 1e-8,
                "trial {trial}: fock {p_fock} vs superpos {p_sup}, bound {}",
                fock_run.total_error_bound
            );
        }
    }
}

/// The Kerr-neglect budget dominates the measured trace distance between a
/// certified state and its image under a weak self-Kerr phase e^{i eps N^2}.
#[test]
fn kerr_neglect_bound_dominates_measured_distance() {
    use cvsim::bounds::kerr_neglect_error_bound;
    use cvsim::kerr::{apply_kerr_diagonal, KerrKind};
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..20 {
        let mut amps = Vec::new();
        for n in 0..10u32 {
            amps.push((
                MultiIndex::new(vec![n]),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ));
        }
        let state = FockState::from_amplitudes(1, 12, amps)
            .unwrap()
            .normalize()
            .unwrap()
            .0;
        let s = 1.6f64;
        let energy_proxy = state.exp_energy_expectation(s).unwrap().ln() / s.ln();
        for eps in [1e-2, 1e-3, 1e-4] {
            // kappa(x) = e^{i pi x N^2}, so the gate e^{i eps N^2} has x = eps/pi
            let rotated = apply_kerr_diagonal(
                &state,
                eps / std::f64::consts::PI,
                KerrKind::SelfKerr,
                &[0],
            )
            .unwrap();
            let measured = state.trace_distance_pure(&rotated).unwrap();
            let bound = kerr_neglect_error_bound(s, energy_proxy, eps).unwrap();
            assert!(
                measured <= bound,
                "trial {trial} eps={eps}: measured {measured} exceeds bound {bound}"
            );
        }
    }
}

/// Ledger validity at small cutoffs: when the working cutoff is tight enough
/// that real weight is discarded, the gap to the exact probability stays
/// inside the a-posteriori error bound. The superposition backend supplies
/// the exact value (rational circuits, no truncation anywhere).
#[test]
fn small_cutoff_ledger_bounds_true_probability_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut nontrivial = 0usize;
    for trial in 0..100 {
        let modes = 1 + (trial % 2);
        let layers = 1 + (trial % 3);
        let circuit = random_circuit(modes, layers, 1.0, 0.3, 3, modes == 2, &mut rng);
        let cutoff = 8 + (trial % 5) as u32;
        let run = match fock_backend::simulate(&circuit, cutoff) {
            Ok(run) => run,
            // a cutoff this tight may legitimately strand no amplitude at all
            Err(_) => continue,
        };
        if run.total_error_bound > 1e-6 {
            nontrivial += 1;
        }
        let rc = RationalizedCircuit::exact(circuit).unwrap();
        let sup = superposition::simulate(&rc, 1_000_000).unwrap();
        for _ in 0..2 {
            let alphas: Vec<Complex64> = (0..modes)
                .map(|_| c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
                .collect();
            let p_exact = superposition::probability(&sup, &alphas).unwrap();
            let p_sim = fock_backend::heterodyne_probability(&run.state, &alphas).unwrap();
            assert!(
                (p_exact - p_sim).abs() <= run.total_error_bound + 1e-12,
                "trial {trial} k={cutoff}: |{p_exact} - {p_sim}| > {}",
                run.total_error_bound
            );
        }
    }
    // the check must actually bite: most draws discard real weight at k ~ 10
    assert!(nontrivial > 50, "only {nontrivial} circuits had a nontrivial ledger");
}

/// Rationalized circuits stay within their certified budget, measured against
/// the Fock backend running the irrational gate exactly.
#[test]
fn rationalization_respects_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..4 {
        let x = rng.gen_range(0.05..0.95) * std::f64::consts::SQRT_2;
        let alpha = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let circuit = irrational_two_layer(x, alpha);
        let delta = 1e-1;
        let rationalized = superposition::rationalize(&circuit, delta, 1 << 40).unwrap();
        assert!(rationalized.total_error_bound <= delta);

        let exact_run = fock_backend::simulate(&circuit, 50).unwrap();
        let sup = superposition::simulate(&rationalized, 5_000_000).unwrap();
        let alphas = [c(0.1, -0.2)];
        let p_exact = fock_backend::heterodyne_probability(&exact_run.state, &alphas).unwrap();
        let p_rat = superposition::probability(&sup, &alphas).unwrap();
        assert!(
            (p_exact - p_rat).abs() <= delta + exact_run.total_error_bound + 1e-8,
            "trial {trial}: exact {p_exact} vs rationalized {p_rat}"
        );
    }
}

/// Rationalizing an irrational cross-Kerr gate stays within budget, checked
/// entirely in the Fock backend (which applies both the irrational and the
/// rationalized gate exactly as diagonals).
#[test]
fn cross_kerr_rationalization_respects_budget() {
    use cvsim::circuit::{CircuitIr, Layer, NonGaussianGate};
    use cvsim::kerr::KerrKind;
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let displace = GaussianUnitary::new(
        DMatrix::identity(2, 2),
        DVector::from_vec(vec![c(0.5, 0.1), c(-0.3, 0.2)]),
        DVector::zeros(2),
        DMatrix::identity(2, 2),
    )
    .unwrap();
    for _ in 0..3 {
        let x = rng.gen_range(0.05..0.95) * std::f64::consts::SQRT_2;
        let circuit = CircuitIr::new(
            2,
            vec![
                Layer { non_gaussian: None, gaussian: Some(displace.clone()) },
                Layer {
                    non_gaussian: Some(NonGaussianGate::IrrationalKerr {
                        x,
                        kind: KerrKind::CrossKerr,
                        modes: vec![0, 1],
                    }),
                    gaussian: None,
                },
            ],
        )
        .unwrap();
        let delta = 1e-1;
        let rationalized = superposition::rationalize(&circuit, delta, 1 << 40).unwrap();
        assert!(rationalized.total_error_bound <= delta);
        match &rationalized.circuit.layers()[1].non_gaussian {
            Some(NonGaussianGate::Kerr(k)) => {
                assert_eq!(k.kind(), KerrKind::CrossKerr);
                assert!((x - k.parameter()).abs() < 1.0 / (5f64.sqrt() * (k.denominator() as f64).powi(2)));
            }
            other => panic!("unexpected gate {other:?}"),
        }
        let original = fock_backend::simulate(&circuit, 40).unwrap();
        let swapped = fock_backend::simulate(&rationalized.circuit, 40).unwrap();
        let alpha = [c(0.2, -0.1), c(0.1, 0.3)];
        let p_orig = fock_backend::heterodyne_probability(&original.state, &alpha).unwrap();
        let p_rat = fock_backend::heterodyne_probability(&swapped.state, &alpha).unwrap();
        assert!(
            (p_orig - p_rat).abs()
                <= delta + original.total_error_bound + swapped.total_error_bound + 1e-10,
            "x = {x}: {p_orig} vs {p_rat}"
        );
    }
}

fn irrational_two_layer(x: f64, alpha: Complex64) -> cvsim::circuit::CircuitIr {
    use cvsim::circuit::{CircuitIr, Layer, NonGaussianGate};
    use cvsim::kerr::KerrKind;
    let displace = GaussianUnitary::new(
        DMatrix::identity(1, 1),
        DVector::from_vec(vec![alpha]),
        DVector::zeros(1),
        DMatrix::identity(1, 1),
    )
    .unwrap();
    CircuitIr::new(
        1,
        vec![
            Layer { non_gaussian: None, gaussian: Some(displace) },
            Layer {
                non_gaussian: Some(NonGaussianGate::IrrationalKerr {
                    x,
                    kind: KerrKind::SelfKerr,
                    modes: vec![0],
                }),
                gaussian: None,
            },
        ],
    )
    .unwrap()
}
