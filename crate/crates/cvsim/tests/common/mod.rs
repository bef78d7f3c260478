//! Shared helpers for integration tests: seeded random circuits and gates.
// each test binary compiles this module separately and uses its own subset
#![allow(dead_code)]

use cvsim::circuit::{CircuitIr, Layer, NonGaussianGate};
use cvsim::gaussian::{compose_elementary, ElementaryGate, GaussianUnitary};
use cvsim::kerr::RationalKerr;
use cvsim::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random passive unitary built from our own beamsplitter and phase-shifter
/// primitives, so it is unitary by construction.
pub fn random_passive(modes: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let mut gates = Vec::new();
    for a in 0..modes {
        gates.push(ElementaryGate::PhaseShifter {
            mode: a,
            theta: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        });
        for b in (a + 1)..modes {
            gates.push(ElementaryGate::BeamSplitter {
                mode_a: a,
                mode_b: b,
                theta: rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
                phi: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            });
        }
    }
    compose_elementary(&gates, modes).expect("composition of passive gates is unitary")
}

pub fn random_gaussian(
    modes: usize,
    alpha_max: f64,
    r_max: f64,
    rng: &mut ChaCha8Rng,
) -> GaussianUnitary {
    let displacement = DVector::from_iterator(
        modes,
        (0..modes).map(|_| {
            let mag = rng.gen_range(0.0..=alpha_max);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(mag, phase)
        }),
    );
    let squeezing = DVector::from_iterator(modes, (0..modes).map(|_| rng.gen_range(0.0..=r_max)));
    GaussianUnitary::new(
        random_passive(modes, rng),
        displacement,
        squeezing,
        random_passive(modes, rng),
    )
    .expect("random Bloch-Messiah factors are valid")
}

/// Dense matrix exponential by scaling and squaring with a Taylor series;
/// an independent oracle for the gate kernels at small cutoffs.
pub fn dense_expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = norm.log2().ceil().max(0.0) as u32 + 4;
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let small = a / Complex64::new(2f64.powi(scale as i32), 0.0);
    for k in 1..=30 {
        term = &term * &small / Complex64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..scale {
        result = &result * &result;
    }
    result
}

/// Single-mode squeeze generator r/2 (a^2 - a'^2) as a dense matrix.
pub fn dense_squeeze_generator(r: f64, dim: usize) -> DMatrix<Complex64> {
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 2..dim {
        let amp = ((n * (n - 1)) as f64).sqrt() * r / 2.0;
        gen[(n - 2, n)] += Complex64::new(amp, 0.0);
        gen[(n, n - 2)] -= Complex64::new(amp, 0.0);
    }
    gen
}

/// Single-mode displacement generator alpha a' - conj(alpha) a as a dense matrix.
pub fn dense_displace_generator(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        let amp = (n as f64).sqrt();
        gen[(n, n - 1)] += alpha * amp;
        gen[(n - 1, n)] -= alpha.conj() * amp;
    }
    gen
}

/// Random circuit of `layers` layers on `modes` modes: each layer draws a
/// rational Kerr gate with q <= q_max (or none) and a random Gaussian gate.
pub fn random_circuit(
    modes: usize,
    layers: usize,
    alpha_max: f64,
    r_max: f64,
    q_max: u64,
    allow_cross: bool,
    rng: &mut ChaCha8Rng,
) -> CircuitIr {
    let layer_vec: Vec<Layer> = (0..layers)
        .map(|_| {
            let non_gaussian = if q_max >= 1 {
                let q = rng.gen_range(1..=q_max);
                let p = rng.gen_range(-(q as i64)..=(q as i64));
                let gate = if allow_cross && modes >= 2 && rng.gen_bool(0.3) {
                    RationalKerr::cross_kerr(p, 2, 0, 1).unwrap()
                } else {
                    let mode = rng.gen_range(0..modes);
                    RationalKerr::self_kerr(p, q, mode).unwrap()
                };
                Some(NonGaussianGate::Kerr(gate))
            } else {
                None
            };
            Layer {
                non_gaussian,
                gaussian: Some(random_gaussian(modes, alpha_max, r_max, rng)),
            }
        })
        .collect();
    CircuitIr::new(modes, layer_vec).expect("random layers are valid")
}
