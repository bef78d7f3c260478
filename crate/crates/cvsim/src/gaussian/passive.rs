//! Decomposition of passive unitaries into beamsplitters and phase shifters.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use super::{check_unitary, ElementaryGate, GaussianError};

/// Left-multiply rows (a, b) of `work` by the beamsplitter matrix
/// [[cos t, -e^{i phi} sin t], [e^{-i phi} sin t, cos t]].
fn rotate_rows(work: &mut DMatrix<Complex64>, a: usize, b: usize, theta: f64, phi: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let e_pos = Complex64::from_polar(1.0, phi);
    let e_neg = Complex64::from_polar(1.0, -phi);
    for col in 0..work.ncols() {
        let ra = work[(a, col)];
        let rb = work[(b, col)];
        work[(a, col)] = c * ra - e_pos * s * rb;
        work[(b, col)] = e_neg * s * ra + c * rb;
    }
}

/// Decompose a passive unitary into at most m(m-1)/2 beamsplitters and m
/// phase shifters whose composition reproduces it.
///
/// The returned gates are in application order: phase shifters first, then
/// the beamsplitter mesh.
pub fn decompose_passive(u: &DMatrix<Complex64>) -> Result<Vec<ElementaryGate>, GaussianError> {
    check_unitary(u)?;
    let m = u.nrows();
    let mut work = u.clone();
    // Givens-style elimination: zero below-diagonal entries column by column,
    // bottom-up, mixing adjacent rows. A unitary reduced to upper triangular
    // form is diagonal.
    let mut rotations: Vec<(usize, usize, f64, f64)> = Vec::new();
    for col in 0..m {
        for row in ((col + 1)..m).rev() {
            let above = work[(row - 1, col)];
            let here = work[(row, col)];
            if here.norm() < 1e-14 {
                continue;
            }
            let (theta, phi) = if above.norm() < 1e-14 {
                (FRAC_PI_2, 0.0)
            } else {
                (here.norm().atan2(above.norm()), -(-here / above).arg())
            };
            rotate_rows(&mut work, row - 1, row, theta, phi);
            rotations.push((row - 1, row, theta, phi));
        }
    }
    let mut gates = Vec::new();
    for i in 0..m {
        let delta = work[(i, i)].arg();
        if delta.abs() > 1e-14 {
            gates.push(ElementaryGate::PhaseShifter { mode: i, theta: delta });
        }
    }
    // T_K ... T_1 U = D, so U = T_1' ... T_K' D with T' = BS(-theta, phi)
    for &(a, b, theta, phi) in rotations.iter().rev() {
        gates.push(ElementaryGate::BeamSplitter { mode_a: a, mode_b: b, theta: -theta, phi });
    }
    Ok(gates)
}

/// Single-photon matrix of an ordered elementary-gate program on `modes`
/// modes (first gate acts first). Squeezers and displacements are rejected.
pub fn compose_elementary(
    gates: &[ElementaryGate],
    modes: usize,
) -> Result<DMatrix<Complex64>, GaussianError> {
    let mut total = DMatrix::identity(modes, modes);
    for gate in gates {
        gate.validate(modes)?;
        match gate {
            ElementaryGate::PhaseShifter { mode, theta } => {
                let mut d = DMatrix::identity(modes, modes);
                d[(*mode, *mode)] = Complex64::from_polar(1.0, *theta);
                total = d * total;
            }
            ElementaryGate::BeamSplitter { mode_a, mode_b, theta, phi } => {
                let mut t = DMatrix::identity(modes, modes);
                let (c, s) = (theta.cos(), theta.sin());
                t[(*mode_a, *mode_a)] = Complex64::new(c, 0.0);
                t[(*mode_a, *mode_b)] = -Complex64::from_polar(s, *phi);
                t[(*mode_b, *mode_a)] = Complex64::from_polar(s, -*phi);
                t[(*mode_b, *mode_b)] = Complex64::new(c, 0.0);
                total = t * total;
            }
            _ => {
                return Err(GaussianError::DimensionMismatch(
                    "program contains a non-passive gate".into(),
                ))
            }
        }
    }
    Ok(total)
}
