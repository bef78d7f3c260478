//! Exact phase-shifter decompositions of self- and cross-Kerr gates,
//! continued-fraction rationalization, and diagonal Kerr application.
//!
//! A rational self-Kerr gate splits into q phase shifters, a rational
//! cross-Kerr gate into q^2 pairs of phase shifters. The coefficients are
//! finite Fourier sums evaluated directly; at the denominators this crate
//! targets, clarity beats an FFT.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::fock::{FockState, MultiIndex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KerrError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("cross-Kerr requires two distinct modes, got {0} and {1}")]
    DegenerateCrossModes(usize, usize),
    #[error("mode index {0} out of range for {1} modes")]
    ModeOutOfRange(usize, usize),
    #[error("q_max must be >= 1")]
    ZeroQMax,
    #[error("value {0} has no representable convergent")]
    Unrepresentable(f64),
}

/// Which diagonal Kerr gate: exp(i pi x N^2) on one mode, or
/// exp(i 2 pi x N_1 N_2) across two modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KerrKind {
    SelfKerr,
    CrossKerr,
}

/// A Kerr gate with rational parameter x = p/q in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalKerr {
    p: i64,
    q: u64,
    kind: KerrKind,
    modes: Vec<usize>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn reduce(p: i64, q: u64) -> (i64, u64) {
    if p == 0 {
        return (0, 1);
    }
    let g = gcd(p.unsigned_abs(), q);
    (p / g as i64, q / g)
}

impl RationalKerr {
    pub fn self_kerr(p: i64, q: u64, mode: usize) -> Result<Self, KerrError> {
        if q == 0 {
            return Err(KerrError::ZeroDenominator);
        }
        let (p, q) = reduce(p, q);
        Ok(RationalKerr { p, q, kind: KerrKind::SelfKerr, modes: vec![mode] })
    }

    pub fn cross_kerr(p: i64, q: u64, mode_a: usize, mode_b: usize) -> Result<Self, KerrError> {
        if q == 0 {
            return Err(KerrError::ZeroDenominator);
        }
        if mode_a == mode_b {
            return Err(KerrError::DegenerateCrossModes(mode_a, mode_b));
        }
        let (p, q) = reduce(p, q);
        Ok(RationalKerr { p, q, kind: KerrKind::CrossKerr, modes: vec![mode_a, mode_b] })
    }

    pub fn numerator(&self) -> i64 {
        self.p
    }

    pub fn denominator(&self) -> u64 {
        self.q
    }

    pub fn kind(&self) -> KerrKind {
        self.kind
    }

    pub fn target_modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn parameter(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn is_identity(&self) -> bool {
        self.p == 0
    }

    /// Phase-shifter decomposition of this gate.
    pub fn decompose(&self) -> PhaseShifterDecomposition {
        decompose_kerr(self.p, self.q, self.kind, &self.modes)
    }

    /// Number of branches the decomposition produces: q or q^2.
    pub fn branch_count(&self) -> u64 {
        match self.kind {
            KerrKind::SelfKerr => self.q,
            KerrKind::CrossKerr => self.q * self.q,
        }
    }
}

/// One branch of a decomposition: a complex weight and the phase-shifter
/// angle applied to each target mode.
#[derive(Debug, Clone, PartialEq)]
pub struct KerrBranch {
    pub coefficient: Complex64,
    pub phases: Vec<f64>,
}

/// A Kerr gate written as a weighted sum of phase shifters.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShifterDecomposition {
    pub branches: Vec<KerrBranch>,
    pub source: RationalKerr,
}

impl PhaseShifterDecomposition {
    /// Sum of coefficient magnitudes. For self-Kerr this is at most sqrt(q).
    pub fn one_norm(&self) -> f64 {
        self.branches.iter().map(|b| b.coefficient.norm()).sum()
    }

    /// The diagonal phase factor this decomposition reproduces at the given
    /// target-mode occupations.
    pub fn recomposed_phase(&self, occupations: &[u32]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for branch in &self.branches {
            let theta: f64 = branch
                .phases
                .iter()
                .zip(occupations)
                .map(|(angle, &n)| angle * n as f64)
                .sum();
            acc += branch.coefficient * Complex64::from_polar(1.0, theta);
        }
        acc
    }
}

/// Above this denominator the coefficient Fourier sums go through an FFT;
/// below it the direct quadratic summation is clearer and just as fast.
const FFT_THRESHOLD: u64 = 256;

/// The quadratic phase sequence e^{-i pi p n^2 / q} (even q) or
/// e^{-i pi p n(n-1) / q} (odd q) whose inverse DFT yields the branch weights.
fn self_kerr_phase_sequence(p: i64, q: u64) -> Vec<Complex64> {
    let qf = q as f64;
    let pf = p as f64;
    let even = q % 2 == 0;
    (0..q)
        .map(|n| {
            let nf = n as f64;
            let quad = if even { nf * nf } else { nf * (nf - 1.0) };
            Complex64::from_polar(1.0, -PI * pf * quad / qf)
        })
        .collect()
}

fn self_kerr_weights_direct(p: i64, q: u64) -> Vec<Complex64> {
    let qf = q as f64;
    let seq = self_kerr_phase_sequence(p, q);
    (0..q)
        .map(|j| {
            let mut g = Complex64::new(0.0, 0.0);
            for (n, phase) in seq.iter().enumerate() {
                g += phase * Complex64::from_polar(1.0, 2.0 * PI * (j as f64) * (n as f64) / qf);
            }
            g / qf
        })
        .collect()
}

fn self_kerr_weights_fft(p: i64, q: u64) -> Vec<Complex64> {
    let mut buffer = self_kerr_phase_sequence(p, q);
    rustfft::FftPlanner::new().plan_fft_inverse(q as usize).process(&mut buffer);
    for g in buffer.iter_mut() {
        *g /= q as f64;
    }
    buffer
}

/// Coefficients and angles for the self-Kerr gate kappa(-p/q) as a sum of q
/// phase shifters. Even q uses angles -2 pi j / q; odd q uses the shifted
/// angles -pi (2j + p)/q.
pub fn self_kerr_coefficients(p: i64, q: u64) -> Vec<(Complex64, f64)> {
    let qf = q as f64;
    let pf = p as f64;
    let even = q % 2 == 0;
    let weights = if q < FFT_THRESHOLD {
        self_kerr_weights_direct(p, q)
    } else {
        self_kerr_weights_fft(p, q)
    };
    weights
        .into_iter()
        .enumerate()
        .map(|(j, g)| {
            let jf = j as f64;
            let angle = if even {
                -2.0 * PI * jf / qf
            } else {
                -PI * (2.0 * jf + pf) / qf
            };
            (g, angle)
        })
        .collect()
}

/// Coefficient grid for the cross-Kerr gate ckappa(p/q) as q^2 branches with
/// angle pairs (2 pi j / q, 2 pi k / q), flattened row-major in (j, k).
pub fn cross_kerr_coefficients(p: i64, q: u64) -> Vec<(Complex64, (f64, f64))> {
    let qf = q as f64;
    let grid = if q < 64 {
        cross_kerr_weights_direct(p, q)
    } else {
        cross_kerr_weights_fft(p, q)
    };
    let mut out = Vec::with_capacity((q * q) as usize);
    for j in 0..q {
        for k in 0..q {
            out.push((
                grid[(j * q + k) as usize],
                (2.0 * PI * j as f64 / qf, 2.0 * PI * k as f64 / qf),
            ));
        }
    }
    out
}

fn cross_kerr_weights_direct(p: i64, q: u64) -> Vec<Complex64> {
    let qf = q as f64;
    let pf = p as f64;
    let mut grid = Vec::with_capacity((q * q) as usize);
    for j in 0..q {
        for k in 0..q {
            let mut g = Complex64::new(0.0, 0.0);
            for m in 0..q {
                for n in 0..q {
                    let phase = 2.0 * PI / qf
                        * (pf * (m as f64) * (n as f64) - (j * m + k * n) as f64);
                    g += Complex64::from_polar(1.0, phase);
                }
            }
            grid.push(g / (qf * qf));
        }
    }
    grid
}

fn cross_kerr_weights_fft(p: i64, q: u64) -> Vec<Complex64> {
    // g = forward 2D DFT of e^{i 2 pi p m n / q}, normalized by q^2,
    // evaluated row-column with a shared plan
    let qf = q as f64;
    let pf = p as f64;
    let size = (q * q) as usize;
    let mut grid: Vec<Complex64> = Vec::with_capacity(size);
    for m in 0..q {
        for n in 0..q {
            grid.push(Complex64::from_polar(1.0, 2.0 * PI * pf * (m as f64) * (n as f64) / qf));
        }
    }
    let fft = rustfft::FftPlanner::new().plan_fft_forward(q as usize);
    // transform rows (index n -> k)
    for row in grid.chunks_exact_mut(q as usize) {
        fft.process(row);
    }
    // transform columns (index m -> j) through a scratch buffer
    let mut column = vec![Complex64::new(0.0, 0.0); q as usize];
    for k in 0..q as usize {
        for m in 0..q as usize {
            column[m] = grid[m * q as usize + k];
        }
        fft.process(&mut column);
        for j in 0..q as usize {
            grid[j * q as usize + k] = column[j] / (qf * qf);
        }
    }
    grid
}

/// Decomposition of the gate with parameter x = p/q per [`KerrKind`].
///
/// The self-Kerr branch formulas are stated for kappa(-p/q), so the sign of
/// the numerator is flipped on the way in; the cross-Kerr formulas already
/// carry +p/q.
pub fn decompose_kerr(
    x_num: i64,
    x_den: u64,
    kind: KerrKind,
    target_modes: &[usize],
) -> PhaseShifterDecomposition {
    let (p, q) = reduce(x_num, x_den);
    match kind {
        KerrKind::SelfKerr => {
            let branches = self_kerr_coefficients(-p, q)
                .into_iter()
                .map(|(coefficient, angle)| KerrBranch { coefficient, phases: vec![angle] })
                .collect();
            let source = RationalKerr {
                p,
                q,
                kind,
                modes: target_modes.to_vec(),
            };
            PhaseShifterDecomposition { branches, source }
        }
        KerrKind::CrossKerr => {
            let branches = cross_kerr_coefficients(p, q)
                .into_iter()
                .map(|(coefficient, (a, b))| KerrBranch { coefficient, phases: vec![a, b] })
                .collect();
            let source = RationalKerr {
                p,
                q,
                kind,
                modes: target_modes.to_vec(),
            };
            PhaseShifterDecomposition { branches, source }
        }
    }
}

/// Whether p/q approximates x within the Hurwitz bound 1/(sqrt 5 q^2).
pub fn satisfies_hurwitz(x: f64, p: i64, q: u64) -> bool {
    let err = (x - p as f64 / q as f64).abs();
    err < 1.0 / (5f64.sqrt() * (q as f64) * (q as f64))
}

/// All continued-fraction convergents of x with denominator at most q_max,
/// in order of increasing denominator.
///
/// The expansion is capped at 64 terms; convergent denominators grow at
/// least as fast as Fibonacci numbers, so that exceeds anything double
/// precision can distinguish.
pub fn convergents(x: f64, q_max: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    let mut h_prev2: i128 = 0;
    let mut h_prev1: i128 = 1;
    let mut k_prev2: i128 = 1;
    let mut k_prev1: i128 = 0;
    let mut value = x;
    for _ in 0..64 {
        let a = value.floor();
        let ai = a as i128;
        let h = ai * h_prev1 + h_prev2;
        let k = ai * k_prev1 + k_prev2;
        if k > q_max as i128 {
            break;
        }
        if k > 0 {
            let p = match i64::try_from(h) {
                Ok(p) => p,
                Err(_) => break,
            };
            out.push((p, k as u64));
        }
        h_prev2 = h_prev1;
        h_prev1 = h;
        k_prev2 = k_prev1;
        k_prev1 = k;
        let frac = value - a;
        if frac.abs() < 1e-15 {
            break; // expansion terminated: x is (numerically) rational
        }
        value = 1.0 / frac;
    }
    out
}

/// Largest-denominator continued-fraction convergent p/q of x with
/// q <= q_max that satisfies the Hurwitz inequality |x - p/q| < 1/(sqrt 5 q^2).
///
/// Rational x returns itself once the expansion terminates. If no convergent
/// within the cap satisfies the inequality (possible only for very small
/// q_max), the deepest convergent is returned instead.
pub fn diophantine_approx(x: f64, q_max: u64) -> Result<(i64, u64), KerrError> {
    if q_max == 0 {
        return Err(KerrError::ZeroQMax);
    }
    let all = convergents(x, q_max);
    all.iter()
        .rev()
        .find(|&&(p, q)| satisfies_hurwitz(x, p, q))
        .or_else(|| all.last())
        .copied()
        .ok_or(KerrError::Unrepresentable(x))
}

/// Apply the exact diagonal Kerr phase to a Fock state: each amplitude is
/// multiplied by e^{i pi x n^2} (self) or e^{i 2 pi x n_1 n_2} (cross).
pub fn apply_kerr_diagonal(
    state: &FockState,
    x: f64,
    kind: KerrKind,
    target_modes: &[usize],
) -> Result<FockState, KerrError> {
    for &mode in target_modes {
        if mode >= state.modes() {
            return Err(KerrError::ModeOutOfRange(mode, state.modes()));
        }
    }
    let phase = |idx: &MultiIndex| -> Complex64 {
        let occ = idx.occupations();
        match kind {
            KerrKind::SelfKerr => {
                let n = occ[target_modes[0]] as f64;
                Complex64::from_polar(1.0, PI * x * n * n)
            }
            KerrKind::CrossKerr => {
                let n1 = occ[target_modes[0]] as f64;
                let n2 = occ[target_modes[1]] as f64;
                Complex64::from_polar(1.0, 2.0 * PI * x * n1 * n2)
            }
        }
    };
    Ok(state.apply_diagonal_phase(phase))
}
