//! Pure Gaussian states in Bargmann form and their exact calculus.
//!
//! A state is the triple (A, b, c) with Bargmann amplitude
//! F(xi) = exp(xi' A xi / 2 + b' xi + c), equivalently
//! |G> = exp(a' A a'/2 + b a' + c)|0> in terms of creation operators.
//! Gate updates, overlaps, and heterodyne projections are all closed-form;
//! the scalar c carries normalization and global phase, which matters because
//! the superposition backend adds amplitudes across branches.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::fock::{FockState, MultiIndex};

use super::{ElementaryGate, GaussianError, GaussianUnitary};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPureState {
    matrix: DMatrix<Complex64>,
    linear: DVector<Complex64>,
    scalar: Complex64,
}

impl GaussianPureState {
    /// The m-mode vacuum: A = 0, b = 0, c = 0.
    pub fn vacuum(modes: usize) -> Self {
        GaussianPureState {
            matrix: DMatrix::zeros(modes, modes),
            linear: DVector::zeros(modes),
            scalar: ZERO,
        }
    }

    /// Build from explicit parameters; A must be symmetric with spectral
    /// norm below one, else the state is not normalizable.
    pub fn from_parts(
        matrix: DMatrix<Complex64>,
        linear: DVector<Complex64>,
        scalar: Complex64,
    ) -> Result<Self, GaussianError> {
        let m = matrix.nrows();
        if matrix.ncols() != m {
            return Err(GaussianError::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if linear.len() != m {
            return Err(GaussianError::DimensionMismatch(format!(
                "linear part has length {}, expected {m}",
                linear.len()
            )));
        }
        let mut dev: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                dev = dev.max((matrix[(i, j)] - matrix[(j, i)]).norm());
            }
        }
        if dev > 1e-10 {
            return Err(GaussianError::NotSymmetric(dev));
        }
        let norm = spectral_norm(&matrix);
        if norm >= 1.0 {
            return Err(GaussianError::NotNormalizable(format!(
                "spectral norm of A is {norm:.6} >= 1"
            )));
        }
        Ok(GaussianPureState { matrix, linear, scalar })
    }

    pub fn modes(&self) -> usize {
        self.linear.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn linear(&self) -> &DVector<Complex64> {
        &self.linear
    }

    pub fn scalar(&self) -> Complex64 {
        self.scalar
    }

    /// <G|G>, real part of the self-overlap.
    pub fn norm_sqr(&self) -> Result<f64, GaussianError> {
        Ok(gaussian_overlap(self, self)?.re)
    }

    /// Exact update under one elementary gate, global phase included.
    pub fn evolve(&self, gate: &ElementaryGate) -> Result<Self, GaussianError> {
        gate.validate(self.modes())?;
        let mut out = self.clone();
        match gate {
            ElementaryGate::PhaseShifter { mode, theta } => {
                out.phase_shift(*mode, *theta);
            }
            ElementaryGate::BeamSplitter { mode_a, mode_b, theta, phi } => {
                let mut m = DMatrix::identity(self.modes(), self.modes());
                let (c, s) = (theta.cos(), theta.sin());
                m[(*mode_a, *mode_a)] = Complex64::new(c, 0.0);
                m[(*mode_a, *mode_b)] = -Complex64::from_polar(s, *phi);
                m[(*mode_b, *mode_a)] = Complex64::from_polar(s, -*phi);
                m[(*mode_b, *mode_b)] = Complex64::new(c, 0.0);
                out.passive(&m);
            }
            ElementaryGate::Squeeze { mode, r } => {
                out.squeeze(*mode, *r)?;
            }
            ElementaryGate::Displace { mode, alpha } => {
                out.displace(*mode, *alpha);
            }
        }
        Ok(out)
    }

    /// Exact update under a passive unitary with single-photon matrix `u`:
    /// A -> U A U^T, b -> U b.
    pub fn evolve_passive(&self, u: &DMatrix<Complex64>) -> Result<Self, GaussianError> {
        super::check_unitary(u)?;
        if u.nrows() != self.modes() {
            return Err(GaussianError::DimensionMismatch(format!(
                "passive matrix is {}x{}, state has {} modes",
                u.nrows(),
                u.ncols(),
                self.modes()
            )));
        }
        let mut out = self.clone();
        out.passive(u);
        Ok(out)
    }

    /// Exact update under a full Bloch-Messiah Gaussian unitary.
    pub fn evolve_unitary(&self, gate: &GaussianUnitary) -> Result<Self, GaussianError> {
        if gate.modes() != self.modes() {
            return Err(GaussianError::DimensionMismatch(format!(
                "gate has {} modes, state has {}",
                gate.modes(),
                self.modes()
            )));
        }
        let mut out = self.evolve_passive(gate.passive_in())?;
        for (mode, &r) in gate.squeezing().iter().enumerate() {
            if r != 0.0 {
                out.squeeze(mode, r)?;
            }
        }
        for (mode, &alpha) in gate.displacement().iter().enumerate() {
            if alpha != ZERO {
                out.displace(mode, alpha);
            }
        }
        out.evolve_passive(gate.passive_out())
    }

    fn phase_shift(&mut self, mode: usize, theta: f64) {
        let phase = Complex64::from_polar(1.0, theta);
        for l in 0..self.modes() {
            self.matrix[(mode, l)] *= phase;
            if l != mode {
                self.matrix[(l, mode)] *= phase;
            }
        }
        self.matrix[(mode, mode)] *= phase; // diagonal picks up e^{2 i theta} total
        self.linear[mode] *= phase;
    }

    fn passive(&mut self, u: &DMatrix<Complex64>) {
        self.matrix = u * &self.matrix * u.transpose();
        self.linear = u * &self.linear;
    }

    fn displace(&mut self, mode: usize, alpha: Complex64) {
        let ac = alpha.conj();
        let col = self.matrix.column(mode).clone_owned();
        let b_mode = self.linear[mode];
        self.scalar += 0.5 * ac * ac * self.matrix[(mode, mode)] - ac * b_mode
            - 0.5 * alpha.norm_sqr();
        self.linear -= col * ac;
        self.linear[mode] += alpha;
    }

    fn squeeze(&mut self, mode: usize, r: f64) -> Result<(), GaussianError> {
        if r == 0.0 {
            return Ok(());
        }
        let m = self.modes();
        let lam = Complex64::new(r.tanh(), 0.0);
        let a_jj = self.matrix[(mode, mode)];
        let denom = Complex64::new(1.0, 0.0) - lam * a_jj;
        if denom.norm() < 1e-14 {
            return Err(GaussianError::NotNormalizable(
                "squeeze update hit a singular normalization factor".into(),
            ));
        }
        let mu = Complex64::new(1.0, 0.0) / denom;
        // stage 1: exp(lam a^2 / 2), the lowering half of the squeezer
        let row: Vec<Complex64> = (0..m).map(|l| self.matrix[(mode, l)]).collect();
        let b_j = self.linear[mode];
        for l in 0..m {
            for lp in 0..m {
                if l != mode && lp != mode {
                    self.matrix[(l, lp)] += lam * mu * row[l] * row[lp];
                }
            }
        }
        for l in 0..m {
            if l != mode {
                self.matrix[(mode, l)] = row[l] * mu;
                self.matrix[(l, mode)] = row[l] * mu;
                self.linear[l] += lam * mu * b_j * row[l];
            }
        }
        self.matrix[(mode, mode)] = a_jj * mu;
        self.linear[mode] = b_j * mu;
        self.scalar += 0.5 * lam * mu * b_j * b_j - 0.5 * denom.ln();
        // stage 2: cosh^{-(N + 1/2)}
        let x = Complex64::new(1.0 / r.cosh(), 0.0);
        for l in 0..m {
            self.matrix[(mode, l)] *= x;
            if l != mode {
                self.matrix[(l, mode)] *= x;
            }
        }
        self.matrix[(mode, mode)] *= x;
        self.linear[mode] *= x;
        self.scalar += 0.5 * x.ln();
        // stage 3: exp(-lam a'^2 / 2)
        self.matrix[(mode, mode)] -= lam;
        Ok(())
    }

    /// Project the first `k` modes onto the coherent state |alpha>, leaving a
    /// Gaussian state on the remaining modes scaled by the projection amplitude.
    pub(crate) fn project_coherent(&self, alphas: &[Complex64]) -> GaussianPureState {
        let k = alphas.len();
        let m = self.modes();
        let rest = m - k;
        let conj: DVector<Complex64> = DVector::from_iterator(k, alphas.iter().map(|a| a.conj()));
        let a11 = self.matrix.view((0, 0), (k, k));
        let a21 = self.matrix.view((k, 0), (rest, k));
        let a22 = self.matrix.view((k, k), (rest, rest)).clone_owned();
        let b1 = self.linear.rows(0, k);
        let b2 = self.linear.rows(k, rest).clone_owned();
        let alpha_norm: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
        let scalar = self.scalar + 0.5 * (conj.transpose() * a11 * &conj)[(0, 0)]
            + (b1.transpose() * &conj)[(0, 0)]
            - 0.5 * alpha_norm;
        GaussianPureState {
            matrix: a22,
            linear: a21 * conj + b2,
            scalar,
        }
    }
}

/// Largest singular value, used only for normalizability checks.
fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    let m = a.nrows();
    if m == 0 {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let mut v = DVector::from_element(m, Complex64::new(1.0, 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    let mut lambda = 0.0;
    for _ in 0..200 {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w / Complex64::new(norm, 0.0);
    }
    lambda.sqrt()
}

/// ln det(I - X) through the principal branch, valid for spectral radius of
/// X below one. This is the branch that squares back to the determinant and
/// is continuous in X, which keeps overlap phases consistent.
fn ln_det_i_minus(x: &DMatrix<Complex64>) -> Result<Complex64, GaussianError> {
    let n = x.nrows();
    if n == 0 {
        return Ok(ZERO);
    }
    let mut power = x.clone();
    let mut acc = ZERO;
    let mut prev_norm = f64::INFINITY;
    for k in 1..=20_000u32 {
        let trace: Complex64 = (0..n).map(|i| power[(i, i)]).sum();
        acc -= trace / k as f64;
        let norm = power.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if norm * n as f64 <= 1e-18 {
            return Ok(acc);
        }
        if k > 64 && norm >= prev_norm && norm > 1.0 {
            break;
        }
        prev_norm = norm;
        power = &power * x;
    }
    Err(GaussianError::NotNormalizable(
        "overlap series did not converge; spectral radius too close to one".into(),
    ))
}

/// <a|b> with global phases, via the closed-form Gaussian integral.
pub fn gaussian_overlap(
    a: &GaussianPureState,
    b: &GaussianPureState,
) -> Result<Complex64, GaussianError> {
    if a.modes() != b.modes() {
        return Err(GaussianError::DimensionMismatch(format!(
            "overlap of {}-mode and {}-mode states",
            a.modes(),
            b.modes()
        )));
    }
    let m = a.modes();
    let c_total = b.scalar + a.scalar.conj();
    if m == 0 {
        return Ok(c_total.exp());
    }
    let bra_mat = a.matrix.conjugate();
    let bra_lin = a.linear.conjugate();
    let x = &bra_mat * &b.matrix;
    let ln_det = ln_det_i_minus(&x)?;
    let identity = DMatrix::<Complex64>::identity(m, m);
    let lhs = &identity - &x;
    let rhs = &bra_lin + &bra_mat * &b.linear;
    let y = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| GaussianError::NotNormalizable("singular overlap system".into()))?;
    let quad = (b.linear.transpose() * &y)[(0, 0)]
        + (bra_lin.transpose() * (&b.matrix * &y))[(0, 0)]
        + (bra_lin.transpose() * &b.linear)[(0, 0)];
    Ok((c_total - 0.5 * ln_det + 0.5 * quad).exp())
}

/// <b| (|alpha><alpha|_{1..k} x I) |a>: project the first k modes of both
/// states onto |alpha> and take the overlap of the reduced states.
pub fn partial_heterodyne_overlap(
    a: &GaussianPureState,
    b: &GaussianPureState,
    alphas: &[Complex64],
) -> Result<Complex64, GaussianError> {
    if a.modes() != b.modes() {
        return Err(GaussianError::DimensionMismatch(format!(
            "states have {} and {} modes",
            a.modes(),
            b.modes()
        )));
    }
    if alphas.len() > a.modes() {
        return Err(GaussianError::DimensionMismatch(format!(
            "{} heterodyne outcomes for {} modes",
            alphas.len(),
            a.modes()
        )));
    }
    let reduced_a = a.project_coherent(alphas);
    let reduced_b = b.project_coherent(alphas);
    gaussian_overlap(&reduced_b, &reduced_a)
}

/// <alpha|G> for a full-mode coherent projection.
pub fn heterodyne_amplitude(state: &GaussianPureState, alphas: &[Complex64]) -> Complex64 {
    debug_assert_eq!(alphas.len(), state.modes());
    state.project_coherent(alphas).scalar.exp()
}

/// Fock expansion of a Gaussian state up to the cutoff, computed by the
/// two-term recurrence the Bargmann parameters generate. The result is not
/// renormalized; its missing weight is exactly the state's tail.
pub fn fock_amplitudes_of_gaussian(state: &GaussianPureState, cutoff: u32) -> FockState {
    assert!(cutoff as usize <= 170, "cutoff beyond the supported factorial range");
    let m = state.modes();
    let mut monomial: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    monomial.insert(MultiIndex::new(vec![0; m]), state.scalar.exp());
    let mut frontier: Vec<MultiIndex> = vec![MultiIndex::new(vec![0; m])];
    for _total in 0..cutoff {
        let mut next: Vec<MultiIndex> = Vec::new();
        for idx in &frontier {
            for j in 0..m {
                let target = idx.with_mode(j, idx.occupations()[j] + 1);
                if monomial.contains_key(&target) {
                    continue;
                }
                // recurrence: (k_j + 1) f_{k + e_j} = b_j f_k + sum_l A_{jl} f_{k - e_l}
                let tj = target.occupations()[j];
                let mut val = state.linear[j] * monomial[idx];
                for l in 0..m {
                    if target.occupations()[l] == 0 || (l == j && tj < 2) {
                        continue;
                    }
                    let mut lower = target.clone();
                    lower = lower.with_mode(j, tj - 1);
                    let ll = lower.occupations()[l];
                    lower = lower.with_mode(l, ll - 1);
                    if let Some(f) = monomial.get(&lower) {
                        val += state.matrix[(j, l)] * f;
                    }
                }
                val /= Complex64::new(tj as f64, 0.0);
                monomial.insert(target.clone(), val);
                next.push(target);
            }
        }
        frontier = next;
    }
    let amps = monomial.into_iter().filter_map(|(idx, f)| {
        let fct: f64 = idx
            .occupations()
            .iter()
            .map(|&n| super::fock_apply::fact(n))
            .product();
        let amp = f * fct.sqrt();
        if amp.norm_sqr() > 0.0 {
            Some((idx, amp))
        } else {
            None
        }
    });
    FockState::from_amplitudes(m, cutoff, amps).expect("recurrence stays within the cutoff")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_norm_is_one() {
        let v = GaussianPureState::vacuum(2);
        assert_relative_eq!(v.norm_sqr().unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn displaced_vacuum_matches_coherent() {
        let alpha = c(0.6, -0.3);
        let state = GaussianPureState::vacuum(1)
            .evolve(&ElementaryGate::Displace { mode: 0, alpha })
            .unwrap();
        assert_relative_eq!(state.norm_sqr().unwrap(), 1.0, epsilon = 1e-12);
        let fock = fock_amplitudes_of_gaussian(&state, 25);
        let oracle = FockState::coherent(alpha, 25);
        for (idx, a) in oracle.amplitudes() {
            assert!((fock.amplitude(idx) - a).norm() < 1e-10, "{idx:?}");
        }
    }

    #[test]
    fn phase_shift_keeps_vacuum() {
        let v = GaussianPureState::vacuum(1);
        let out = v.evolve(&ElementaryGate::PhaseShifter { mode: 0, theta: 1.3 }).unwrap();
        assert_eq!(out.matrix()[(0, 0)], ZERO);
        assert_eq!(out.linear()[0], ZERO);
        assert_eq!(out.scalar(), ZERO);
    }

    #[test]
    fn squeezed_vacuum_matches_closed_form() {
        let r = 0.4f64;
        let state = GaussianPureState::vacuum(1)
            .evolve(&ElementaryGate::Squeeze { mode: 0, r })
            .unwrap();
        assert_relative_eq!(state.norm_sqr().unwrap(), 1.0, epsilon = 1e-12);
        let fock = fock_amplitudes_of_gaussian(&state, 24);
        let t = r.tanh();
        let norm0 = 1.0 / r.cosh().sqrt();
        for n in 0..=12u32 {
            let expected = if n % 2 == 0 {
                let half = (n / 2) as i32;
                let f2n: f64 = (1..=n as u64).map(|k| k as f64).product();
                let fh: f64 = (1..=(n / 2) as u64).map(|k| k as f64).product();
                norm0 * (-t / 2.0).powi(half) * f2n.sqrt() / fh
            } else {
                0.0
            };
            let got = fock.amplitude(&MultiIndex::new(vec![n]));
            assert!(
                (got - c(expected, 0.0)).norm() < 1e-8,
                "n={n}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn overlap_examples() {
        let v = GaussianPureState::vacuum(1);
        let alpha = c(0.8, 0.5);
        let coh = v.evolve(&ElementaryGate::Displace { mode: 0, alpha }).unwrap();
        let ov = gaussian_overlap(&v, &coh).unwrap();
        assert_relative_eq!(ov.re, (-0.5 * alpha.norm_sqr()).exp(), epsilon = 1e-12);
        assert!(ov.im.abs() < 1e-14);
        assert_relative_eq!(gaussian_overlap(&coh, &coh).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn overlap_conjugate_symmetry_and_bound() {
        let a = GaussianPureState::vacuum(2)
            .evolve(&ElementaryGate::Squeeze { mode: 0, r: 0.5 })
            .unwrap()
            .evolve(&ElementaryGate::Displace { mode: 1, alpha: c(0.4, 0.1) })
            .unwrap()
            .evolve(&ElementaryGate::BeamSplitter {
                mode_a: 0,
                mode_b: 1,
                theta: 0.7,
                phi: 0.3,
            })
            .unwrap();
        let b = GaussianPureState::vacuum(2)
            .evolve(&ElementaryGate::Displace { mode: 0, alpha: c(-0.2, 0.6) })
            .unwrap()
            .evolve(&ElementaryGate::Squeeze { mode: 1, r: 0.3 })
            .unwrap();
        let ab = gaussian_overlap(&a, &b).unwrap();
        let ba = gaussian_overlap(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
        assert!(ab.norm() <= 1.0 + 1e-8);
    }

    #[test]
    fn overlap_matches_fock_expansion() {
        let a = GaussianPureState::vacuum(1)
            .evolve(&ElementaryGate::Squeeze { mode: 0, r: 0.6 })
            .unwrap()
            .evolve(&ElementaryGate::Displace { mode: 0, alpha: c(0.5, -0.2) })
            .unwrap();
        let b = GaussianPureState::vacuum(1)
            .evolve(&ElementaryGate::Displace { mode: 0, alpha: c(0.1, 0.4) })
            .unwrap()
            .evolve(&ElementaryGate::Squeeze { mode: 0, r: 0.2 })
            .unwrap();
        let exact = gaussian_overlap(&a, &b).unwrap();
        let fa = fock_amplitudes_of_gaussian(&a, 40);
        let fb = fock_amplitudes_of_gaussian(&b, 40);
        let via_fock = fa.overlap(&fb).unwrap();
        assert!(
            (exact - via_fock).norm() < 1e-8,
            "exact {exact} vs fock {via_fock}"
        );
    }

    #[test]
    fn entangled_two_mode_overlap_matches_fock_expansion() {
        // the determinant branch has to stay on the principal sheet even when
        // the product conj(A_a) A_b is a full complex 2x2 matrix
        let build = |r0: f64, r1: f64, theta: f64, alpha: Complex64| {
            GaussianPureState::vacuum(2)
                .evolve(&ElementaryGate::Squeeze { mode: 0, r: r0 })
                .unwrap()
                .evolve(&ElementaryGate::Squeeze { mode: 1, r: r1 })
                .unwrap()
                .evolve(&ElementaryGate::BeamSplitter {
                    mode_a: 0,
                    mode_b: 1,
                    theta,
                    phi: 0.7,
                })
                .unwrap()
                .evolve(&ElementaryGate::Displace { mode: 0, alpha })
                .unwrap()
                .evolve(&ElementaryGate::PhaseShifter { mode: 1, theta: 1.1 })
                .unwrap()
        };
        let a = build(0.7, 0.2, 0.5, c(0.4, -0.3));
        let b = build(0.3, 0.6, 1.1, c(-0.2, 0.5));
        assert!((a.norm_sqr().unwrap() - 1.0).abs() < 1e-10);
        let exact = gaussian_overlap(&a, &b).unwrap();
        let fa = fock_amplitudes_of_gaussian(&a, 36);
        let fb = fock_amplitudes_of_gaussian(&b, 36);
        let via_fock = fa.overlap(&fb).unwrap();
        assert!(
            (exact - via_fock).norm() < 1e-7,
            "exact {exact} vs fock {via_fock}"
        );
    }

    #[test]
    fn partial_heterodyne_examples() {
        let v1 = GaussianPureState::vacuum(1);
        // k = m = 1, vacuum: <0| a<a |0> = e^{-|a|^2}
        let alpha = c(0.9, -0.2);
        let val = partial_heterodyne_overlap(&v1, &v1, &[alpha]).unwrap();
        assert_relative_eq!(val.re, (-alpha.norm_sqr()).exp(), epsilon = 1e-12);
        assert!(val.im.abs() < 1e-14);

        // alpha = 0 on the vacuum leaves probability one
        let one = partial_heterodyne_overlap(&v1, &v1, &[ZERO]).unwrap();
        assert_relative_eq!(one.re, 1.0, epsilon = 1e-14);

        // k = 1, m = 2: modes factorize on the vacuum
        let v2 = GaussianPureState::vacuum(2);
        let val2 = partial_heterodyne_overlap(&v2, &v2, &[alpha]).unwrap();
        assert_relative_eq!(val2.re, (-alpha.norm_sqr()).exp(), epsilon = 1e-12);
    }

    #[test]
    fn heterodyne_amplitude_matches_partial() {
        let state = GaussianPureState::vacuum(1)
            .evolve(&ElementaryGate::Squeeze { mode: 0, r: 0.5 })
            .unwrap()
            .evolve(&ElementaryGate::Displace { mode: 0, alpha: c(0.3, 0.7) })
            .unwrap();
        let alpha = [c(0.2, -0.5)];
        let amp = heterodyne_amplitude(&state, &alpha);
        let density = partial_heterodyne_overlap(&state, &state, &alpha).unwrap();
        assert_relative_eq!(amp.norm_sqr(), density.re, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_unitary_evolution_preserves_norm() {
        use nalgebra::dmatrix;
        let u = dmatrix![
            c(0.6, 0.0), c(0.8, 0.0);
            c(-0.8, 0.0), c(0.6, 0.0)
        ];
        let gate = GaussianUnitary::new(
            u.clone(),
            DVector::from_vec(vec![c(0.5, 0.1), c(-0.3, 0.2)]),
            DVector::from_vec(vec![0.4, 0.1]),
            u.transpose(),
        )
        .unwrap();
        let out = GaussianPureState::vacuum(2).evolve_unitary(&gate).unwrap();
        assert_relative_eq!(out.norm_sqr().unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn from_parts_validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[ZERO, c(0.1, 0.0), c(0.2, 0.0), ZERO]);
        assert!(matches!(
            GaussianPureState::from_parts(asym, DVector::zeros(2), ZERO),
            Err(GaussianError::NotSymmetric(_))
        ));
        let too_big = DMatrix::from_row_slice(1, 1, &[c(1.2, 0.0)]);
        assert!(matches!(
            GaussianPureState::from_parts(too_big, DVector::zeros(1), ZERO),
            Err(GaussianError::NotNormalizable(_))
        ));
    }
}
