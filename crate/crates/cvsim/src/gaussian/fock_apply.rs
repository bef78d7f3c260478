//! Exact Fock-basis kernels for elementary Gaussian gates.
//!
//! Squeezers and displacements are applied through their normal-ordered
//! factorizations. The lowering and scaling stages never leave the retained
//! subspace, so every amplitude with total boson number at most `k_out` is
//! exact; the discarded weight is precisely the norm lost to the cutoff.
//!
//! The raising sums alternate in sign, so on states with broad support they
//! start losing digits once r * n grows large (around r ~ 1 at n ~ 40); the
//! certified envelopes this crate targets stay far below that regime.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::fock::{FockState, MultiIndex};

use super::{ElementaryGate, GaussianError};

const MAX_FACTORIAL: usize = 170;

fn factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_FACTORIAL + 1);
        t.push(1.0);
        for n in 1..=MAX_FACTORIAL {
            let prev = t[n - 1];
            t.push(prev * n as f64);
        }
        t
    })
}

pub(crate) fn fact(n: u32) -> f64 {
    factorials()[n as usize]
}

/// sqrt(n! / m!) for n >= m, or sqrt(m!/n!) inverted by the caller.
fn sqrt_fact_ratio(num: u32, den: u32) -> f64 {
    (fact(num) / fact(den)).sqrt()
}

type AmpMap = BTreeMap<MultiIndex, Complex64>;

/// Apply one elementary gate to a normalized state, truncate the result at
/// `k_out`, renormalize, and report the discarded probability weight.
pub fn apply_elementary(
    state: &FockState,
    gate: &ElementaryGate,
    k_out: u32,
) -> Result<(FockState, f64), GaussianError> {
    gate.validate(state.modes())?;
    if k_out as usize > MAX_FACTORIAL {
        return Err(GaussianError::CutoffTooLarge(k_out));
    }
    if !state.is_normalized() {
        return Err(GaussianError::Fock(crate::fock::FockError::NotNormalized(
            state.norm_sqr(),
        )));
    }
    let out = match gate {
        ElementaryGate::PhaseShifter { mode, theta } => phase_shifter(state, *mode, *theta),
        ElementaryGate::BeamSplitter { mode_a, mode_b, theta, phi } => {
            beamsplitter(state, *mode_a, *mode_b, *theta, *phi)
        }
        ElementaryGate::Squeeze { mode, r } => squeeze(state, *mode, *r, k_out),
        ElementaryGate::Displace { mode, alpha } => displace(state, *mode, *alpha, k_out),
    };
    finish(state.modes(), k_out, out, gate.is_passive())
}

fn finish(
    modes: usize,
    k_out: u32,
    amps: AmpMap,
    passive: bool,
) -> Result<(FockState, f64), GaussianError> {
    let mut kept = AmpMap::new();
    let mut retained = 0.0;
    let mut truncated = false;
    for (idx, a) in amps {
        if idx.total_bosons() <= k_out {
            if a.norm_sqr() > 0.0 {
                retained += a.norm_sqr();
                kept.insert(idx, a);
            }
        } else {
            truncated = true;
        }
    }
    // the input was normalized and the gate is unitary, so whatever norm is
    // missing is exactly the weight beyond the cutoff. A passive gate that
    // never crossed the cutoff is exact and discards zero by construction;
    // squeezers and displacers always leave their tail above the cutoff.
    let discarded =
        if passive && !truncated { 0.0 } else { (1.0 - retained).max(0.0) };
    if kept.is_empty() {
        return Err(GaussianError::Fock(crate::fock::FockError::EmptyTruncation));
    }
    let scale = 1.0 / retained.sqrt();
    for a in kept.values_mut() {
        *a *= scale;
    }
    Ok((FockState::from_map(modes, k_out, true, kept), discarded))
}

fn phase_shifter(state: &FockState, mode: usize, theta: f64) -> AmpMap {
    state
        .map()
        .iter()
        .map(|(idx, a)| {
            let n = idx.occupations()[mode] as f64;
            (idx.clone(), a * Complex64::from_polar(1.0, theta * n))
        })
        .collect()
}

fn beamsplitter(state: &FockState, mode_a: usize, mode_b: usize, theta: f64, phi: f64) -> AmpMap {
    // creation operators transform as a' -> u a' + v b', b' -> w a' + z b'
    let u = Complex64::new(theta.cos(), 0.0);
    let v = Complex64::from_polar(theta.sin(), -phi);
    let w = -Complex64::from_polar(theta.sin(), phi);
    let z = Complex64::new(theta.cos(), 0.0);
    let mut out = AmpMap::new();
    for (idx, amp) in state.map() {
        let na = idx.occupations()[mode_a];
        let nb = idx.occupations()[mode_b];
        let base = amp / (fact(na) * fact(nb)).sqrt();
        for i in 0..=na {
            let bin_a = fact(na) / (fact(i) * fact(na - i));
            let pow_a = u.powu(i) * v.powu(na - i);
            for j in 0..=nb {
                let bin_b = fact(nb) / (fact(j) * fact(nb - j));
                let pow_b = w.powu(j) * z.powu(nb - j);
                let ka = i + j;
                let kb = na + nb - ka;
                let coeff = base * bin_a * bin_b * pow_a * pow_b
                    * (fact(ka) * fact(kb)).sqrt();
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let target = idx.with_mode(mode_a, ka).with_mode(mode_b, kb);
                *out.entry(target).or_insert(Complex64::new(0.0, 0.0)) += coeff;
            }
        }
    }
    out
}

/// Group amplitudes into fibers along one mode: residual index (with the mode
/// zeroed) -> dense vector over that mode's occupation.
fn fibers(state: &FockState, mode: usize) -> BTreeMap<MultiIndex, Vec<Complex64>> {
    let mut groups: BTreeMap<MultiIndex, Vec<Complex64>> = BTreeMap::new();
    for (idx, a) in state.map() {
        let n = idx.occupations()[mode] as usize;
        let residual = idx.with_mode(mode, 0);
        let fiber = groups.entry(residual).or_default();
        if fiber.len() <= n {
            fiber.resize(n + 1, Complex64::new(0.0, 0.0));
        }
        fiber[n] = *a;
    }
    groups
}

fn squeeze(state: &FockState, mode: usize, r: f64, k_out: u32) -> AmpMap {
    if r == 0.0 {
        return state.map().clone();
    }
    // S(r) = exp(-t/2 a'^2) cosh(r)^{-(N + 1/2)} exp(t/2 a^2), t = tanh r
    let t = r.tanh();
    let inv_cosh = 1.0 / r.cosh();
    let mut out = AmpMap::new();
    for (residual, fiber) in fibers(state, mode) {
        let rest = residual.total_bosons();
        if rest > k_out {
            continue;
        }
        let n_in = fiber.len();
        let n_max = (k_out - rest) as usize;
        // lower: w1[n] = sum_k (t/2)^k / k! sqrt((n+2k)!/n!) v[n+2k]
        let mut w1 = vec![Complex64::new(0.0, 0.0); n_in];
        for n in 0..n_in {
            let mut term = 1.0;
            let mut k = 0usize;
            loop {
                let src = n + 2 * k;
                if src >= n_in {
                    break;
                }
                w1[n] += term * sqrt_fact_ratio(src as u32, n as u32) * fiber[src];
                k += 1;
                term *= t / 2.0 / k as f64;
            }
        }
        // scale: w2[n] = w1[n] cosh^{-(n + 1/2)}
        let mut w2 = w1;
        let mut scale = inv_cosh.sqrt();
        for w in w2.iter_mut() {
            *w *= scale;
            scale *= inv_cosh;
        }
        // raise: w3[n] = sum_k (-t/2)^k / k! sqrt(n!/(n-2k)!) w2[n-2k]
        for n in 0..=n_max {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut term = 1.0;
            let mut k = 0usize;
            loop {
                if n < 2 * k {
                    break;
                }
                let src = n - 2 * k;
                if src < w2.len() {
                    acc += term * sqrt_fact_ratio(n as u32, src as u32) * w2[src];
                }
                k += 1;
                term *= -t / 2.0 / k as f64;
            }
            if acc.norm_sqr() > 0.0 {
                out.insert(residual.with_mode(mode, n as u32), acc);
            }
        }
    }
    out
}

fn displace(state: &FockState, mode: usize, alpha: Complex64, k_out: u32) -> AmpMap {
    if alpha.norm_sqr() == 0.0 {
        return state.map().clone();
    }
    // D(alpha) = e^{-|alpha|^2/2} exp(alpha a') exp(-conj(alpha) a)
    let gauss = (-0.5 * alpha.norm_sqr()).exp();
    let mut out = AmpMap::new();
    for (residual, fiber) in fibers(state, mode) {
        let rest = residual.total_bosons();
        if rest > k_out {
            continue;
        }
        let n_in = fiber.len();
        let n_max = (k_out - rest) as usize;
        // lower: w1[n] = sum_k (-conj(alpha))^k / k! sqrt((n+k)!/n!) v[n+k]
        let mut w1 = vec![Complex64::new(0.0, 0.0); n_in];
        for n in 0..n_in {
            let mut term = Complex64::new(1.0, 0.0);
            let mut k = 0usize;
            loop {
                let src = n + k;
                if src >= n_in {
                    break;
                }
                w1[n] += term * sqrt_fact_ratio(src as u32, n as u32) * fiber[src];
                k += 1;
                term *= -alpha.conj() / k as f64;
            }
        }
        for w in w1.iter_mut() {
            *w *= gauss;
        }
        // raise: w3[n] = sum_k alpha^k / k! sqrt(n!/(n-k)!) w1[n-k]
        for n in 0..=n_max {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut term = Complex64::new(1.0, 0.0);
            for k in 0..=n {
                let src = n - k;
                if src < w1.len() {
                    acc += term * sqrt_fact_ratio(n as u32, src as u32) * w1[src];
                }
                term *= alpha / (k + 1) as f64;
            }
            if acc.norm_sqr() > 0.0 {
                out.insert(residual.with_mode(mode, n as u32), acc);
            }
        }
    }
    out
}
