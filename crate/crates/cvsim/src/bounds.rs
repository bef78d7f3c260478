//! Closed-form cutoffs, growth factors, exponential-energy certificates,
//! error budgets, and sample counts for bosonic circuits.
//!
//! Every function here is a pure formula over its inputs. Inadmissible inputs
//! are rejected with the violated condition named, never answered with
//! NaN or infinity from a division by zero.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("base must satisfy s > 1, got {0}")]
    BaseNotAboveOne(f64),
    #[error("precision must lie in (0, 1], got {0}")]
    PrecisionOutOfRange(f64),
    #[error("confidence parameter must lie in (0, 1), got {0}")]
    ConfidenceOutOfRange(f64),
    #[error("energy proxy must be nonnegative, got {0}")]
    NegativeEnergy(f64),
    #[error("squeezing admissibility violated: {0}")]
    SqueezingInadmissible(String),
    #[error("displacement growth requires 1 < t < s, got t = {t}, s = {s}")]
    DisplacementInadmissible { t: f64, s: f64 },
    #[error("envelope invalid: {0}")]
    InvalidEnvelope(String),
}

/// Worst-case per-layer gate parameters of a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitEnvelope {
    /// Number of modes, m >= 1.
    pub modes: u32,
    /// Number of layers, L >= 1.
    pub layers: u32,
    /// Largest displacement magnitude over all layers and modes.
    pub alpha_max: f64,
    /// Largest squeezing parameter over all layers and modes.
    pub r_max: f64,
}

impl CircuitEnvelope {
    pub fn new(modes: u32, layers: u32, alpha_max: f64, r_max: f64) -> Result<Self, BoundsError> {
        if modes < 1 {
            return Err(BoundsError::InvalidEnvelope("modes must be >= 1".into()));
        }
        if layers < 1 {
            return Err(BoundsError::InvalidEnvelope("layers must be >= 1".into()));
        }
        if !(alpha_max >= 0.0) {
            return Err(BoundsError::InvalidEnvelope(format!(
                "alpha_max must be >= 0, got {alpha_max}"
            )));
        }
        if !(r_max >= 0.0) {
            return Err(BoundsError::InvalidEnvelope(format!("r_max must be >= 0, got {r_max}")));
        }
        Ok(CircuitEnvelope { modes, layers, alpha_max, r_max })
    }
}

/// Certificate that a state satisfies `<t^N> <= bound <= t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpEnergyCertificate {
    /// Base t > 1 of the exponential-energy operator.
    pub base: f64,
    /// Exponent proxy E with bound <= t^E.
    pub exponent: f64,
    /// Direct value of the bound on `<t^N>`.
    pub bound: f64,
}

/// Boson number cutoff from a plain energy bound: ceil(E / eps^2).
pub fn energy_cutoff(energy: f64, eps: f64) -> Result<u64, BoundsError> {
    if energy < 0.0 {
        return Err(BoundsError::NegativeEnergy(energy));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(BoundsError::PrecisionOutOfRange(eps));
    }
    Ok((energy / (eps * eps)).ceil() as u64)
}

/// Boson number cutoff from an exponential-energy bound:
/// ceil(E + 2 log_s(1/eps)).
pub fn exp_energy_cutoff(energy: f64, s: f64, eps: f64) -> Result<u64, BoundsError> {
    if s <= 1.0 {
        return Err(BoundsError::BaseNotAboveOne(s));
    }
    if energy < 0.0 {
        return Err(BoundsError::NegativeEnergy(energy));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(BoundsError::PrecisionOutOfRange(eps));
    }
    Ok((energy + 2.0 * (1.0 / eps).ln() / s.ln()).ceil() as u64)
}

/// Trace-distance bound for truncating an `S_{s,E}` state at cutoff k:
/// min(1, sqrt(s^{E-k})).
pub fn truncation_error_bound(s: f64, energy: f64, k: u32) -> Result<f64, BoundsError> {
    if s <= 1.0 {
        return Err(BoundsError::BaseNotAboveOne(s));
    }
    Ok((0.5 * (energy - k as f64) * s.ln()).exp().min(1.0))
}

/// The full base schedule t_0 .. t_L:
/// t_0 = 1 + 2/e^{2r}, t_i = 1 + (t_{i-1} - 1)/(e^{2r} + t_{i-1}).
///
/// The returned sequence is strictly decreasing with every element > 1.
pub fn t_schedule(r: f64, layers: u32) -> Vec<f64> {
    let e2r = (2.0 * r).exp();
    let mut ts = Vec::with_capacity(layers as usize + 1);
    let mut t = 1.0 + 2.0 / e2r;
    ts.push(t);
    for _ in 0..layers {
        t = 1.0 + (t - 1.0) / (e2r + t);
        ts.push(t);
    }
    ts
}

/// Exponential-energy certificate for the output of a circuit with the given
/// envelope: base t_L from the schedule, bound e^{mL^2(|a|^2 + 28r + 9)}, and
/// exponent proxy mL^2 e^{2(2r+1)L} (|a|^2 + 28r + 9).
pub fn circuit_exp_energy_bound(env: &CircuitEnvelope) -> ExpEnergyCertificate {
    let m = env.modes as f64;
    let l = env.layers as f64;
    let a2 = env.alpha_max * env.alpha_max;
    let r = env.r_max;
    let base = *t_schedule(r, env.layers).last().expect("schedule is nonempty");
    let core = a2 + 28.0 * r + 9.0;
    let bound = (m * l * l * core).exp();
    let exponent = m * l * l * (2.0 * (2.0 * r + 1.0) * l).exp() * core;
    ExpEnergyCertificate { base, exponent, bound }
}

/// Admissibility threshold f(r, s) = 1 + (s-1)/(e^{2r} + sinh(r) e^r (s-1)).
pub fn squeezing_admissible_t(r: f64, s: f64) -> f64 {
    1.0 + (s - 1.0) / ((2.0 * r).exp() + r.sinh() * r.exp() * (s - 1.0))
}

/// Per-mode growth factor of `<t^N>` under squeezing by r, given an input
/// certificate in base s. Admissible for 1 < t < f(r, s) and s < 1/tanh(r).
pub fn squeezing_growth(r: f64, s: f64, t: f64) -> Result<f64, BoundsError> {
    if r < 0.0 {
        return Err(BoundsError::SqueezingInadmissible(format!("r must be >= 0, got {r}")));
    }
    if s <= 1.0 {
        return Err(BoundsError::BaseNotAboveOne(s));
    }
    // s < 1/tanh(r); at r = 0 the threshold is infinite and s is unconstrained
    if r > 0.0 {
        let s_limit = 1.0 / r.tanh();
        if s >= s_limit {
            return Err(BoundsError::SqueezingInadmissible(format!(
                "s = {s} >= 1/tanh(r) = {s_limit}"
            )));
        }
    }
    let f = squeezing_admissible_t(r, s);
    if !(t > 1.0) {
        return Err(BoundsError::SqueezingInadmissible(format!("t = {t} <= 1")));
    }
    if t >= f {
        return Err(BoundsError::SqueezingInadmissible(format!(
            "t = {t} >= f(r, s) = {f}"
        )));
    }
    let sr = r.sinh();
    let e2r = (2.0 * r).exp();
    let er = r.exp();
    let numerator = e2r + sr * er * (s - 1.0);
    let denominator = (-2.0 * r).exp() - sr * (-r).exp() * (s - 1.0);
    let tail = (s - 1.0) - (t - 1.0) * numerator;
    Ok(s * (numerator / denominator).sqrt() / tail)
}

/// Multiplicative growth of `<t^N>` under an m-mode displacement with
/// per-mode magnitude at most alpha_max; requires 1 < t < s.
pub fn displacement_growth(s: f64, t: f64, alpha_max: f64, modes: u32) -> Result<f64, BoundsError> {
    if !(t > 1.0 && t < s) {
        return Err(BoundsError::DisplacementInadmissible { t, s });
    }
    let m = modes as f64;
    let a2 = alpha_max * alpha_max;
    Ok((s / (s - t)).powf(m) * (m * a2 * (s - 1.0) * (t - 1.0) / (s - t)).exp())
}

/// Upper bound on the mean boson number of a circuit output:
/// m (A^L - 1)(1 + |a|^2/(A - 1)) with A = e^{2r} + 4 |a| e^r.
///
/// Returns 0 when A = 1 exactly (vacuum stays vacuum under passives).
pub fn energy_bound(env: &CircuitEnvelope) -> f64 {
    let m = env.modes as f64;
    let l = env.layers;
    let a = (2.0 * env.r_max).exp() + 4.0 * env.alpha_max * env.r_max.exp();
    if a == 1.0 {
        return 0.0;
    }
    let al = a.powi(l as i32);
    m * (al - 1.0) * (1.0 + env.alpha_max * env.alpha_max / (a - 1.0))
}

/// Sample count sufficient to learn an m-mode state in `S_{s,mE}` to trace
/// distance eps with confidence 1 - delta:
/// 2^21/eps^2 (1 + E + 2 log_s(2/eps)/m)^m ln(4/delta) + 24 ln(2/delta).
pub fn learning_sample_count(
    modes: u32,
    energy: f64,
    s: f64,
    eps: f64,
    delta: f64,
) -> Result<f64, BoundsError> {
    if s <= 1.0 {
        return Err(BoundsError::BaseNotAboveOne(s));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BoundsError::PrecisionOutOfRange(eps));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundsError::ConfidenceOutOfRange(delta));
    }
    let m = modes as f64;
    let d_eff = (1.0 + energy + 2.0 * (2.0 / eps).ln() / s.ln() / m).powf(m);
    Ok(2f64.powi(21) / (eps * eps) * d_eff * (4.0 / delta).ln() + 24.0 * (2.0 / delta).ln())
}

/// Trace-distance bound for replacing a self-Kerr phase e^{i eps N^2} by the
/// identity on an `S_{s,E}` state, at the optimized cutoff k = log_s(s^E/eps^2):
/// 2 eps + (eps/sqrt 2)(E + log_s(1/eps^2))^2.
pub fn kerr_neglect_error_bound(s: f64, energy: f64, eps: f64) -> Result<f64, BoundsError> {
    if s <= 1.0 {
        return Err(BoundsError::BaseNotAboveOne(s));
    }
    if !(eps > 0.0) {
        return Err(BoundsError::PrecisionOutOfRange(eps));
    }
    let k = energy + (1.0 / (eps * eps)).ln() / s.ln();
    Ok(2.0 * eps + eps / 2f64.sqrt() * k * k)
}
