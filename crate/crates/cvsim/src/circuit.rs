//! Circuit intermediate representation: ordered layers of one diagonal
//! non-Gaussian gate followed by one Gaussian gate, acting on vacuum.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::bounds::{CircuitEnvelope, ExpEnergyCertificate};
use crate::fock::MultiIndex;
use crate::gaussian::GaussianUnitary;
use crate::kerr::{KerrKind, RationalKerr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("layer {layer}: mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { layer: usize, mode: usize, modes: usize },
    #[error("layer {layer}: gaussian gate has {gate_modes} modes, circuit has {modes}")]
    GateArityMismatch { layer: usize, gate_modes: usize, modes: usize },
    #[error("circuit must have at least one layer")]
    Empty,
    #[error("circuit must have at least one mode")]
    NoModes,
    #[error("layer {layer}: {kind} Kerr gate needs {expected} target mode(s), got {got}")]
    KerrArity { layer: usize, kind: &'static str, expected: usize, got: usize },
}

/// The energy-preserving non-Gaussian half of a layer.
///
/// Every gate here is diagonal in the Fock basis; generic diagonal gates are
/// supplied as a phase callback over occupation tuples.
#[derive(Clone)]
pub enum NonGaussianGate {
    /// Kerr gate with rational parameter; decomposes exactly into phase shifters.
    Kerr(RationalKerr),
    /// Kerr gate with an arbitrary real parameter, applied exactly in the
    /// Fock backend and rationalized for the superposition backend.
    IrrationalKerr { x: f64, kind: KerrKind, modes: Vec<usize> },
    /// Arbitrary diagonal gate given by its phase (in radians) per occupation.
    Diagonal(Arc<dyn Fn(&MultiIndex) -> f64 + Send + Sync>),
}

impl fmt::Debug for NonGaussianGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonGaussianGate::Kerr(k) => f.debug_tuple("Kerr").field(k).finish(),
            NonGaussianGate::IrrationalKerr { x, kind, modes } => f
                .debug_struct("IrrationalKerr")
                .field("x", x)
                .field("kind", kind)
                .field("modes", modes)
                .finish(),
            NonGaussianGate::Diagonal(_) => f.write_str("Diagonal(<callback>)"),
        }
    }
}

impl NonGaussianGate {
    pub fn target_modes(&self) -> Vec<usize> {
        match self {
            NonGaussianGate::Kerr(k) => k.target_modes().to_vec(),
            NonGaussianGate::IrrationalKerr { modes, .. } => modes.clone(),
            NonGaussianGate::Diagonal(_) => Vec::new(),
        }
    }
}

/// One circuit layer: the non-Gaussian gate acts first, then the Gaussian.
/// A missing half is the identity.
#[derive(Debug, Clone, Default)]
pub struct Layer {
    pub non_gaussian: Option<NonGaussianGate>,
    pub gaussian: Option<GaussianUnitary>,
}

/// An m-mode circuit acting on the vacuum, per layer chi then G.
#[derive(Debug, Clone)]
pub struct CircuitIr {
    modes: usize,
    layers: Vec<Layer>,
}

impl CircuitIr {
    pub fn new(modes: usize, layers: Vec<Layer>) -> Result<Self, CircuitError> {
        if modes == 0 {
            return Err(CircuitError::NoModes);
        }
        if layers.is_empty() {
            return Err(CircuitError::Empty);
        }
        for (i, layer) in layers.iter().enumerate() {
            if let Some(ng) = &layer.non_gaussian {
                for mode in ng.target_modes() {
                    if mode >= modes {
                        return Err(CircuitError::ModeOutOfRange { layer: i, mode, modes });
                    }
                }
                if let NonGaussianGate::IrrationalKerr { kind, modes: targets, .. } = ng {
                    let expected = match kind {
                        crate::kerr::KerrKind::SelfKerr => 1,
                        crate::kerr::KerrKind::CrossKerr => 2,
                    };
                    if targets.len() != expected {
                        return Err(CircuitError::KerrArity {
                            layer: i,
                            kind: match kind {
                                crate::kerr::KerrKind::SelfKerr => "self",
                                crate::kerr::KerrKind::CrossKerr => "cross",
                            },
                            expected,
                            got: targets.len(),
                        });
                    }
                }
            }
            if let Some(g) = &layer.gaussian {
                if g.modes() != modes {
                    return Err(CircuitError::GateArityMismatch {
                        layer: i,
                        gate_modes: g.modes(),
                        modes,
                    });
                }
            }
        }
        Ok(CircuitIr { modes, layers })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// True when every non-Gaussian gate is a rational Kerr gate.
    pub fn is_rational(&self) -> bool {
        self.layers.iter().all(|layer| {
            !matches!(
                layer.non_gaussian,
                Some(NonGaussianGate::IrrationalKerr { .. }) | Some(NonGaussianGate::Diagonal(_))
            )
        })
    }

    /// Worst-case displacement and squeezing over the first `depth` layers.
    pub fn prefix_envelope(&self, depth: usize) -> CircuitEnvelope {
        let depth = depth.clamp(1, self.layers.len());
        let mut alpha_max = 0.0f64;
        let mut r_max = 0.0f64;
        for layer in &self.layers[..depth] {
            if let Some(g) = &layer.gaussian {
                alpha_max = alpha_max.max(g.max_displacement());
                r_max = r_max.max(g.max_squeezing());
            }
        }
        CircuitEnvelope::new(self.modes as u32, depth as u32, alpha_max, r_max)
            .expect("clamped prefix depth is valid")
    }

    pub fn envelope(&self) -> CircuitEnvelope {
        self.prefix_envelope(self.layers.len())
    }

    /// Exponential-energy certificate for the full circuit's output state.
    pub fn exp_energy_certificate(&self) -> ExpEnergyCertificate {
        crate::bounds::circuit_exp_energy_bound(&self.envelope())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;

    #[test]
    fn envelope_takes_maxima() {
        let g1 = GaussianUnitary::new(
            DMatrix::identity(2, 2),
            DVector::from_vec(vec![Complex64::new(0.3, 0.4), Complex64::new(0.0, 0.0)]),
            DVector::from_vec(vec![0.1, 0.2]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let g2 = GaussianUnitary::new(
            DMatrix::identity(2, 2),
            DVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(-0.9, 0.0)]),
            DVector::from_vec(vec![0.05, 0.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let circuit = CircuitIr::new(
            2,
            vec![
                Layer { non_gaussian: None, gaussian: Some(g1) },
                Layer { non_gaussian: None, gaussian: Some(g2) },
            ],
        )
        .unwrap();
        let env = circuit.envelope();
        assert_eq!(env.layers, 2);
        assert!((env.alpha_max - 0.9).abs() < 1e-15);
        assert!((env.r_max - 0.2).abs() < 1e-15);
        let prefix = circuit.prefix_envelope(1);
        assert!((prefix.alpha_max - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mode_bounds_checked() {
        let kerr = RationalKerr::self_kerr(1, 2, 5).unwrap();
        let err = CircuitIr::new(
            2,
            vec![Layer { non_gaussian: Some(NonGaussianGate::Kerr(kerr)), gaussian: None }],
        )
        .unwrap_err();
        assert!(matches!(err, CircuitError::ModeOutOfRange { mode: 5, .. }));
    }

    #[test]
    fn rationality_detection() {
        let rational = CircuitIr::new(
            1,
            vec![Layer {
                non_gaussian: Some(NonGaussianGate::Kerr(
                    RationalKerr::self_kerr(1, 3, 0).unwrap(),
                )),
                gaussian: None,
            }],
        )
        .unwrap();
        assert!(rational.is_rational());
        let irrational = CircuitIr::new(
            1,
            vec![Layer {
                non_gaussian: Some(NonGaussianGate::IrrationalKerr {
                    x: std::f64::consts::SQRT_2,
                    kind: KerrKind::SelfKerr,
                    modes: vec![0],
                }),
                gaussian: None,
            }],
        )
        .unwrap();
        assert!(!irrational.is_rational());
    }
}
