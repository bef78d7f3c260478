//! Certified simulation of continuous-variable bosonic circuits.
//!
//! The crate tracks circuits of Gaussian and energy-preserving diagonal
//! non-Gaussian gates acting on vacuum, through two independent backends:
//!
//! - [`fock_backend`]: sparse truncated Fock amplitudes with a per-layer
//!   certified error ledger;
//! - [`superposition`]: exact superpositions of Gaussian states obtained by
//!   splitting rational Kerr gates into phase shifters.
//!
//! Around them sit [`bounds`] (closed-form cutoffs, exponential-energy
//! certificates, growth factors, error budgets, sample counts), [`kerr`]
//! (phase-shifter decompositions and Diophantine rationalization), and
//! [`cutting`] (Monte-Carlo quasiprobability estimation with Hoeffding
//! sample counts).
//!
//! The companion book under `book/` walks through the concepts with runnable
//! snippets; those snippets compile and run as doc-tests of this crate.

pub mod bounds;
pub mod circuit;
pub mod cutting;
pub mod fock;
pub mod fock_backend;
pub mod gaussian;
pub mod kerr;
pub mod superposition;

pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            #[allow(dead_code)]
            struct $name;
        };
    }

    chapter!(Intro, "../../../book/src/introduction.md");
    chapter!(FockSpaces, "../../../book/src/fock-states.md");
    chapter!(Bounds, "../../../book/src/energy-bounds.md");
    chapter!(Gaussian, "../../../book/src/gaussian-calculus.md");
    chapter!(Kerr, "../../../book/src/kerr-decompositions.md");
    chapter!(FockBackend, "../../../book/src/fock-backend.md");
    chapter!(Superposition, "../../../book/src/superposition-backend.md");
    chapter!(Cutting, "../../../book/src/circuit-cutting.md");
    chapter!(CommandLine, "../../../book/src/cli.md");
}
