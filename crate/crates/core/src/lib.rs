//! Spectra of the generalized Fibonacci operators `F_n` and the Fibonacci-like
//! operators `G_n`, `Γ_n` acting on `l¹`.
//!
//! The crate is organised bottom-up:
//!
//! * [`charpoly`]: the characteristic polynomials `p_{n+1}` and `q_{n+1}`,
//!   their dominant root, all roots, and the `ρ₀` root-count classifier.
//! * [`sequences`]: exact generalized Fibonacci sequences and the norm, sum
//!   and ratio identities tied to powers of `F_n`.
//! * [`operators`]: finite sections of `F_n`, `G_n`, `Γ_n`, exact integer
//!   powers, power iteration and the non-closedness demonstration for `Γ_n`.
//! * [`spectra`]: classification of a complex number against the spectrum,
//!   eigenvectors, closed-form resolvents and transpose checks.
//! * [`invasion`]: the `Γ₅` invasion-speed model.
//! * [`cli`]: the command front end used by the `fibspec` binary.

// NaN-rejecting guards are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charpoly;
pub mod cli;
pub mod error;
pub mod invasion;
pub mod operators;
pub mod sequences;
pub mod spectra;

pub use charpoly::{CharPolynomial, Family, Regime, RootCountReport, RootSet};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operators::{OperatorKind, OperatorSpec, SeqVector, TruncatedOperator};
pub use sequences::GenFibSequence;
pub use spectra::{Eigenvector, SpectralPart, SpectrumVerdict};
