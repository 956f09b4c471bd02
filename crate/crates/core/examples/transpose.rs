//! Candidate eigenvectors of the transpose: bounded for `|λ| ≤ 1, λ ≠ 1`,
//! unbounded at `λ = 1`.
//!
//! `cargo run --example transpose`

use fibspec::spectra::{transpose_bound, transpose_eigvec_bound, transpose_eigvec_divergence, ROOT_TOL};
use fibspec::{Complex64, OperatorSpec};

fn main() -> fibspec::Result<()> {
    for spec in [OperatorSpec::f(2)?, OperatorSpec::g(3, 0.5)?] {
        println!("{:?} n={} rho={}", spec.kind, spec.n, spec.rho);
        for lambda in [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.2)] {
            let max = transpose_eigvec_bound(&spec, lambda, 2000, ROOT_TOL)?;
            let bound = transpose_bound(&spec, lambda);
            println!("  λ = {lambda:>10}: max |x_k| = {max:>10.4}, bound {:>10.4}", bound.all);
        }
        for k in [100, 1000, 10_000] {
            println!("  λ = 1, K = {k:>5}: max |x_k| = {:.1}", transpose_eigvec_divergence(&spec, k)?);
        }
    }
    Ok(())
}
