//! Dominant root of `p_{n+1}` for small `n`, with the sequence ratio that converges to it.
//!
//! `cargo run --example golden_ratio`

use fibspec::charpoly::{CharPolynomial, DOMINANT_TOL};
use fibspec::sequences::{growth_root_estimate, ratio_limit_estimate};

fn main() -> fibspec::Result<()> {
    println!("{:>3} {:>20} {:>20} {:>20}", "n", "spectral radius", "f_81 / f_80", "f_(k+n+1)^(1/k)");
    for n in 1..=8 {
        let radius = CharPolynomial::fibonacci(n)?.dominant_root(DOMINANT_TOL)?;
        let ratio = ratio_limit_estimate(n, 80)?;
        let growth = growth_root_estimate(n, 400)?;
        println!("{n:>3} {radius:>20.15} {ratio:>20.15} {growth:>20.15}");
    }
    Ok(())
}
