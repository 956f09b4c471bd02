//! Emits `n,re,im,modulus,in_point_spectrum` rows for every root of `p_{n+1}`,
//! ready for a scatter plot of the point spectra.
//!
//! `cargo run --example roots_scatter > roots.csv`

use fibspec::charpoly::{CharPolynomial, ROOTS_TOL};

fn main() -> fibspec::Result<()> {
    println!("n,re,im,modulus,in_point_spectrum");
    for n in [1, 2, 3, 5, 10, 20] {
        let poly = CharPolynomial::fibonacci(n)?;
        let point = poly.point_spectrum(ROOTS_TOL)?;
        for z in poly.all_roots(ROOTS_TOL)?.all() {
            let member = point.members.iter().any(|m| (m - z).norm() < 1e-9);
            println!("{n},{:.16e},{:.16e},{:.16e},{member}", z.re, z.im, z.norm());
        }
    }
    Ok(())
}
