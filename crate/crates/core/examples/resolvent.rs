//! Closed-form resolvents of `F_n` and `G_n` checked against a dense solve of
//! a finite section.
//!
//! `cargo run --example resolvent`

use fibspec::spectra::{compare_with_dense, resolvent_apply_f, resolvent_apply_g, ROOT_TOL};
use fibspec::{Complex64, OperatorSpec, SeqVector};

fn main() -> fibspec::Result<()> {
    let y = SeqVector::new(vec![1.0, -0.5, 0.25, 0.0, 2.0, -1.0]);
    let lambda = Complex64::new(1.5, 1.1);

    let f = resolvent_apply_f(3, lambda, &y, 200, ROOT_TOL)?;
    let gap = compare_with_dense(&OperatorSpec::f(3)?, &f, &y, 150, 20)?;
    println!("F_3 at {lambda}: x_1 = {:.12}, residual {:.2e}, dense gap {gap:.2e}", f.head[0], f.residual);

    let g = resolvent_apply_g(3, 0.8, lambda, &y, 200, ROOT_TOL)?;
    let gap = compare_with_dense(&OperatorSpec::g(3, 0.8)?, &g, &y, 150, 20)?;
    println!("G_3 at {lambda}: x_1 = {:.12}, residual {:.2e}, dense gap {gap:.2e}", g.head[0], g.residual);

    match resolvent_apply_f(1, Complex64::new((1.0 + 5f64.sqrt()) / 2.0, 0.0), &y, 50, ROOT_TOL) {
        Ok(_) => println!("unexpected: the golden ratio is an eigenvalue of F_1"),
        Err(e) => println!("at the golden ratio: {e}"),
    }
    Ok(())
}
