//! Classifies a few complex numbers against the spectra of `F_n` and `G_n`.
//!
//! `cargo run --example classify_spectrum`

use fibspec::spectra::{classify, ROOT_TOL};
use fibspec::{Complex64, OperatorSpec};

fn main() -> fibspec::Result<()> {
    let operators = [("F_1", OperatorSpec::f(1)?), ("F_4", OperatorSpec::f(4)?), ("G_5, rho=1", OperatorSpec::g(5, 1.0)?)];
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let probes = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3),
        Complex64::new(phi, 0.0),
        Complex64::new(3.0, 0.0),
        Complex64::new(-1.5, 0.7),
    ];
    for (name, spec) in &operators {
        println!("{name}");
        for &z in &probes {
            let v = classify(spec, z, ROOT_TOL)?;
            let flag = if v.boundary_flag { " (decided within tolerance)" } else { "" };
            println!("  {z:>28.6}  {:?}{flag}", v.part);
        }
    }
    Ok(())
}
