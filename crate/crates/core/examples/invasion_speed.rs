//! Minimal invasion speed for the five-day latency model under Gaussian and
//! Laplace dispersal kernels.
//!
//! `cargo run --example invasion_speed`

use fibspec::invasion::{minimize_speed, InvasionModel};

fn main() -> fibspec::Result<()> {
    let models = [
        ("gaussian sigma=1 const=0.5", InvasionModel::gaussian(1.0, 0.5)?),
        ("gaussian sigma=1 const=1", InvasionModel::gaussian(1.0, 1.0)?),
        ("gaussian sigma=1 const=2", InvasionModel::gaussian(1.0, 2.0)?),
        ("laplace sigma=1 const=1", InvasionModel::laplace(1.0, 1.0)?),
        ("laplace sigma=2 const=1", InvasionModel::laplace(2.0, 1.0)?),
    ];
    for (name, model) in &models {
        let r = minimize_speed(model, 1e-10)?;
        println!(
            "{name:<28} v* = {:.10}  s* = {:.8}  lambda_max = {:.8}  ({} evaluations)",
            r.v_star, r.s_star, r.lambda_at_s, r.iterations
        );
    }
    Ok(())
}
