//! `x(m) = e_{m+n}/m` tends to zero while `Γ_n x(m)` tends to `ρ e_1`: the
//! graph of `Γ_n` is not closed.
//!
//! `cargo run --example nonclosed`

use fibspec::operators::nonclosedness_demo;

fn main() -> fibspec::Result<()> {
    let report = nonclosedness_demo(5, 2.0, 20)?;
    println!("{:>3} {:>8} {:>10} {:>14}", "m", "||x||", "||Γx||", "||Γx - ρe1||");
    for row in &report.rows {
        println!("{:>3} {:>8} {:>10} {:>14}", row.m, row.preimage_norm, row.image_norm, row.gap_to_limit);
    }
    println!("limit mismatch ||ρe1 - Γ0|| = {}", report.limit_mismatch);
    Ok(())
}
