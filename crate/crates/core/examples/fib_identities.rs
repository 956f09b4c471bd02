//! Exact norms of powers of `F_n` against the generalized Fibonacci numbers.
//!
//! `cargo run --example fib_identities`

use fibspec::operators::f_power_norm;
use fibspec::sequences::{norm_of_power, GenFibSequence};

fn main() -> fibspec::Result<()> {
    for n in 1..=3 {
        let mut seq = GenFibSequence::new(n)?;
        let head: Vec<String> = seq.prefix(12).iter().map(ToString::to_string).collect();
        println!("f^({n}): {}", head.join(", "));
        for k in [n + 1, 10, 25] {
            let matrix = f_power_norm(n, k)?;
            let identity = norm_of_power(n, k)?;
            println!("  ||F_{n}^{k}||_1 = {matrix} (f_{} = {identity})", k + n + 1);
        }
        let (sum, shifted) = seq.prefix_sum_identity(30)?;
        println!("  sum of first 30 terms = {sum}, f_{} - 1 = {shifted}", 30 + n + 1);
    }
    Ok(())
}
