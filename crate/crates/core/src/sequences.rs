//! Exact generalized Fibonacci sequences `f^{(n)}`:
//! `f_1 = … = f_{n+1} = 1`, `f_k = f_{k−1} + f_{k−n−1}` for `k > n + 1`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Memoized `f^{(n)}`. Terms are stored 0-based (`terms[0] = f_1`).
///
/// Extension mutates the cache, so concurrent use needs a clone per thread.
#[derive(Debug, Clone)]
pub struct GenFibSequence {
    n: usize,
    terms: Vec<BigUint>,
}

impl GenFibSequence {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sequence order n must be ≥ 1".into()));
        }
        Ok(Self { n, terms: vec![BigUint::one(); n + 1] })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of cached terms.
    pub fn cached_len(&self) -> usize {
        self.terms.len()
    }

    fn extend_to(&mut self, k: usize) {
        while self.terms.len() < k {
            let len = self.terms.len();
            // new index (1-based) is len+1: f_{len} + f_{len−n}
            let next = &self.terms[len - 1] + &self.terms[len - 1 - self.n];
            self.terms.push(next);
        }
    }

    /// `f^{(n)}_k`, 1-indexed.
    pub fn term(&mut self, k: usize) -> Result<BigUint> {
        if k == 0 {
            return Err(Error::Domain("sequence index k must be ≥ 1".into()));
        }
        self.extend_to(k);
        Ok(self.terms[k - 1].clone())
    }

    /// First `k` terms.
    pub fn prefix(&mut self, k: usize) -> &[BigUint] {
        self.extend_to(k);
        &self.terms[..k]
    }

    /// `(Σ_{i=1}^k f_i, f_{k+n+1} − 1)`; the two are always equal.
    pub fn prefix_sum_identity(&mut self, k: usize) -> Result<(BigUint, BigUint)> {
        if k == 0 {
            return Err(Error::Domain("k must be ≥ 1".into()));
        }
        let rhs = self.term(k + self.n + 1)? - BigUint::one();
        let sum = self.terms[..k].iter().sum();
        Ok((sum, rhs))
    }
}

/// `‖F_n^k‖₁ = f^{(n)}_{k+n+1}`, valid for `k > n`.
///
/// For `k ≤ n` use [`crate::operators::f_power_norm`], which falls back to the
/// exact truncated power.
pub fn norm_of_power(n: usize, k: usize) -> Result<BigUint> {
    if k <= n {
        return Err(Error::Domain(format!(
            "the block form of F_n^k needs k > n (got n={n}, k={k})"
        )));
    }
    GenFibSequence::new(n)?.term(k + n + 1)
}

/// `f_{m+1} / f_m` rounded once to `f64`.
pub fn ratio_limit_estimate(n: usize, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("m must be ≥ 2, got {m}")));
    }
    let mut seq = GenFibSequence::new(n)?;
    let num = seq.term(m + 1)?;
    let den = seq.term(m)?;
    let ratio = BigRational::new(num.into(), den.into());
    ratio
        .to_f64()
        .ok_or_else(|| Error::Domain("ratio not representable as f64".into()))
}

/// `(f_{k+n+1})^{1/k}` evaluated in the log domain.
pub fn growth_root_estimate(n: usize, k: usize) -> Result<f64> {
    if k <= n {
        return Err(Error::Domain(format!("growth estimate needs k > n (got n={n}, k={k})")));
    }
    let value = GenFibSequence::new(n)?.term(k + n + 1)?;
    Ok((ln_biguint(&value) / k as f64).exp())
}

/// Natural log of a positive big integer from its top 64 bits.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Memoized top-down recurrence, independent of the cached forward fill.
    fn oracle(n: usize, k: usize, memo: &mut HashMap<usize, BigUint>) -> BigUint {
        if k <= n + 1 {
            return BigUint::one();
        }
        if let Some(v) = memo.get(&k) {
            return v.clone();
        }
        let v = oracle(n, k - 1, memo) + oracle(n, k - n - 1, memo);
        memo.insert(k, v.clone());
        v
    }

    #[test]
    fn classical_fibonacci() {
        let mut s = GenFibSequence::new(1).unwrap();
        assert_eq!(s.term(7).unwrap(), big(13));
    }

    #[test]
    fn order_two_unrolled() {
        let mut s = GenFibSequence::new(2).unwrap();
        let expect = [1u64, 1, 1, 2, 3, 4, 6, 9, 13];
        let got: Vec<BigUint> = s.prefix(9).to_vec();
        assert_eq!(got, expect.iter().map(|&v| big(v)).collect::<Vec<_>>());
    }

    #[test]
    fn order_three_matches_oracle() {
        let mut s = GenFibSequence::new(3).unwrap();
        let mut memo = HashMap::new();
        assert_eq!(s.term(20).unwrap(), oracle(3, 20, &mut memo));
        // unrolled: 1,1,1,1,2,3,4,5,7,10,14,19,26,36,50,69,95,131,181,250
        assert_eq!(s.term(20).unwrap(), big(250));
    }

    #[test]
    fn beyond_u64() {
        let mut s = GenFibSequence::new(1).unwrap();
        let f100 = s.term(100).unwrap();
        assert_eq!(f100.to_string(), "354224848179261915075");
    }

    #[test]
    fn prefix_sum_examples() {
        let mut s = GenFibSequence::new(1).unwrap();
        assert_eq!(s.prefix_sum_identity(5).unwrap(), (big(12), big(12)));
        let mut s = GenFibSequence::new(2).unwrap();
        assert_eq!(s.prefix_sum_identity(1).unwrap(), (big(1), big(1)));
        let mut s = GenFibSequence::new(4).unwrap();
        let (sum, rhs) = s.prefix_sum_identity(40).unwrap();
        let mut memo = HashMap::new();
        let brute: BigUint = (1..=40).map(|i| oracle(4, i, &mut memo)).sum();
        assert_eq!(sum, brute);
        assert_eq!(sum, rhs);
    }

    #[test]
    fn norm_of_power_examples() {
        // F_1² has column sums 2, 3, 3, …; F_1³ has 3, 5, 5, …
        assert_eq!(norm_of_power(1, 2).unwrap(), big(3));
        assert_eq!(norm_of_power(1, 3).unwrap(), big(5));
        assert_eq!(norm_of_power(2, 5).unwrap(), big(9));
        assert!(matches!(norm_of_power(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn ratio_examples() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((ratio_limit_estimate(1, 30).unwrap() - phi).abs() < 1e-10);
        assert_eq!(ratio_limit_estimate(1, 2).unwrap(), 2.0);
        assert!(ratio_limit_estimate(1, 1).is_err());
    }

    #[test]
    fn growth_examples() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((growth_root_estimate(1, 200).unwrap() - phi).abs() < 1e-2);
        assert!((growth_root_estimate(1, 2).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!(growth_root_estimate(2, 2).is_err());
    }

    #[test]
    fn ln_of_large_integer() {
        let x = BigUint::one() << 200u32;
        assert!((ln_biguint(&x) - 200.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }
}
